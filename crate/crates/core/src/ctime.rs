//! Continuous-time limit of the collision dynamics.
//!
//! Shrinking the collision duration while scaling the coupling
//! (`varphi = exp(-2 gamma tau)`, `delta = exp(-kappa tau)/2`, `p -> 1/2`)
//! turns the discrete family into Pauli dynamical maps with
//!
//! ```text
//! lam_t  = exp(-(gamma + kappa/2) t) [cosh(K t) + kappa/(2K) sinh(K t)] ,
//! lam3_t = exp(-2 gamma t) ,          K = sqrt(kappa^2 + 4 gamma^2)/2 ,
//! ```
//!
//! where `lam_t` solves the memory-kernel equation
//! `d lam/dt = -gamma lam + gamma^2 int_0^t exp(-(kappa+gamma)(t-s)) lam_s ds`.
//! The canonical rates are `gamma_t^(1,2) = gamma` and a third rate that is
//! negative at every positive time while the family stays completely
//! positive and P-divisible.

use crate::dynamics::{eigenvalues_recurrence, CollisionModel};
use crate::env::{ChainParams, MarkovChainEnv};
use crate::pauli::PauliDiagonalMap;
use crate::{Error, Real, Result};

/// Rates of the stroboscopic-limit dynamics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuousModel<T> {
    gamma: T,
    kappa: T,
}

impl<T: Real> ContinuousModel<T> {
    pub fn new(gamma: T, kappa: T) -> Result<Self> {
        if gamma <= T::zero() || !gamma.is_finite() {
            return Err(Error::Constraint(format!(
                "gamma > 0 violated: gamma = {gamma}"
            )));
        }
        if kappa < T::zero() || !kappa.is_finite() {
            return Err(Error::Constraint(format!(
                "kappa >= 0 violated: kappa = {kappa}"
            )));
        }
        Ok(Self { gamma, kappa })
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    /// `K = sqrt(kappa^2 + 4 gamma^2)/2`.
    pub fn k_rate(&self) -> T {
        (self.kappa * self.kappa + T::of(4.0) * self.gamma * self.gamma).sqrt() * T::of(0.5)
    }

    /// Closed-form eigenvalue pair `(lam_t, lam3_t)`.
    pub fn lambda_t(&self, t: T) -> (T, T) {
        let k = self.k_rate();
        let damp = (-(self.gamma + self.kappa * T::of(0.5)) * t).exp();
        let lam = damp * ((k * t).cosh() + self.kappa / (k + k) * (k * t).sinh());
        let lam3 = (-T::of(2.0) * self.gamma * t).exp();
        (lam, lam3)
    }

    /// Snapshot map at time `t`.
    pub fn map_at(&self, t: T) -> PauliDiagonalMap<T> {
        let (lam, lam3) = self.lambda_t(t);
        PauliDiagonalMap::new([T::one(), lam, lam, lam3]).expect("finite eigenvalues")
    }

    /// Intertwiner between times `t >= s`.
    pub fn intertwiner(&self, t: T, s: T) -> Result<PauliDiagonalMap<T>> {
        Ok(self.map_at(t).compose(&self.map_at(s).inverse()?))
    }

    /// Laplace poles `z_pm = (-(kappa + 2 gamma) pm sqrt(kappa^2 + 4 gamma^2))/2`,
    /// both non-positive.
    pub fn laplace_poles(&self) -> (T, T) {
        let k2 = self.k_rate() + self.k_rate();
        let base = -(self.kappa + T::of(2.0) * self.gamma);
        ((base + k2) * T::of(0.5), (base - k2) * T::of(0.5))
    }
}

/// Canonical rate functions of the continuous family.
#[derive(Clone, Copy, Debug)]
pub struct RateFunctions<T> {
    model: ContinuousModel<T>,
}

/// Rate triple at one time plus the Bloch-plane decay `Gamma_t` governing
/// `d lam/dt = -Gamma_t lam`; the generator convention is
/// `L_t[rho] = (1/2) sum_i gamma_t^(i) (s_i rho s_i - rho)`, which gives
/// `Gamma_t = gamma + gamma_t^(3)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rates<T> {
    pub gamma_1: T,
    pub gamma_2: T,
    pub gamma_3: T,
    pub big_gamma: T,
}

impl<T: Real> RateFunctions<T> {
    pub fn new(model: ContinuousModel<T>) -> Self {
        Self { model }
    }

    /// Rates at `t > 0`:
    /// `gamma_t^(3) = -2 gamma^2 / (2K coth(K t) + kappa)`, negative for all
    /// positive times.
    pub fn eval(&self, t: T) -> Rates<T> {
        let gamma = self.model.gamma();
        let kappa = self.model.kappa();
        let k = self.model.k_rate();
        let coth = T::one() / (k * t).tanh();
        let gamma_3 = -(T::of(2.0) * gamma * gamma) / ((k + k) * coth + kappa);
        Rates {
            gamma_1: gamma,
            gamma_2: gamma,
            gamma_3,
            big_gamma: gamma + gamma_3,
        }
    }
}

/// Rates at one time; see [`RateFunctions::eval`].
pub fn rates<T: Real>(model: &ContinuousModel<T>, t: T) -> Rates<T> {
    RateFunctions::new(*model).eval(t)
}

/// Numerical solution of the memory-kernel equation on `[0, t_max]`.
///
/// The exponential kernel admits an exact local embedding: with
/// `m_t = int_0^t exp(-(kappa+gamma)(t-s)) lam_s ds` the pair obeys
/// `d lam/dt = -gamma lam + gamma^2 m`, `d m/dt = lam - (kappa+gamma) m`,
/// integrated with classical 4th-order steps. Serves as the independent
/// oracle for [`ContinuousModel::lambda_t`]. A step-doubling comparison at
/// the final time rejects steps too coarse for a `1e-9` budget.
pub fn volterra_oracle<T: Real>(
    model: &ContinuousModel<T>,
    t_max: T,
    step: T,
) -> Result<Vec<(T, T)>> {
    if step <= T::zero() || !step.is_finite() {
        return Err(Error::Constraint(format!("step > 0 violated: {step}")));
    }
    let coarse = integrate(model, t_max, step);
    let fine = integrate(model, t_max, step * T::of(0.5));
    let last_coarse = coarse.last().expect("nonempty").1;
    let last_fine = fine.last().expect("nonempty").1;
    // Step doubling: local truncation dominates at order 4.
    let estimate = (last_coarse - last_fine).abs() / T::of(15.0);
    let budget = T::of(1e-9);
    if estimate > budget {
        return Err(Error::StepTooCoarse {
            estimate: estimate.to_f64().unwrap_or(f64::NAN),
            budget: budget.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(fine.into_iter().step_by(2).collect())
}

fn integrate<T: Real>(model: &ContinuousModel<T>, t_max: T, step: T) -> Vec<(T, T)> {
    let gamma = model.gamma();
    let kappa = model.kappa();
    let rhs = |state: [T; 2]| -> [T; 2] {
        [
            -gamma * state[0] + gamma * gamma * state[1],
            state[0] - (kappa + gamma) * state[1],
        ]
    };
    let steps = (t_max / step).ceil().to_f64().unwrap_or(0.0) as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut state = [T::one(), T::zero()];
    let mut t = T::zero();
    out.push((t, state[0]));
    let half = T::of(0.5);
    let sixth = T::one() / T::of(6.0);
    for _ in 0..steps {
        let k1 = rhs(state);
        let k2 = rhs([
            state[0] + half * step * k1[0],
            state[1] + half * step * k1[1],
        ]);
        let k3 = rhs([
            state[0] + half * step * k2[0],
            state[1] + half * step * k2[1],
        ]);
        let k4 = rhs([state[0] + step * k3[0], state[1] + step * k3[1]]);
        for i in 0..2 {
            state[i] =
                state[i] + step * sixth * (k1[i] + T::of(2.0) * k2[i] + T::of(2.0) * k3[i] + k4[i]);
        }
        t = t + step;
        out.push((t, state[0]));
    }
    out
}

/// Discrete chain realising the continuous model at collision duration `tau`:
/// `p = 1/2`, `r = p0 = 0`, `delta = exp(-kappa tau)/2`,
/// `varphi = exp(-2 gamma tau)`.
pub fn stroboscopic_chain<T: Real>(
    model: &ContinuousModel<T>,
    tau: T,
) -> Result<CollisionModel<T>> {
    if tau <= T::zero() || !tau.is_finite() {
        return Err(Error::Constraint(format!("tau > 0 violated: {tau}")));
    }
    let half = T::of(0.5);
    let delta = (-model.kappa() * tau).exp() * half;
    let params = ChainParams::new(T::zero(), half, T::zero(), delta)?;
    let env = MarkovChainEnv::new(params)?;
    CollisionModel::new(env, (-T::of(2.0) * model.gamma() * tau).exp())
}

/// One row of a stroboscopic convergence study.
#[derive(Clone, Copy, Debug)]
pub struct StroboscopicError<T> {
    pub tau: T,
    pub steps: usize,
    pub discrete: T,
    pub continuous: T,
    pub abs_error: T,
}

/// Compares discrete eigenvalues at `n = ceil(t / tau)` against `lam_t` for
/// each collision duration in `taus`.
pub fn stroboscopic_convergence<T: Real>(
    model: &ContinuousModel<T>,
    t: T,
    taus: &[T],
) -> Result<Vec<StroboscopicError<T>>> {
    if t <= T::zero() || !t.is_finite() {
        return Err(Error::Constraint(format!("t > 0 violated: {t}")));
    }
    let (lam_t, _) = model.lambda_t(t);
    let mut rows = Vec::with_capacity(taus.len());
    for &tau in taus {
        let chain = stroboscopic_chain(model, tau)?;
        let n = (t / tau).ceil().to_f64().unwrap_or(0.0) as usize;
        let traj = eigenvalues_recurrence(&chain, n);
        let discrete = traj.lam(n);
        rows.push(StroboscopicError {
            tau,
            steps: n,
            discrete,
            continuous: lam_t,
            abs_error: (discrete - lam_t).abs(),
        });
    }
    Ok(rows)
}

/// One geometric branch of the convex semigroup split: eigenvalues
/// `(1, exp(z t), exp(z t), exp(-2 gamma t))`.
#[derive(Clone, Copy, Debug)]
pub struct SemigroupBranch<T> {
    pub pole: T,
    gamma: T,
}

impl<T: Real> SemigroupBranch<T> {
    pub fn map_at(&self, t: T) -> PauliDiagonalMap<T> {
        let lam = (self.pole * t).exp();
        let lam3 = (-T::of(2.0) * self.gamma * t).exp();
        PauliDiagonalMap::new([T::one(), lam, lam, lam3]).expect("finite eigenvalues")
    }

    /// Canonical third rate of this branch, `-pole - gamma`; the branch is a
    /// completely positive semigroup iff this is non-negative.
    pub fn third_rate(&self) -> T {
        -self.pole - self.gamma
    }

    pub fn is_completely_positive_semigroup(&self) -> bool {
        self.third_rate() >= -T::tol_boundary()
    }
}

/// Convex split of the dynamics into two semigroups.
#[derive(Clone, Copy, Debug)]
pub struct ConvexSemigroupSplit<T> {
    /// Weight of the slow branch, `a = 1/2 + kappa / (2 sqrt(kappa^2 + 4 gamma^2))`.
    pub weight: T,
    /// Slow branch (pole `z_+`); positive but not completely positive.
    pub slow: SemigroupBranch<T>,
    /// Fast branch (pole `z_-`); the completely positive one.
    pub fast: SemigroupBranch<T>,
}

impl<T: Real> ConvexSemigroupSplit<T> {
    /// `a slow(t) + (1-a) fast(t)`, again Pauli diagonal.
    pub fn reconstruct(&self, t: T) -> PauliDiagonalMap<T> {
        let s = self.slow.map_at(t);
        let f = self.fast.map_at(t);
        let mut lam = [T::zero(); 4];
        for j in 0..4 {
            lam[j] = self.weight * s.eigenvalue(j) + (T::one() - self.weight) * f.eigenvalue(j);
        }
        PauliDiagonalMap::new(lam).expect("finite eigenvalues")
    }
}

/// Splits `Lambda_t` as a convex combination of two semigroups. Only the
/// fast branch is a completely positive semigroup; the slow branch, which
/// carries the weight `a`, is merely positive.
pub fn convex_two_semigroups<T: Real>(model: &ContinuousModel<T>) -> ConvexSemigroupSplit<T> {
    let (z_plus, z_minus) = model.laplace_poles();
    let k2 = model.k_rate() + model.k_rate(); // sqrt(kappa^2 + 4 gamma^2)
    let weight = T::of(0.5) + model.kappa() / (k2 + k2);
    ConvexSemigroupSplit {
        weight,
        slow: SemigroupBranch {
            pole: z_plus,
            gamma: model.gamma(),
        },
        fast: SemigroupBranch {
            pole: z_minus,
            gamma: model.gamma(),
        },
    }
}
