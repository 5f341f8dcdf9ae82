//! Discrete-time reduced dynamics of a qubit colliding with the chain.
//!
//! One collision applies the Pauli map `phi_k` selected by the chain symbol
//! at the active site; after `n` collisions the reduced dynamics is the
//! path-weighted average `Lambda_n = sum_paths p(path) phi_path`, itself a
//! Pauli-diagonal map with eigenvalues
//!
//! ```text
//! lam_n^(j) = sum_paths p(path) prod_k mu_{i_k}^(j) .
//! ```
//!
//! Three independent evaluation routes are provided and cross-checked:
//! a brute-force path sum (the oracle), the memory-kernel recurrence, and a
//! closed form for the unitary coupling `varphi = -1`. The module also
//! classifies P-, CP- and tensor-P-divisibility both analytically and
//! through Choi spectra of the intertwiners.

use crate::env::{ChainParams, MarkovChainEnv, SYMBOLS};
use crate::pauli::PauliDiagonalMap;
use crate::qmat::jacobi_eigenvalues;
use crate::{Error, Real, Result};

/// Collision model: chain environment plus the coupling parameter.
///
/// The collision maps are `phi_0 = id` and, for `k = 1, 2, 3`,
/// `mu_k^(j) = varphi` for `j != k` and `1` on `j = 0, k`.
#[derive(Clone, Debug)]
pub struct CollisionModel<T> {
    env: MarkovChainEnv<T>,
    varphi: T,
}

impl<T: Real> CollisionModel<T> {
    pub fn new(env: MarkovChainEnv<T>, varphi: T) -> Result<Self> {
        if !varphi.is_finite() || varphi.abs() > T::one() + T::tol_validate() {
            return Err(Error::Constraint(format!(
                "|varphi| <= 1 violated: varphi = {varphi}"
            )));
        }
        Ok(Self { env, varphi })
    }

    /// Unitary coupling `varphi = -1`: collisions conjugate by Pauli matrices.
    pub fn unitary(env: MarkovChainEnv<T>) -> Self {
        Self {
            env,
            varphi: -T::one(),
        }
    }

    pub fn env(&self) -> &MarkovChainEnv<T> {
        &self.env
    }

    pub fn varphi(&self) -> T {
        self.varphi
    }

    /// The collision map selected by symbol `k`.
    pub fn collision_map(&self, k: usize) -> PauliDiagonalMap<T> {
        let mut lam = [self.varphi; 4];
        lam[0] = T::one();
        if k > 0 {
            lam[k] = T::one();
        } else {
            lam = [T::one(); 4];
        }
        PauliDiagonalMap::new(lam).expect("finite eigenvalues")
    }

    /// Single-collision average `sum_k p_k phi_k`; the reduced dynamics is
    /// its `n`-th power when the chain is uncorrelated.
    pub fn average_collision_map(&self) -> PauliDiagonalMap<T> {
        let stat = self.env.stationary();
        let mut lam = [T::zero(); 4];
        for k in 0..SYMBOLS {
            let phi = self.collision_map(k);
            for j in 0..4 {
                lam[j] = lam[j] + stat[k] * phi.eigenvalue(j);
            }
        }
        PauliDiagonalMap::new(lam).expect("finite eigenvalues")
    }
}

const BRUTE_FORCE_HORIZON: usize = 12;

/// Eigenvalue 4-tuples of `Lambda_0 .. Lambda_n` by explicit path summation.
///
/// Zero-probability branches are skipped; above `n = 12` a positive
/// `prune_below` is required and the discarded mass propagates into the
/// result untracked (the caller owns the error budget).
pub fn bruteforce_eigenvalue_trajectory<T: Real>(
    model: &CollisionModel<T>,
    n_max: usize,
    prune_below: T,
) -> Result<Vec<[T; 4]>> {
    if n_max > BRUTE_FORCE_HORIZON && prune_below <= T::zero() {
        return Err(Error::PathBlowup {
            paths: (SYMBOLS as u128).pow(n_max as u32),
        });
    }
    let mut acc = vec![[T::zero(); 4]; n_max + 1];
    acc[0] = [T::one(); 4];
    if n_max > 0 {
        let mu: Vec<[T; 4]> = (0..SYMBOLS)
            .map(|k| model.collision_map(k).eigenvalues())
            .collect();
        let env = model.env();
        let stat = env.stationary();
        for s in 0..SYMBOLS {
            descend(env, &mu, s, stat[s], mu[s], 1, n_max, prune_below, &mut acc);
        }
    }
    Ok(acc)
}

#[allow(clippy::too_many_arguments)]
fn descend<T: Real>(
    env: &MarkovChainEnv<T>,
    mu: &[[T; 4]],
    symbol: usize,
    prob: T,
    product: [T; 4],
    depth: usize,
    n_max: usize,
    prune_below: T,
    acc: &mut [[T; 4]],
) {
    if prob <= prune_below {
        return;
    }
    for j in 0..4 {
        acc[depth][j] = acc[depth][j] + prob * product[j];
    }
    if depth == n_max {
        return;
    }
    for next in 0..SYMBOLS {
        let mut prod = product;
        for j in 0..4 {
            prod[j] = prod[j] * mu[next][j];
        }
        descend(
            env,
            mu,
            next,
            prob * env.transition(next, symbol),
            prod,
            depth + 1,
            n_max,
            prune_below,
            acc,
        );
    }
}

/// Brute-force reduced map after `n` collisions; the oracle all closed forms
/// are checked against.
pub fn reduced_map_bruteforce<T: Real>(
    model: &CollisionModel<T>,
    n: usize,
) -> Result<PauliDiagonalMap<T>> {
    let traj = bruteforce_eigenvalue_trajectory(model, n, T::zero())?;
    PauliDiagonalMap::new(traj[n])
}

/// Eigenvalue trajectory of the reduced dynamics together with the derived
/// constants of the unitary closed form.
#[derive(Clone, Debug)]
pub struct EigenvalueTrajectory<T> {
    lam: Vec<T>,
    lam3: Vec<T>,
    alpha: T,
    beta: T,
}

impl<T: Real> EigenvalueTrajectory<T> {
    pub fn n_max(&self) -> usize {
        self.lam.len() - 1
    }

    /// The common `lam^(1) = lam^(2)` branch.
    pub fn lam(&self, n: usize) -> T {
        self.lam[n]
    }

    pub fn lam3(&self, n: usize) -> T {
        self.lam3[n]
    }

    /// `alpha = 1 - 2(p + r)`.
    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// `beta = sqrt(alpha^2 + 16 p delta)`.
    pub fn beta(&self) -> T {
        self.beta
    }

    /// Dominant geometric root `(beta + alpha)/2`.
    pub fn dominant_root(&self) -> T {
        (self.beta + self.alpha) * T::of(0.5)
    }

    /// Subdominant root magnitude `(beta - alpha)/2`.
    pub fn subdominant_root(&self) -> T {
        (self.beta - self.alpha) * T::of(0.5)
    }

    pub fn map_at(&self, n: usize) -> PauliDiagonalMap<T> {
        PauliDiagonalMap::new([T::one(), self.lam[n], self.lam[n], self.lam3[n]])
            .expect("finite eigenvalues")
    }

    /// Intertwiner `Lambda_{n,m}` as the ratio of the two snapshots; fails
    /// when `Lambda_m` is singular.
    pub fn intertwiner(&self, n: usize, m: usize) -> Result<PauliDiagonalMap<T>> {
        Ok(self.map_at(n).compose(&self.map_at(m).inverse()?))
    }
}

/// Trajectory via the memory-kernel recurrence
/// `lam_n = [1 - (p+r)(1-phi)] lam_{n-1}
///          + p delta (1-phi)^2 sum_j lam_j [(1+phi) delta]^{n-j-2}`,
/// `lam3_n = [1 - 2p(1-phi)]^n`.
pub fn eigenvalues_recurrence<T: Real>(
    model: &CollisionModel<T>,
    n_max: usize,
) -> EigenvalueTrajectory<T> {
    let params = model.env().params();
    let (p, r, delta) = (params.p, params.r, params.delta);
    let phi = model.varphi();
    let one = T::one();
    let drift = one - (p + r) * (one - phi);
    let kernel = (one + phi) * delta;
    let memory = p * delta * (one - phi) * (one - phi);
    let decay3 = one - T::of(2.0) * p * (one - phi);

    let mut lam = Vec::with_capacity(n_max + 1);
    lam.push(one);
    if n_max >= 1 {
        lam.push(drift);
    }
    // Running kernel sum s_n = sum_{j=0}^{n-2} lam_j kernel^{n-2-j}.
    let mut s = one; // s_2 = lam_0
    for n in 2..=n_max {
        lam.push(drift * lam[n - 1] + memory * s);
        s = kernel * s + lam[n - 1];
    }
    let lam3 = (0..=n_max).map(|n| decay3.powi(n as i32)).collect();
    EigenvalueTrajectory {
        lam,
        lam3,
        alpha: params.alpha(),
        beta: params.beta(),
    }
}

/// Closed-form eigenvalues `(lam_n, lam3_n)` for the unitary coupling:
///
/// ```text
/// lam_n  = (beta+alpha)/(2 beta) ((alpha+beta)/2)^n
///        + (beta-alpha)/(2 beta) ((alpha-beta)/2)^n ,
/// lam3_n = (1 - 4p)^n .
/// ```
///
/// Requires `alpha > 0`; the weights are evaluated in a cancellation-free
/// form so small `p delta` stays accurate.
pub fn eigenvalues_unitary_closed_form<T: Real>(
    params: &ChainParams<T>,
    n: usize,
) -> Result<(T, T)> {
    let alpha = params.alpha();
    if alpha <= T::zero() {
        return Err(Error::UnsupportedRegime(format!(
            "closed form needs alpha > 0, got alpha = {alpha}"
        )));
    }
    let beta = params.beta();
    let half = T::of(0.5);
    let root_plus = (alpha + beta) * half;
    // alpha - beta = -16 p delta / (alpha + beta), avoiding cancellation.
    let pd16 = T::of(16.0) * params.p * params.delta;
    let root_minus = -half * pd16 / (alpha + beta);
    let weight_plus = (beta + alpha) / (beta + beta);
    let weight_minus = half * pd16 / (beta * (alpha + beta));
    let lam = weight_plus * root_plus.powi(n as i32) + weight_minus * root_minus.powi(n as i32);
    let lam3 = (T::one() - T::of(4.0) * params.p).powi(n as i32);
    Ok((lam, lam3))
}

/// Closed-form trajectory for the unitary coupling.
pub fn unitary_trajectory<T: Real>(
    params: &ChainParams<T>,
    n_max: usize,
) -> Result<EigenvalueTrajectory<T>> {
    let mut lam = Vec::with_capacity(n_max + 1);
    let mut lam3 = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let (l, l3) = eigenvalues_unitary_closed_form(params, n)?;
        lam.push(l);
        lam3.push(l3);
    }
    Ok(EigenvalueTrajectory {
        lam,
        lam3,
        alpha: params.alpha(),
        beta: params.beta(),
    })
}

/// Consecutive intertwiner `Lambda_{n,n-1}` of the unitary model in closed
/// form; well-defined for `alpha > 0` even where `lam3` vanishes, because
/// the third ratio is constantly `1 - 4p`.
pub fn consecutive_intertwiner_unitary<T: Real>(
    params: &ChainParams<T>,
    n: usize,
) -> Result<PauliDiagonalMap<T>> {
    if n == 0 {
        return Err(Error::Constraint("intertwiner step n >= 1 required".into()));
    }
    let (lam_n, _) = eigenvalues_unitary_closed_form(params, n)?;
    let (lam_prev, _) = eigenvalues_unitary_closed_form(params, n - 1)?;
    let ratio = lam_n / lam_prev;
    let lam3 = T::one() - T::of(4.0) * params.p;
    PauliDiagonalMap::new([T::one(), ratio, ratio, lam3])
}

/// Divisibility flags for a family of maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DivisibilityVerdicts {
    pub p_divisible: bool,
    pub cp_divisible: bool,
    pub tensor_p_divisible: bool,
}

/// Analytic and numerical classification of the unitary-model dynamics.
#[derive(Clone, Debug)]
pub struct DivisibilityReport<T> {
    pub analytic: DivisibilityVerdicts,
    pub numeric: DivisibilityVerdicts,
    /// Signed residuals of the analytic inequalities (P, CP, tensor-P);
    /// non-negative means divisible.
    pub margins: [T; 3],
    /// Number of consecutive intertwiners inspected numerically.
    pub depth: usize,
}

/// Signed residuals of the three divisibility inequalities, all in the
/// `2 p delta` scale:
///
/// * P:        `r alpha + p alpha - 2 p delta >= 0`
/// * CP:       `r alpha - 2 p delta >= 0`
/// * tensor-P: `r alpha + p alpha - (alpha/2)(1 - sqrt(1 - 4p(1-2p))) - 2 p delta >= 0`
pub fn divisibility_margins<T: Real>(params: &ChainParams<T>) -> [T; 3] {
    let alpha = params.alpha();
    let (p, r, delta) = (params.p, params.r, params.delta);
    let two = T::of(2.0);
    let drive = two * p * delta;
    let m_p = r * alpha + p * alpha - drive;
    let m_cp = r * alpha - drive;
    let s = (T::one() - T::of(4.0) * p * (T::one() - two * p)).sqrt();
    let m_t = r * alpha + p * alpha - alpha * T::of(0.5) * (T::one() - s) - drive;
    [m_p, m_cp, m_t]
}

/// Default numerical scan depth.
pub const DIVISIBILITY_SCAN_DEPTH: usize = 40;

/// Classifies the unitary-model dynamics.
///
/// The analytic inequalities are evaluated with an inclusive boundary band
/// and cross-checked against Choi spectra of the consecutive intertwiners
/// `n = 2..depth` computed from the recurrence trajectory. A disagreement
/// farther than `1e-9` from the analytic boundary is an error.
pub fn classify_divisibility<T: Real>(
    params: &ChainParams<T>,
    depth: usize,
) -> Result<DivisibilityReport<T>> {
    let alpha = params.alpha();
    if alpha <= T::zero() {
        return Err(Error::UnsupportedRegime(format!(
            "analytic divisibility verdicts need alpha > 0, got {alpha}"
        )));
    }
    let band = T::tol_boundary();
    let margins = divisibility_margins(params);
    let analytic = DivisibilityVerdicts {
        p_divisible: margins[0] >= -band,
        cp_divisible: margins[1] >= -band,
        tensor_p_divisible: margins[2] >= -band,
    };

    let env = MarkovChainEnv::new(*params)?;
    let model = CollisionModel::unitary(env);
    let depth = depth.max(2);
    let traj = eigenvalues_recurrence(&model, depth);
    let fixed_point = traj.dominant_root();
    let mut numeric = DivisibilityVerdicts {
        p_divisible: true,
        cp_divisible: true,
        tensor_p_divisible: true,
    };
    let mut inspected = 0;
    for n in 2..=depth {
        let ratio = traj.lam(n) / traj.lam(n - 1);
        let step =
            PauliDiagonalMap::new([T::one(), ratio, ratio, T::one() - T::of(4.0) * params.p])?;
        numeric.p_divisible &= step.is_positive(band);
        let choi_min = *jacobi_eigenvalues(step.choi_matrix().matrix())
            .last()
            .expect("4x4 spectrum");
        numeric.cp_divisible &= choi_min >= -band;
        let choi2_min = *jacobi_eigenvalues(step.compose(&step).choi_matrix().matrix())
            .last()
            .expect("4x4 spectrum");
        numeric.tensor_p_divisible &= choi2_min >= -band;
        inspected = n;
        if (ratio - fixed_point).abs() < T::of(1e-12) {
            break;
        }
    }

    let mismatch_band = T::of(1e-9);
    for (idx, (label, (a, b))) in [
        ("P", (analytic.p_divisible, numeric.p_divisible)),
        ("CP", (analytic.cp_divisible, numeric.cp_divisible)),
        (
            "tensor-P",
            (analytic.tensor_p_divisible, numeric.tensor_p_divisible),
        ),
    ]
    .into_iter()
    .enumerate()
    {
        if a != b && margins[idx].abs() > mismatch_band {
            return Err(Error::VerdictMismatch(format!(
                "{label}: analytic {a}, numeric {b}, margin {}",
                margins[idx]
            )));
        }
    }

    Ok(DivisibilityReport {
        analytic,
        numeric,
        margins,
        depth: inspected,
    })
}

/// Convex split of the unitary-model dynamics into two geometric semigroups.
#[derive(Clone, Debug)]
pub struct SemigroupDecomposition<T> {
    pub weight_plus: T,
    pub psi_plus: PauliDiagonalMap<T>,
    pub weight_minus: T,
    pub psi_minus: PauliDiagonalMap<T>,
}

impl<T: Real> SemigroupDecomposition<T> {
    /// `w+ Psi+^n + w- Psi-^n`, again Pauli diagonal.
    pub fn reconstruct(&self, n: usize) -> PauliDiagonalMap<T> {
        let mut lam = [T::zero(); 4];
        for j in 0..4 {
            lam[j] = self.weight_plus * self.psi_plus.eigenvalue(j).powi(n as i32)
                + self.weight_minus * self.psi_minus.eigenvalue(j).powi(n as i32);
        }
        PauliDiagonalMap::new(lam).expect("finite eigenvalues")
    }
}

/// Splits `Lambda_n = w+ Psi+^n + w- Psi-^n` with
/// `psi_pm^(1,2) = (alpha pm beta)/2`, `psi_pm^(3) = 1 - 4p` and weights
/// `(beta pm alpha)/(2 beta)`.
pub fn semigroup_decomposition<T: Real>(
    params: &ChainParams<T>,
) -> Result<SemigroupDecomposition<T>> {
    let alpha = params.alpha();
    let beta = params.beta();
    if beta <= T::zero() {
        return Err(Error::UnsupportedRegime(
            "semigroup split needs beta > 0".into(),
        ));
    }
    let half = T::of(0.5);
    let lam3 = T::one() - T::of(4.0) * params.p;
    let pd16 = T::of(16.0) * params.p * params.delta;
    let root_plus = (alpha + beta) * half;
    let root_minus = if alpha + beta > T::zero() {
        -half * pd16 / (alpha + beta)
    } else {
        (alpha - beta) * half
    };
    Ok(SemigroupDecomposition {
        weight_plus: (beta + alpha) / (beta + beta),
        psi_plus: PauliDiagonalMap::new([T::one(), root_plus, root_plus, lam3])?,
        weight_minus: (beta - alpha) / (beta + beta),
        psi_minus: PauliDiagonalMap::new([T::one(), root_minus, root_minus, lam3])?,
    })
}

/// Perturbation family `r = 0`, `delta = (1 - 2p)/2` with `p = 1/4 + eps`:
/// the first two eigenvalues coincide and the consecutive intertwiner at
/// step 2 is `(1, 1, 1, -4 eps)`.
pub fn saturated_params<T: Real>(epsilon: T) -> Result<ChainParams<T>> {
    let p = T::of(0.25) + epsilon;
    let delta = (T::one() - T::of(2.0) * p) * T::of(0.5);
    ChainParams::closed(p, T::zero(), delta)
}

/// Distribution of symbol-count classes after `n` collisions.
///
/// Paths sharing the counts `(c1, c2, c3)` of nonzero symbols induce the same
/// composite collision map, so correlation sums only need this law. Computed
/// by dynamic programming over (last symbol, counts); cost is `O(n^4)`.
pub fn symbol_class_distribution<T: Real>(
    env: &MarkovChainEnv<T>,
    n: usize,
) -> Vec<([usize; 3], T)> {
    if n == 0 {
        return vec![([0, 0, 0], T::one())];
    }
    let side = n + 1;
    let idx = |s: usize, c: [usize; 3]| ((s * side + c[0]) * side + c[1]) * side + c[2];
    let mut cur = vec![T::zero(); 4 * side * side * side];
    let stat = env.stationary();
    for s in 0..SYMBOLS {
        let mut c = [0usize; 3];
        if s > 0 {
            c[s - 1] = 1;
        }
        cur[idx(s, c)] = cur[idx(s, c)] + stat[s];
    }
    for _ in 1..n {
        let mut next = vec![T::zero(); cur.len()];
        for s in 0..SYMBOLS {
            for c1 in 0..side {
                for c2 in 0..side {
                    for c3 in 0..side {
                        let p = cur[idx(s, [c1, c2, c3])];
                        if p <= T::zero() {
                            continue;
                        }
                        for t in 0..SYMBOLS {
                            let mut c = [c1, c2, c3];
                            if t > 0 {
                                c[t - 1] += 1;
                            }
                            let j = idx(t, c);
                            next[j] = next[j] + p * env.transition(t, s);
                        }
                    }
                }
            }
        }
        cur = next;
    }
    let mut out = Vec::new();
    for c1 in 0..side {
        for c2 in 0..side {
            for c3 in 0..side {
                let mut p = T::zero();
                for s in 0..SYMBOLS {
                    p = p + cur[idx(s, [c1, c2, c3])];
                }
                if p > T::zero() {
                    out.push(([c1, c2, c3], p));
                }
            }
        }
    }
    out
}

/// Composite collision map of a symbol-count class: with `m = c1 + c2 + c3`
/// nonzero symbols, eigenvalue `j` is `varphi^(m - c_j)`.
pub fn composite_map_for_class<T: Real>(varphi: T, counts: [usize; 3]) -> PauliDiagonalMap<T> {
    let m = counts[0] + counts[1] + counts[2];
    let lam = [
        T::one(),
        varphi.powi((m - counts[0]) as i32),
        varphi.powi((m - counts[1]) as i32),
        varphi.powi((m - counts[2]) as i32),
    ];
    PauliDiagonalMap::new(lam).expect("finite eigenvalues")
}
