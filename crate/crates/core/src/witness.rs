//! Backflow-of-information witnesses.
//!
//! A biased state pair `(mu, rho, sigma)` defines the Helstrom matrix
//! `D = mu rho - (1-mu) sigma`; its evolved trace norm is the optimal
//! discrimination payoff. A revival of the norm along a trajectory signals
//! backflow of information; a revival under `Lambda (x) Lambda` while the
//! single-map family stays P-divisible is its superactivation.
//!
//! The module also provides the ensemble quantumness (minimal average
//! disturbance under local projective measurements, halved-trace-norm
//! distance), the bound `Delta D <= 2 ||intertwiner||_diamond^2 Q`, the
//! separable two-qubit construction triggering superactivation without
//! entanglement, and the classical no-go property of doubly tensored
//! stochastic families.

use crate::ctime::ContinuousModel;
use crate::dynamics::{consecutive_intertwiner_unitary, EigenvalueTrajectory};
use crate::env::ChainParams;
use crate::pauli::{
    apply_tensor_pair, fano_coefficients, from_fano_coefficients, symmetric_bell_projector,
    PauliDiagonalMap,
};
use crate::qmat::{
    partial_transpose, trace_norm_hermitian_parts, ComplexMatrix, DensityMatrix, HermitianOperator,
};
use crate::{Error, Real, Result};

/// Biased state pair whose evolved trace norm witnesses backflow.
#[derive(Clone, Debug)]
pub struct HelstromEnsemble<T> {
    mu: T,
    rho: DensityMatrix<T>,
    sigma: DensityMatrix<T>,
}

impl<T: Real> HelstromEnsemble<T> {
    pub fn new(mu: T, rho: DensityMatrix<T>, sigma: DensityMatrix<T>) -> Result<Self> {
        if mu < T::zero() || mu > T::one() {
            return Err(Error::Constraint(format!("bias {mu} outside [0, 1]")));
        }
        if rho.dim() != sigma.dim() {
            return Err(Error::DimensionMismatch(format!(
                "ensemble states have dimensions {} and {}",
                rho.dim(),
                sigma.dim()
            )));
        }
        Ok(Self { mu, rho, sigma })
    }

    pub fn bias(&self) -> T {
        self.mu
    }

    pub fn rho(&self) -> &DensityMatrix<T> {
        &self.rho
    }

    pub fn sigma(&self) -> &DensityMatrix<T> {
        &self.sigma
    }

    /// `mu rho - (1 - mu) sigma`.
    pub fn helstrom_matrix(&self) -> ComplexMatrix<T> {
        self.rho
            .matrix()
            .scale_real(self.mu)
            .sub(&self.sigma.matrix().scale_real(T::one() - self.mu))
            .expect("matching dimensions")
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }
}

/// Dynamics driving a Helstrom trajectory.
pub enum DynamicsSource<'a, T> {
    /// Snapshots at integer steps of a discrete eigenvalue trajectory.
    Discrete(&'a EigenvalueTrajectory<T>),
    /// Continuous-time snapshots at caller-chosen times.
    Continuous(&'a ContinuousModel<T>, &'a [T]),
}

/// How many copies of the map act on the ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorPower {
    One,
    Two,
}

/// Sampled Helstrom trace norms plus consecutive differences.
#[derive(Clone, Debug)]
pub struct HelstromSeries<T> {
    pub times: Vec<T>,
    pub norms: Vec<T>,
    /// `norms[k+1] - norms[k]`.
    pub differences: Vec<T>,
}

impl<T: Real> HelstromSeries<T> {
    /// Largest consecutive increase.
    pub fn max_increase(&self) -> T {
        self.differences
            .iter()
            .copied()
            .fold(T::neg_infinity(), T::max)
    }

    /// First index whose norm strictly exceeds the previous one beyond the
    /// detection threshold `1e-9`.
    pub fn first_revival(&self) -> Option<usize> {
        self.differences
            .iter()
            .position(|&d| d > T::of(1e-9))
            .map(|k| k + 1)
    }
}

fn evolved_norm<T: Real>(
    map: &PauliDiagonalMap<T>,
    delta: &ComplexMatrix<T>,
    power: TensorPower,
) -> Result<T> {
    let out = match power {
        TensorPower::One => map
            .apply(&HermitianOperator::new(delta.clone())?)?
            .into_matrix(),
        TensorPower::Two => apply_tensor_pair(map, map, delta)?,
    };
    Ok(trace_norm_hermitian_parts(&out))
}

/// Samples `|| map_t^{(x) power} [D] ||_1` along the dynamics.
pub fn helstrom_trajectory<T: Real>(
    source: DynamicsSource<'_, T>,
    ensemble: &HelstromEnsemble<T>,
    power: TensorPower,
) -> Result<HelstromSeries<T>> {
    let expected_dim = match power {
        TensorPower::One => 2,
        TensorPower::Two => 4,
    };
    if ensemble.dim() != expected_dim {
        return Err(Error::DimensionMismatch(format!(
            "tensor power {power:?} needs {expected_dim}-dimensional states, got {}",
            ensemble.dim()
        )));
    }
    let delta = ensemble.helstrom_matrix();
    let (times, norms) = match source {
        DynamicsSource::Discrete(traj) => {
            let times: Vec<T> = (0..=traj.n_max()).map(|n| T::of(n as f64)).collect();
            let norms = (0..=traj.n_max())
                .map(|n| evolved_norm(&traj.map_at(n), &delta, power))
                .collect::<Result<Vec<_>>>()?;
            (times, norms)
        }
        DynamicsSource::Continuous(model, ts) => {
            let norms = ts
                .iter()
                .map(|&t| evolved_norm(&model.map_at(t), &delta, power))
                .collect::<Result<Vec<_>>>()?;
            (ts.to_vec(), norms)
        }
    };
    let differences = norms.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(HelstromSeries {
        times,
        norms,
        differences,
    })
}

/// Exact step-`n` witness
/// `|| L_{n,n-1} (x) L_{n,n-1} [P+] ||_1 - || P+ ||_1`
/// for the unitary model at `r = 0`, via the closed-form spectrum
/// `{ (1 - l3^2)/4 twice, (1 + l3^2 +- 2 l^2)/4 }` of the evolved projector.
///
/// Positive values certify that the doubled intertwiner is not contractive,
/// hence not positive; the small-`p` leading order is `4 p^2 (2Q - 1)`.
pub fn symmetric_projector_witness<T: Real>(params: &ChainParams<T>, n: usize) -> Result<T> {
    if params.r != T::zero() {
        return Err(Error::UnsupportedRegime(
            "the projector witness closed form assumes r = 0".into(),
        ));
    }
    let step = consecutive_intertwiner_unitary(params, n)?;
    let l = step.eigenvalue(1);
    let l3 = step.eigenvalue(3);
    let quarter = T::of(0.25);
    let e_pair = (T::one() - l3 * l3) * quarter;
    let e_plus = (T::one() + l3 * l3 + T::of(2.0) * l * l) * quarter;
    let e_minus = (T::one() + l3 * l3 - T::of(2.0) * l * l) * quarter;
    Ok(e_pair.abs() + e_pair.abs() + e_plus.abs() + e_minus.abs() - T::one())
}

/// Small-`p` record for the single-qubit intertwiner acting on `X`.
#[derive(Clone, Copy, Debug)]
pub struct SmallPExpansion<T> {
    /// Exact norm change `||L_{n,n-1}[X]||_1 - ||X||_1` (step independent).
    pub exact_norm_difference: T,
    /// Exact squared Bloch length of the output.
    pub exact_bloch_sq: T,
    /// Quadratic small-`p` model of the squared Bloch length:
    /// `|x|^2 - 4p [(x1^2 + x2^2) + 2 x3^2] + 4p^2 [(1 + 2Q)(x1^2 + x2^2) + 4 x3^2]`.
    pub quadratic_bloch_sq: T,
    /// Whether the exact norm change is non-positive.
    pub contractive: bool,
}

/// Compares the exact intertwiner contraction against its quadratic
/// small-`p` model (unitary coupling, `r = 0`, `p <= 0.05`).
///
/// The model follows from squaring the eigenvalue expansions
/// `l = 1 - 2p + 4Qp^2 + O(p^3)` and `l3 = 1 - 4p`: the first order is
/// strictly negative and the correlation ratio `Q` only enters at second
/// order, so the contraction can never flip sign for one qubit.
pub fn single_qubit_expansion<T: Real>(
    params: &ChainParams<T>,
    x: &HermitianOperator<T>,
) -> Result<SmallPExpansion<T>> {
    if params.r != T::zero() {
        return Err(Error::UnsupportedRegime(
            "the small-p expansion assumes r = 0".into(),
        ));
    }
    if params.p > T::of(0.05) {
        return Err(Error::UnsupportedRegime(format!(
            "the small-p expansion assumes p <= 0.05, got p = {}",
            params.p
        )));
    }
    if x.dim() != 2 {
        return Err(Error::DimensionMismatch(
            "the expansion acts on single-qubit operators".into(),
        ));
    }
    let step = consecutive_intertwiner_unitary(params, 2)?;
    let coeffs = crate::pauli::bloch_coefficients(x.matrix());
    let (x0, x1, x2, x3) = (coeffs[0], coeffs[1], coeffs[2], coeffs[3]);
    let plane = x1 * x1 + x2 * x2;
    let axis = x3 * x3;
    let bloch_in = plane + axis;
    let l = step.eigenvalue(1);
    let l3 = step.eigenvalue(3);
    let bloch_out = l * l * plane + l3 * l3 * axis;

    let two = T::of(2.0);
    let norm_in = two * x0.abs().max(bloch_in.sqrt());
    let norm_out = two * x0.abs().max(bloch_out.sqrt());

    let p = params.p;
    let q = params.q();
    let four = T::of(4.0);
    let quadratic = bloch_in - four * p * (plane + two * axis)
        + four * p * p * ((T::one() + two * q) * plane + four * axis);

    let diff = norm_out - norm_in;
    Ok(SmallPExpansion {
        exact_norm_difference: diff,
        exact_bloch_sq: bloch_out,
        quadratic_bloch_sq: quadratic,
        contractive: diff <= T::tol_boundary(),
    })
}

/// Measurement axis on the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochAxis<T> {
    pub polar: T,
    pub azimuth: T,
}

impl<T: Real> BlochAxis<T> {
    pub fn unit_vector(&self) -> [T; 3] {
        [
            self.polar.sin() * self.azimuth.cos(),
            self.polar.sin() * self.azimuth.sin(),
            self.polar.cos(),
        ]
    }
}

/// Pair of local projective measurements, one axis per qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementPair<T> {
    pub axes: [BlochAxis<T>; 2],
}

/// Settings of the quantumness minimiser: a coarse deterministic grid
/// followed by Nelder-Mead refinement. Everything is seed-free and
/// reproducible.
#[derive(Clone, Copy, Debug)]
pub struct QuantumnessSettings {
    pub azimuthal_steps: usize,
    pub polar_steps: usize,
    pub refine_iterations: usize,
}

impl Default for QuantumnessSettings {
    fn default() -> Self {
        Self {
            azimuthal_steps: 24,
            polar_steps: 12,
            refine_iterations: 200,
        }
    }
}

/// Minimum found together with its argmin measurement pair.
#[derive(Clone, Debug)]
pub struct QuantumnessResult<T> {
    pub value: T,
    pub argmin: MeasurementPair<T>,
}

/// Fano-space projector of a local dephasing along `axis`.
fn dephasing_projector<T: Real>(axis: [T; 3]) -> [[T; 4]; 4] {
    let mut a = [[T::zero(); 4]; 4];
    a[0][0] = T::one();
    for j in 0..3 {
        for k in 0..3 {
            a[j + 1][k + 1] = axis[j] * axis[k];
        }
    }
    a
}

fn project_fano<T: Real>(r: &[[T; 4]; 4], a: &[[T; 4]; 4], b: &[[T; 4]; 4]) -> [[T; 4]; 4] {
    // a r b^T with the block structure of dephasing projectors.
    let mut ar = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let mut acc = T::zero();
            for j in 0..4 {
                acc = acc + a[i][j] * r[j][k];
            }
            ar[i][k] = acc;
        }
    }
    let mut out = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let mut acc = T::zero();
            for j in 0..4 {
                acc = acc + ar[i][j] * b[k][j];
            }
            out[i][k] = acc;
        }
    }
    out
}

/// Average halved-trace-norm disturbance of the ensemble under the local
/// dephasing fixed by `angles = (polar1, azimuth1, polar2, azimuth2)`.
fn disturbance<T: Real>(fanos: &[([[T; 4]; 4], T)], angles: [T; 4]) -> T {
    let a = dephasing_projector(
        BlochAxis {
            polar: angles[0],
            azimuth: angles[1],
        }
        .unit_vector(),
    );
    let b = dephasing_projector(
        BlochAxis {
            polar: angles[2],
            azimuth: angles[3],
        }
        .unit_vector(),
    );
    let half = T::of(0.5);
    let mut total = T::zero();
    for (r, weight) in fanos {
        let projected = project_fano(r, &a, &b);
        let mut diff = *r;
        for j in 0..4 {
            for k in 0..4 {
                diff[j][k] = diff[j][k] - projected[j][k];
            }
        }
        let matrix = from_fano_coefficients(&diff);
        total = total + *weight * half * trace_norm_hermitian_parts(&matrix);
    }
    total
}

/// Ensemble quantumness of correlations:
/// `min over P1 (x) P2 of sum_i mu_i (1/2) || rho_i - P1 (x) P2 [rho_i] ||_1`.
///
/// Zero exactly iff the states are jointly diagonal in a product basis. The
/// deterministic grid contains the coordinate axes, so classically
/// correlated ensembles evaluate to zero without refinement.
pub fn ensemble_quantumness<T: Real>(
    ensemble: &HelstromEnsemble<T>,
    settings: &QuantumnessSettings,
) -> Result<QuantumnessResult<T>> {
    if ensemble.dim() != 4 {
        return Err(Error::DimensionMismatch(
            "ensemble quantumness is defined for two-qubit states".into(),
        ));
    }
    let fanos = vec![
        (fano_coefficients(ensemble.rho().matrix())?, ensemble.bias()),
        (
            fano_coefficients(ensemble.sigma().matrix())?,
            T::one() - ensemble.bias(),
        ),
    ];

    let pi = T::of(std::f64::consts::PI);
    let tau = T::of(std::f64::consts::TAU);
    let polar_n = settings.polar_steps.max(2);
    let azim_n = settings.azimuthal_steps.max(2);
    let mut grid_axes = Vec::with_capacity((polar_n + 1) * azim_n);
    for i in 0..=polar_n {
        let polar = pi * T::of(i as f64) / T::of(polar_n as f64);
        for j in 0..azim_n {
            let azimuth = tau * T::of(j as f64) / T::of(azim_n as f64);
            grid_axes.push((polar, azimuth));
            if i == 0 || i == polar_n {
                break; // poles need a single azimuth
            }
        }
    }

    let mut best = T::infinity();
    let mut best_angles = [T::zero(); 4];
    for &(p1, a1) in &grid_axes {
        for &(p2, a2) in &grid_axes {
            let angles = [p1, a1, p2, a2];
            let value = disturbance(&fanos, angles);
            if value < best {
                best = value;
                best_angles = angles;
            }
        }
    }

    let step = pi / T::of(polar_n as f64) * T::of(0.5);
    let (value, angles) = nelder_mead(
        |angles| disturbance(&fanos, angles),
        best_angles,
        step,
        settings.refine_iterations,
    );
    let (value, angles) = if value < best {
        (value, angles)
    } else {
        (best, best_angles)
    };
    Ok(QuantumnessResult {
        value,
        argmin: MeasurementPair {
            axes: [
                BlochAxis {
                    polar: angles[0],
                    azimuth: angles[1],
                },
                BlochAxis {
                    polar: angles[2],
                    azimuth: angles[3],
                },
            ],
        },
    })
}

/// Plain Nelder-Mead on 4 parameters; deterministic given the start point.
fn nelder_mead<T: Real>(
    f: impl Fn([T; 4]) -> T,
    start: [T; 4],
    scale: T,
    iterations: usize,
) -> (T, [T; 4]) {
    let mut simplex: Vec<([T; 4], T)> = Vec::with_capacity(5);
    simplex.push((start, f(start)));
    for i in 0..4 {
        let mut v = start;
        v[i] = v[i] + scale;
        simplex.push((v, f(v)));
    }
    let (alpha, gamma, rho, sigma) = (T::one(), T::of(2.0), T::of(0.5), T::of(0.5));
    for _ in 0..iterations {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
        let best = simplex[0];
        let worst = simplex[4];
        let mut centroid = [T::zero(); 4];
        for point in &simplex[..4] {
            for i in 0..4 {
                centroid[i] = centroid[i] + point.0[i];
            }
        }
        for c in centroid.iter_mut() {
            *c = *c / T::of(4.0);
        }
        let mut reflected = [T::zero(); 4];
        for i in 0..4 {
            reflected[i] = centroid[i] + alpha * (centroid[i] - worst.0[i]);
        }
        let fr = f(reflected);
        if fr < best.1 {
            let mut expanded = [T::zero(); 4];
            for i in 0..4 {
                expanded[i] = centroid[i] + gamma * (reflected[i] - centroid[i]);
            }
            let fe = f(expanded);
            simplex[4] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[3].1 {
            simplex[4] = (reflected, fr);
            continue;
        }
        let mut contracted = [T::zero(); 4];
        for i in 0..4 {
            contracted[i] = centroid[i] + rho * (worst.0[i] - centroid[i]);
        }
        let fc = f(contracted);
        if fc < worst.1 {
            simplex[4] = (contracted, fc);
            continue;
        }
        for k in 1..5 {
            let mut v = [T::zero(); 4];
            for i in 0..4 {
                v[i] = best.0[i] + sigma * (simplex[k].0[i] - best.0[i]);
            }
            simplex[k] = (v, f(v));
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
    (simplex[0].1, simplex[0].0)
}

/// Both sides of the quantumness bound
/// `Delta D(t + tau, t) <= 2 ||L_{t+tau,t}||_diamond^2 Q(ensemble at t)`.
#[derive(Clone, Debug)]
pub struct BoundCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub diamond_norm: T,
    pub quantumness: T,
    pub holds: bool,
}

/// Optimiser slack absorbed by the bound verdict.
pub const BOUND_SLACK: f64 = 1e-6;

/// Evaluates the quantumness bound along the doubled continuous dynamics.
///
/// The minimiser only ever over-estimates the true quantumness, so `holds`
/// can fail only through a genuine violation or an optimiser failure beyond
/// the slack.
pub fn quantumness_bound_check<T: Real>(
    model: &ContinuousModel<T>,
    ensemble: &HelstromEnsemble<T>,
    t: T,
    tau: T,
    settings: &QuantumnessSettings,
) -> Result<BoundCheck<T>> {
    if ensemble.dim() != 4 {
        return Err(Error::DimensionMismatch(
            "the bound is evaluated on two-qubit ensembles".into(),
        ));
    }
    let delta = ensemble.helstrom_matrix();
    let map_now = model.map_at(t);
    let map_later = model.map_at(t + tau);
    let norm_now = trace_norm_hermitian_parts(&apply_tensor_pair(&map_now, &map_now, &delta)?);
    let norm_later =
        trace_norm_hermitian_parts(&apply_tensor_pair(&map_later, &map_later, &delta)?);
    let lhs = norm_later - norm_now;

    let step = model.intertwiner(t + tau, t)?;
    let diamond = step.diamond_norm();

    let evolved = HelstromEnsemble::new(
        ensemble.bias(),
        DensityMatrix::from_matrix(apply_tensor_pair(
            &map_now,
            &map_now,
            ensemble.rho().matrix(),
        )?)?,
        DensityMatrix::from_matrix(apply_tensor_pair(
            &map_now,
            &map_now,
            ensemble.sigma().matrix(),
        )?)?,
    )?;
    let quantumness = ensemble_quantumness(&evolved, settings)?.value;
    let rhs = T::of(2.0) * diamond * diamond * quantumness;
    Ok(BoundCheck {
        lhs,
        rhs,
        diamond_norm: diamond,
        quantumness,
        holds: lhs <= rhs + T::of(BOUND_SLACK),
    })
}

/// Pulls the isotropic state `(1-a) I/4 + a P+` back through `map^{(x) 2}`
/// and pairs it with the maximally mixed state at bias `1/(2 - a)`, so the
/// forward-evolved Helstrom matrix is exactly `a/(2-a) P+`.
pub fn preimage_isotropic_ensemble<T: Real>(
    snapshot: &PauliDiagonalMap<T>,
    a: T,
) -> Result<HelstromEnsemble<T>> {
    if a <= T::zero() || a >= T::one() {
        return Err(Error::Constraint(format!(
            "isotropic weight {a} outside (0, 1)"
        )));
    }
    let inverse = snapshot.inverse()?;
    let isotropic = ComplexMatrix::identity(4)
        .scale_real((T::one() - a) * T::of(0.25))
        .add(&symmetric_bell_projector().scale_real(a))?;
    let preimage = apply_tensor_pair(&inverse, &inverse, &isotropic)?;
    let rho = DensityMatrix::from_matrix(preimage)
        .map_err(|e| Error::Constraint(format!("preimage is not a state: {e}")))?;
    let mu = T::one() / (T::of(2.0) - a);
    HelstromEnsemble::new(mu, rho, DensityMatrix::maximally_mixed(4))
}

/// Outcome of the separable superactivation construction.
#[derive(Clone, Debug)]
pub struct SeparableConstruction<T> {
    pub ensemble: HelstromEnsemble<T>,
    /// Smallest eigenvalue of the partial transpose of the preimage state.
    pub ppt_min_eigenvalue: T,
    pub series: HelstromSeries<T>,
    /// Whether a revival occurs after the reference time.
    pub triggered: bool,
    /// Ensemble quantumness at the reference time.
    pub quantumness: T,
}

/// Separable two-qubit pair showing superactivated backflow in the
/// memoryless (`kappa = 0`, `gamma = 1`) continuous model.
///
/// Requires `0 < a <= exp(-4s)` so the preimage is a state; the preimage is
/// additionally PPT (hence separable for two qubits) for `a <= 2/27` at
/// `s = arctanh(1/2)`.
pub fn separable_sbfi_construction<T: Real>(
    a: T,
    s: T,
    t_max: T,
    step: T,
    settings: &QuantumnessSettings,
) -> Result<SeparableConstruction<T>> {
    if s <= T::zero() || !s.is_finite() {
        return Err(Error::Constraint(format!("s > 0 violated: {s}")));
    }
    let bound = (-T::of(4.0) * s).exp();
    if a <= T::zero() || a > bound {
        return Err(Error::Constraint(format!(
            "0 < a <= exp(-4s) violated: a = {a}, bound = {bound}"
        )));
    }
    if step <= T::zero() || !step.is_finite() || t_max <= s {
        return Err(Error::Constraint(
            "need step > 0 and t_max > s to look for a revival".into(),
        ));
    }
    let model = ContinuousModel::new(T::one(), T::zero())?;
    let ensemble = preimage_isotropic_ensemble(&model.map_at(s), a)?;

    let pt = partial_transpose(ensemble.rho().matrix(), true)?;
    let ppt_min = *crate::qmat::hermitian_eigenvalues(&HermitianOperator::new(pt)?)
        .last()
        .expect("4x4 spectrum");

    let steps = (t_max / step).ceil().to_f64().unwrap_or(0.0) as usize;
    let times: Vec<T> = (0..=steps).map(|k| step * T::of(k as f64)).collect();
    let series = helstrom_trajectory(
        DynamicsSource::Continuous(&model, &times),
        &ensemble,
        TensorPower::Two,
    )?;
    let triggered = series
        .times
        .iter()
        .zip(&series.differences)
        .any(|(&t, &d)| t > s && d > T::of(1e-9));

    let map_s = model.map_at(s);
    let at_reference = HelstromEnsemble::new(
        ensemble.bias(),
        DensityMatrix::from_matrix(apply_tensor_pair(&map_s, &map_s, ensemble.rho().matrix())?)?,
        DensityMatrix::maximally_mixed(4),
    )?;
    let quantumness = ensemble_quantumness(&at_reference, settings)?.value;

    Ok(SeparableConstruction {
        ensemble,
        ppt_min_eigenvalue: ppt_min,
        series,
        triggered,
        quantumness,
    })
}

/// Column-stochastic matrix for the classical no-go check.
#[derive(Clone, Debug)]
pub struct StochasticMatrix<T> {
    dim: usize,
    entries: Vec<T>,
}

impl<T: Real> StochasticMatrix<T> {
    /// Row-major entries; columns must be probability vectors.
    pub fn new(dim: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        let tol = T::tol_validate();
        for j in 0..dim {
            let mut col = T::zero();
            for i in 0..dim {
                let x = entries[i * dim + j];
                if x < -tol {
                    return Err(Error::NotStochastic(format!(
                        "negative entry {x} at ({i}, {j})"
                    )));
                }
                col = col + x;
            }
            if (col - T::one()).abs() > T::of(1e-9) {
                return Err(Error::NotStochastic(format!("column {j} sums to {col}")));
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.dim + j]
    }
}

/// Monotonicity record of the classical doubled evolution.
#[derive(Clone, Debug)]
pub struct MonotonicityReport<T> {
    pub norms: Vec<T>,
    pub non_increasing: bool,
    pub max_increase: T,
}

/// Evolves a signed vector on `d x d` by `S (x) S` for each step of a
/// stochastic family and reports the l1-norm series. P-divisible classical
/// families can never increase the norm; any rise is a test failure.
pub fn classical_no_sbfi<T: Real>(
    steps: &[StochasticMatrix<T>],
    x: &[T],
) -> Result<MonotonicityReport<T>> {
    let Some(first) = steps.first() else {
        return Err(Error::Constraint("empty stochastic family".into()));
    };
    let d = first.dim();
    if x.len() != d * d {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} does not match {d}^2",
            x.len()
        )));
    }
    let l1 = |v: &[T]| -> T { v.iter().map(|e| e.abs()).sum() };
    let mut current = x.to_vec();
    let mut norms = vec![l1(&current)];
    for step in steps {
        if step.dim() != d {
            return Err(Error::DimensionMismatch(
                "stochastic steps must share one dimension".into(),
            ));
        }
        let mut next = vec![T::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                let mut acc = T::zero();
                for k in 0..d {
                    let sik = step.get(i, k);
                    if sik.is_zero() {
                        continue;
                    }
                    for l in 0..d {
                        acc = acc + sik * step.get(j, l) * current[k * d + l];
                    }
                }
                next[i * d + j] = acc;
            }
        }
        current = next;
        norms.push(l1(&current));
    }
    let strict = T::of(1e-12);
    let mut max_increase = T::neg_infinity();
    let mut non_increasing = true;
    for w in norms.windows(2) {
        let rise = w[1] - w[0];
        max_increase = max_increase.max(rise);
        if rise > strict {
            non_increasing = false;
        }
    }
    Ok(MonotonicityReport {
        norms,
        non_increasing,
        max_increase,
    })
}
