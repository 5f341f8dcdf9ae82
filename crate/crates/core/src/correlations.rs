//! Joint system-chain states and mutual information.
//!
//! The joint state after `n` collisions is block diagonal over chain paths:
//! a weighted list of (path, conditional qubit state). Its entropy splits as
//! the path entropy plus the weighted conditional entropies, so the mutual
//! information between system and any chain window containing the collision
//! history is
//!
//! ```text
//! I(n) = S(Lambda_n[rho]) - sum_paths p(path) S(phi_path[rho]) ,
//! ```
//!
//! independent of the window size. Natural logarithms throughout.

use crate::ctime::ContinuousModel;
use crate::dynamics::{
    composite_map_for_class, symbol_class_distribution, CollisionModel, EigenvalueTrajectory,
};
use crate::env::Path;
use crate::pauli::{apply_tensor_pair, pauli_matrix, symmetric_bell_projector, PauliDiagonalMap};
use crate::qmat::{
    entropy_of_state_matrix, tensor_product, ComplexMatrix, DensityMatrix, HermitianOperator,
};
use crate::{Error, Real, Result, C};

/// One block of a classical-quantum joint state.
#[derive(Clone, Debug)]
pub struct Block<T> {
    pub path: Path<T>,
    pub conditional: DensityMatrix<T>,
}

/// Block-diagonal joint state of the qubit and a chain window: a weighted
/// list of (path, conditional state). Only nonzero-weight blocks are stored.
#[derive(Clone, Debug)]
pub struct ClassicalQuantumState<T> {
    blocks: Vec<Block<T>>,
    window: (i64, i64),
}

impl<T: Real> ClassicalQuantumState<T> {
    pub fn new(blocks: Vec<Block<T>>, window: (i64, i64)) -> Result<Self> {
        let total: T = blocks.iter().map(|b| b.path.probability).sum();
        if (total - T::one()).abs() > T::tol_validate() {
            return Err(Error::Constraint(format!(
                "block weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { blocks, window })
    }

    pub fn blocks(&self) -> &[Block<T>] {
        &self.blocks
    }

    /// Window of chain sites the blocks live on, inclusive.
    pub fn window(&self) -> (i64, i64) {
        self.window
    }

    /// Marginal state of the qubit: the weighted average of conditionals.
    pub fn system_marginal(&self) -> Result<DensityMatrix<T>> {
        let dim = self.blocks[0].conditional.dim();
        let mut acc = ComplexMatrix::zeros(dim);
        for b in &self.blocks {
            acc = acc.add(&b.conditional.matrix().scale_real(b.path.probability))?;
        }
        DensityMatrix::from_matrix(acc)
    }

    /// Entropy of the chain marginal: the path distribution is diagonal.
    pub fn chain_entropy(&self) -> T {
        self.blocks
            .iter()
            .map(|b| {
                let p = b.path.probability;
                if p > T::zero() {
                    -p * p.ln()
                } else {
                    T::zero()
                }
            })
            .sum()
    }

    /// Joint entropy through block orthogonality:
    /// `H(paths) + sum_p p S(conditional)`.
    pub fn joint_entropy(&self) -> Result<T> {
        let mut s = self.chain_entropy();
        for b in &self.blocks {
            s = s + b.path.probability * entropy_of_state_matrix(b.conditional.matrix())?;
        }
        Ok(s)
    }

    /// Mutual information between qubit and window.
    pub fn mutual_information(&self) -> Result<T> {
        let marginal = self.system_marginal()?;
        let s_sys = entropy_of_state_matrix(marginal.matrix())?;
        let mut conditional = T::zero();
        for b in &self.blocks {
            conditional =
                conditional + b.path.probability * entropy_of_state_matrix(b.conditional.matrix())?;
        }
        Ok(s_sys - conditional)
    }
}

/// Joint state of qubit and the window `[-a, b]` after `n` collisions.
///
/// The stored window grows to `[-n+1, b]` once the history outruns `a`; the
/// conditional of a path applies the collision maps sitting on sites
/// `-n+1 ..= 0`. Path length is capped at 12 unless `prune_below` is
/// positive.
pub fn evolve_joint_state<T: Real>(
    model: &CollisionModel<T>,
    rho: &DensityMatrix<T>,
    n: usize,
    a: usize,
    b: usize,
    prune_below: T,
) -> Result<ClassicalQuantumState<T>> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(
            "joint evolution acts on a single qubit".into(),
        ));
    }
    let lo: i64 = -(a.max(n.saturating_sub(1)) as i64);
    let hi: i64 = b as i64;
    let len = (hi - lo + 1) as usize;
    let enumeration = model.env().enumerate_paths(len, prune_below)?;
    let op = HermitianOperator::new(rho.matrix().clone())?;
    let mut blocks = Vec::with_capacity(enumeration.paths.len());
    for path in enumeration.paths {
        // Sites -n+1 ..= 0 hold the collision history.
        let mut composite = PauliDiagonalMap::identity();
        if n > 0 {
            for site in (-(n as i64 - 1))..=0 {
                let k = path.symbols[(site - lo) as usize];
                composite = composite.compose(&model.collision_map(k as usize));
            }
        }
        let evolved = composite.apply(&op)?;
        blocks.push(Block {
            conditional: DensityMatrix::new(evolved)?,
            path,
        });
    }
    ClassicalQuantumState::new(blocks, (lo, hi))
}

/// Average reduced map after `n` collisions, summed over symbol classes.
fn class_average_map<T: Real>(model: &CollisionModel<T>, n: usize) -> PauliDiagonalMap<T> {
    let mut lam = [T::zero(); 4];
    for (counts, prob) in symbol_class_distribution(model.env(), n) {
        let map = composite_map_for_class(model.varphi(), counts);
        for j in 0..4 {
            lam[j] = lam[j] + prob * map.eigenvalue(j);
        }
    }
    PauliDiagonalMap::new(lam).expect("finite eigenvalues")
}

/// Qubit-chain mutual information after `n` collisions,
/// `S(Lambda_n[rho]) - sum p S(phi_path[rho])`, window independent.
pub fn mutual_information_discrete<T: Real>(
    model: &CollisionModel<T>,
    rho: &DensityMatrix<T>,
    n: usize,
) -> Result<T> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(
            "single-qubit mutual information needs a 2x2 state".into(),
        ));
    }
    if n == 0 {
        return Ok(T::zero());
    }
    let op = HermitianOperator::new(rho.matrix().clone())?;
    let classes = symbol_class_distribution(model.env(), n);
    let average = class_average_map(model, n);
    let s_avg = entropy_of_state_matrix(average.apply(&op)?.matrix())?;
    let mut s_cond = T::zero();
    for (counts, prob) in classes {
        let map = composite_map_for_class(model.varphi(), counts);
        s_cond = s_cond + prob * entropy_of_state_matrix(map.apply(&op)?.matrix())?;
    }
    Ok(s_avg - s_cond)
}

/// Symbol classes grouped by their composite map: distinct counts often
/// share one eigenvalue tuple (always, up to four maps, for the unitary
/// coupling), which keeps the pair sum below quadratic blowup.
fn grouped_class_maps<T: Real>(
    model: &CollisionModel<T>,
    n: usize,
) -> Vec<(PauliDiagonalMap<T>, T)> {
    let mut keyed: std::collections::BTreeMap<[u64; 3], (PauliDiagonalMap<T>, T)> =
        std::collections::BTreeMap::new();
    for (counts, prob) in symbol_class_distribution(model.env(), n) {
        let map = composite_map_for_class(model.varphi(), counts);
        let lam = map.eigenvalues();
        let key = [
            lam[1].to_f64().unwrap_or(f64::NAN).to_bits(),
            lam[2].to_f64().unwrap_or(f64::NAN).to_bits(),
            lam[3].to_f64().unwrap_or(f64::NAN).to_bits(),
        ];
        keyed
            .entry(key)
            .and_modify(|(_, weight)| *weight = *weight + prob)
            .or_insert((map, prob));
    }
    keyed.into_values().collect()
}

/// Two-qubit-chain mutual information: both qubits ride independent,
/// identically distributed chains, so the conditional sum runs over pairs of
/// symbol classes.
pub fn mutual_information_two_qubits_discrete<T: Real>(
    model: &CollisionModel<T>,
    rho: &DensityMatrix<T>,
    n: usize,
) -> Result<T> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(
            "two-qubit mutual information needs a 4x4 state".into(),
        ));
    }
    if n == 0 {
        return Ok(T::zero());
    }
    let average = class_average_map(model, n);
    let joint = apply_tensor_pair(&average, &average, rho.matrix())?;
    let s_joint = entropy_of_state_matrix(&joint)?;
    let maps = grouped_class_maps(model, n);
    // Generic couplings keep one map per symbol class; refuse horizons where
    // the pair sum would explode.
    if maps.len() > 1_000 {
        return Err(Error::PathBlowup {
            paths: (maps.len() as u128).pow(2),
        });
    }
    let mut s_cond = T::zero();
    for (map_a, prob_a) in &maps {
        for (map_b, prob_b) in &maps {
            let weight = *prob_a * *prob_b;
            if weight <= T::zero() {
                continue;
            }
            let evolved = apply_tensor_pair(map_a, map_b, rho.matrix())?;
            s_cond = s_cond + weight * entropy_of_state_matrix(&evolved)?;
        }
    }
    Ok(s_joint - s_cond)
}

/// Evolved symmetric Bell projector in the saturated family
/// (`r = 0`, `delta = (1-2p)/2`, `p = 1/4 + epsilon`):
///
/// ```text
/// (1/4) [ I + lam_n^2 (s1(x)s1 - s2(x)s2) + (lam3_n)^2 s3(x)s3 ]
/// ```
pub fn evolved_symmetric_projector<T: Real>(epsilon: T, n: usize) -> Result<DensityMatrix<T>> {
    let params = crate::dynamics::saturated_params(epsilon)?;
    let (lam, lam3) = crate::dynamics::eigenvalues_unitary_closed_form(&params, n)?;
    let map = PauliDiagonalMap::new([T::one(), lam, lam, lam3])?;
    let evolved = apply_tensor_pair(&map, &map, &symmetric_bell_projector())?;
    DensityMatrix::from_matrix(evolved)
}

/// Parameters of the X-shaped two-qubit family
///
/// ```text
/// [ mu1  .    .    u   ]
/// [ .    nu   v    .   ]
/// [ .    v*   1-s  .   ]        s = mu1 + mu2 + nu
/// [ u*   .    .    mu2 ]
/// ```
#[derive(Clone, Copy, Debug)]
pub struct XStateParams<T> {
    pub mu1: T,
    pub mu2: T,
    pub nu: T,
    pub u: C<T>,
    pub v: C<T>,
}

/// Product basis the X shape refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XStateBasis {
    /// Eigenbasis of `s1 (x) s1`; the matrix is conjugated back to the
    /// computational basis with `V (x) V`, `V = (s1 + s3)/sqrt(2)`.
    SigmaXPair,
    Computational,
}

impl<T: Real> XStateParams<T> {
    /// Validates the positivity bounds, naming the first violated one.
    pub fn validate(&self) -> Result<()> {
        let tol = T::tol_validate();
        if self.mu1 < -tol || self.mu1 > T::one() + tol {
            return Err(Error::Constraint(format!(
                "0 <= mu1 <= 1 violated: mu1 = {}",
                self.mu1
            )));
        }
        if self.mu2 < -tol || self.mu2 > T::one() + tol {
            return Err(Error::Constraint(format!(
                "0 <= mu2 <= 1 violated: mu2 = {}",
                self.mu2
            )));
        }
        let rest = T::one() - self.mu1 - self.mu2;
        if self.nu < -tol || self.nu > rest + tol {
            return Err(Error::Constraint(format!(
                "0 <= nu <= 1 - (mu1 + mu2) violated: nu = {}, bound = {rest}",
                self.nu
            )));
        }
        let u_bound = (self.mu1 * self.mu2).max(T::zero()).sqrt();
        if self.u.norm() > u_bound + tol {
            return Err(Error::Constraint(format!(
                "|u| <= sqrt(mu1 mu2) violated: |u| = {}, bound = {u_bound}",
                self.u.norm()
            )));
        }
        let v_bound = (self.nu * (rest - self.nu)).max(T::zero()).sqrt();
        if self.v.norm() > v_bound + tol {
            return Err(Error::Constraint(format!(
                "|v| <= sqrt(nu (1 - mu1 - mu2 - nu)) violated: |v| = {}, bound = {v_bound}",
                self.v.norm()
            )));
        }
        Ok(())
    }
}

/// Builds the X-shaped density matrix in the requested basis.
pub fn x_state<T: Real>(params: &XStateParams<T>, basis: XStateBasis) -> Result<DensityMatrix<T>> {
    params.validate()?;
    let o = T::zero();
    let zero = C::new(o, o);
    let re = |x: T| C::new(x, o);
    let last = T::one() - params.mu1 - params.mu2 - params.nu;
    let mut m = ComplexMatrix::new(
        4,
        vec![
            re(params.mu1),
            zero,
            zero,
            params.u,
            zero,
            re(params.nu),
            params.v,
            zero,
            zero,
            params.v.conj(),
            re(last),
            zero,
            params.u.conj(),
            zero,
            zero,
            re(params.mu2),
        ],
    )?;
    if basis == XStateBasis::SigmaXPair {
        let inv_sqrt2 = T::one() / T::of(2.0).sqrt();
        let v2 = pauli_matrix::<T>(1)
            .add(&pauli_matrix(3))?
            .scale_real(inv_sqrt2);
        let vv = tensor_product(&v2, &v2)?;
        m = vv.matmul(&m)?.matmul(&vv)?;
    }
    DensityMatrix::from_matrix(m)
}

/// The two surviving single-branch semigroups of the two-branch chain in
/// continuous time: `phi_1(t)` fixes `s1`, `phi_2(t)` fixes `s2`, both damp
/// everything else by `exp(-2 gamma t)`.
pub fn branch_maps<T: Real>(model: &ContinuousModel<T>, t: T) -> [PauliDiagonalMap<T>; 2] {
    let beta = (-T::of(2.0) * model.gamma() * t).exp();
    [
        PauliDiagonalMap::new([T::one(), T::one(), beta, beta]).expect("finite"),
        PauliDiagonalMap::new([T::one(), beta, T::one(), beta]).expect("finite"),
    ]
}

/// Two-qubit-chain mutual information in the continuous-time limit of the
/// two-branch chain (`kappa = 0`):
///
/// ```text
/// I(t) = S(Lam_t (x) Lam_t [rho])
///        - (1/4) sum_{i,j in {1,2}} S(phi_i(t) (x) phi_j(t) [rho]) .
/// ```
pub fn mutual_information_continuous<T: Real>(
    model: &ContinuousModel<T>,
    rho: &DensityMatrix<T>,
    t: T,
) -> Result<T> {
    if model.kappa() != T::zero() {
        return Err(Error::UnsupportedRegime(
            "continuous-time mutual information requires kappa = 0 (the two-branch chain)".into(),
        ));
    }
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(
            "two-qubit mutual information needs a 4x4 state".into(),
        ));
    }
    let lam = model.map_at(t);
    let joint = apply_tensor_pair(&lam, &lam, rho.matrix())?;
    let s_joint = entropy_of_state_matrix(&joint)?;
    let branches = branch_maps(model, t);
    let quarter = T::of(0.25);
    let mut s_cond = T::zero();
    for a in &branches {
        for b in &branches {
            let evolved = apply_tensor_pair(a, b, rho.matrix())?;
            s_cond = s_cond + quarter * entropy_of_state_matrix(&evolved)?;
        }
    }
    Ok(s_joint - s_cond)
}

/// Discrete-time mutual-information difference `I(n) - I(m)` of a two-qubit
/// state; for the unitary coupling this is a pure entropy difference.
pub fn two_qubit_information_difference<T: Real>(
    traj: &EigenvalueTrajectory<T>,
    rho: &DensityMatrix<T>,
    n: usize,
    m: usize,
) -> Result<T> {
    let at = |k: usize| -> Result<T> {
        let map = traj.map_at(k);
        let evolved = apply_tensor_pair(&map, &map, rho.matrix())?;
        entropy_of_state_matrix(&evolved)
    };
    Ok(at(n)? - at(m)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctime::ContinuousModel;
    use crate::dynamics::{saturated_params, unitary_trajectory};
    use crate::env::{build_chain, ChainParams};
    use crate::qmat::{partial_trace, von_neumann_entropy};
    use crate::C64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unitary_model(p0: f64, p: f64, r: f64, delta: f64) -> CollisionModel<f64> {
        CollisionModel::unitary(build_chain(ChainParams::new(p0, p, r, delta).unwrap()).unwrap())
    }

    fn random_qubit_state(rng: &mut impl Rng) -> DensityMatrix<f64> {
        loop {
            let (x, y, z) = (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            if x * x + y * y + z * z >= 1.0 {
                continue;
            }
            let mut m = ComplexMatrix::zeros(2);
            m.set(0, 0, C64::new(0.5 * (1.0 + z), 0.0));
            m.set(1, 1, C64::new(0.5 * (1.0 - z), 0.0));
            m.set(0, 1, C64::new(0.5 * x, -0.5 * y));
            m.set(1, 0, C64::new(0.5 * x, 0.5 * y));
            return DensityMatrix::from_matrix(m).unwrap();
        }
    }

    #[test]
    fn no_collisions_no_correlations() {
        let model = unitary_model(0.2, 0.3, 0.2, 0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let rho = random_qubit_state(&mut rng);
        let joint = evolve_joint_state(&model, &rho, 0, 1, 1, 0.0).unwrap();
        assert!(joint.mutual_information().unwrap().abs() < 1e-13);
        for block in joint.blocks() {
            assert!(block.conditional.matrix().max_abs_diff(rho.matrix()) < 1e-14);
        }
    }

    #[test]
    fn maximally_mixed_qubit_stays_uncorrelated() {
        let model = unitary_model(0.2, 0.3, 0.2, 0.1);
        let rho = DensityMatrix::maximally_mixed(2);
        for n in 0..=4 {
            let joint = evolve_joint_state(&model, &rho, n, 1, 1, 0.0).unwrap();
            assert!(joint.mutual_information().unwrap().abs() < 1e-12);
            assert!(mutual_information_discrete(&model, &rho, n).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn chain_marginal_matches_stationary_window() {
        let model = unitary_model(0.1, 0.35, 0.2, 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let rho = random_qubit_state(&mut rng);
        let joint = evolve_joint_state(&model, &rho, 2, 1, 2, 0.0).unwrap();
        // Weights reproduce the stationary window law.
        let env = model.env();
        for block in joint.blocks() {
            let expect = env.path_probability(&block.path.symbols).unwrap();
            assert!((block.path.probability - expect).abs() < 1e-14);
        }
        let total: f64 = joint.blocks().iter().map(|b| b.path.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn system_marginal_is_the_reduced_dynamics() {
        let model = unitary_model(0.1, 0.35, 0.2, 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let rho = random_qubit_state(&mut rng);
        for n in 0..=3 {
            let joint = evolve_joint_state(&model, &rho, n, 2, 1, 0.0).unwrap();
            let marginal = joint.system_marginal().unwrap();
            let map = crate::dynamics::reduced_map_bruteforce(&model, n).unwrap();
            let expect = map
                .apply(&HermitianOperator::new(rho.matrix().clone()).unwrap())
                .unwrap();
            assert!(marginal.matrix().max_abs_diff(expect.matrix()) < 1e-12);
        }
    }

    #[test]
    fn window_independence_of_mutual_information() {
        let model = unitary_model(0.1, 0.35, 0.2, 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let rho = random_qubit_state(&mut rng);
        for n in 0..=3usize {
            let reference = mutual_information_discrete(&model, &rho, n).unwrap();
            for a in 0..=3usize {
                for b in 0..=3usize {
                    if (a.max(n.saturating_sub(1)) + b + 1) > 9 {
                        continue;
                    }
                    let joint = evolve_joint_state(&model, &rho, n, a, b, 0.0).unwrap();
                    let value = joint.mutual_information().unwrap();
                    assert!(value >= -1e-12);
                    assert!(
                        (value - reference).abs() < 1e-12,
                        "n={n} a={a} b={b}: {value} vs {reference}"
                    );
                }
            }
        }
    }

    #[test]
    fn mutual_information_matches_full_matrix_route() {
        // Embed the n = 1, single-site window state in an 8-dimensional
        // matrix and evaluate all three entropies spectrally.
        let model = unitary_model(0.1, 0.35, 0.2, 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        let rho = random_qubit_state(&mut rng);
        let joint = evolve_joint_state(&model, &rho, 1, 0, 0, 0.0).unwrap();

        let mut big = ComplexMatrix::zeros(8);
        for (k, block) in joint.blocks().iter().enumerate() {
            let sym = block.path.symbols[0] as usize;
            assert_eq!(sym, k);
            for i in 0..2 {
                for j in 0..2 {
                    // System factor first, chain site second: index i*4 + sym.
                    big.set(
                        i * 4 + sym,
                        j * 4 + sym,
                        block.conditional.matrix().get(i, j)
                            * C64::new(block.path.probability, 0.0),
                    );
                }
            }
        }
        let joint_dm = DensityMatrix::from_matrix(big.clone()).unwrap();
        let sys = DensityMatrix::from_matrix(partial_trace(&big, &[2, 4], 1).unwrap()).unwrap();
        let chain = DensityMatrix::from_matrix(partial_trace(&big, &[2, 4], 0).unwrap()).unwrap();
        let direct = von_neumann_entropy(&sys) + von_neumann_entropy(&chain)
            - von_neumann_entropy(&joint_dm);
        let blockwise = joint.mutual_information().unwrap();
        let formula = mutual_information_discrete(&model, &rho, 1).unwrap();
        assert!((direct - blockwise).abs() < 1e-10);
        assert!((direct - formula).abs() < 1e-10);
    }

    #[test]
    fn unitary_collisions_reduce_to_entropy_difference() {
        let model = unitary_model(0.1, 0.35, 0.2, 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        let rho = random_qubit_state(&mut rng);
        let op = HermitianOperator::new(rho.matrix().clone()).unwrap();
        for n in 1..=4 {
            let i = mutual_information_discrete(&model, &rho, n).unwrap();
            let map = crate::dynamics::reduced_map_bruteforce(&model, n).unwrap();
            let evolved = map.apply(&op).unwrap();
            let expect =
                entropy_of_state_matrix(evolved.matrix()).unwrap() - von_neumann_entropy(&rho);
            assert!((i - expect).abs() < 1e-11);
        }
    }

    #[test]
    fn information_grows_under_p_divisible_unitary_dynamics() {
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        for _ in 0..5 {
            let p = rng.gen_range(0.05..0.45);
            let r: f64 = rng.gen_range(0.0..(0.5 - p) * 0.9);
            let alpha = 1.0 - 2.0 * (p + r);
            // Stay within the P-divisible region.
            let delta = (r * alpha / (2.0 * p) + alpha / 2.0).min(p) * 0.9;
            let model = unitary_model(1.0 - 2.0 * p - r, p, r, delta);
            let rho = random_qubit_state(&mut rng);
            let mut last = 0.0;
            for n in 1..=6 {
                let i = mutual_information_discrete(&model, &rho, n).unwrap();
                assert!(i >= last - 1e-12, "n={n}: {i} < {last}");
                last = i;
            }
        }
    }

    /// Two-branch chain with a dissipative coupling: the information is a
    /// two-component average over the surviving constant symbol sequences.
    #[test]
    fn two_branch_chain_reduces_to_two_component_average() {
        let env = build_chain(ChainParams::new(0.0, 0.5, 0.0, 0.5).unwrap()).unwrap();
        let model = CollisionModel::new(env, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let rho = random_qubit_state(&mut rng);
        let op = HermitianOperator::new(rho.matrix().clone()).unwrap();
        for n in 1..=6 {
            let phi = 0.5f64.powi(n as i32);
            let branch1 = PauliDiagonalMap::new([1.0, 1.0, phi, phi]).unwrap();
            let branch2 = PauliDiagonalMap::new([1.0, phi, 1.0, phi]).unwrap();
            let avg =
                PauliDiagonalMap::new([1.0, (1.0 + phi) / 2.0, (1.0 + phi) / 2.0, phi]).unwrap();
            let expect = entropy_of_state_matrix(avg.apply(&op).unwrap().matrix()).unwrap()
                - 0.5 * entropy_of_state_matrix(branch1.apply(&op).unwrap().matrix()).unwrap()
                - 0.5 * entropy_of_state_matrix(branch2.apply(&op).unwrap().matrix()).unwrap();
            let got = mutual_information_discrete(&model, &rho, n).unwrap();
            assert!((got - expect).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn product_states_double_the_single_qubit_information() {
        let model = unitary_model(0.1, 0.35, 0.2, 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        let rho = random_qubit_state(&mut rng);
        let pair = DensityMatrix::from_matrix(tensor_product(rho.matrix(), rho.matrix()).unwrap())
            .unwrap();
        for n in 1..=3 {
            let single = mutual_information_discrete(&model, &rho, n).unwrap();
            let double = mutual_information_two_qubits_discrete(&model, &pair, n).unwrap();
            assert!(
                (double - 2.0 * single).abs() < 1e-10,
                "n={n}: {double} vs {}",
                2.0 * single
            );
        }
    }

    #[test]
    fn two_qubit_information_vanishes_initially() {
        let model = unitary_model(0.1, 0.35, 0.2, 0.3);
        let rho = DensityMatrix::from_matrix(symmetric_bell_projector()).unwrap();
        assert_eq!(
            mutual_information_two_qubits_discrete(&model, &rho, 0).unwrap(),
            0.0
        );
    }

    #[test]
    fn maximally_mixed_marginals_leave_single_qubits_uncorrelated() {
        // Both the Bell projector and the X family used here have maximally
        // mixed marginals; each half alone never correlates with its chain.
        let model = unitary_model(0.1, 0.35, 0.2, 0.3);
        let bell = DensityMatrix::from_matrix(symmetric_bell_projector()).unwrap();
        let half =
            DensityMatrix::from_matrix(partial_trace(bell.matrix(), &[2, 2], 1).unwrap()).unwrap();
        for n in 0..=4 {
            assert!(mutual_information_discrete(&model, &half, n).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn evolved_projector_matches_printed_entries() {
        let eps = 0.01f64;
        let step1 = evolved_symmetric_projector(eps, 1).unwrap();
        let corner = (1.0 - 4.0 * eps) * (1.0 - 4.0 * eps) / 8.0;
        assert!((step1.matrix().get(0, 0).re - (0.25 + 4.0 * eps * eps)).abs() < 1e-14);
        assert!((step1.matrix().get(1, 1).re - (0.25 - 4.0 * eps * eps)).abs() < 1e-14);
        assert!((step1.matrix().get(0, 3).re - corner).abs() < 1e-14);
        let step2 = evolved_symmetric_projector(eps, 2).unwrap();
        assert!((step2.matrix().get(0, 0).re - (0.25 + 64.0 * eps.powi(4))).abs() < 1e-14);
        assert!((step2.matrix().get(0, 3).re - corner).abs() < 1e-14);
    }

    #[test]
    fn evolved_projector_at_zero_perturbation() {
        let state = evolved_symmetric_projector(0.0f64, 1).unwrap();
        assert!((state.matrix().get(0, 0).re - 0.25).abs() < 1e-15);
        assert!((state.matrix().get(0, 3).re - 0.125).abs() < 1e-15);
    }

    #[test]
    fn evolved_projector_agrees_with_trajectory_evolution() {
        let eps = 0.01f64;
        let params = saturated_params(eps).unwrap();
        let traj = unitary_trajectory(&params, 2).unwrap();
        for n in 1..=2 {
            let direct = evolved_symmetric_projector(eps, n).unwrap();
            let map = traj.map_at(n);
            let evolved = apply_tensor_pair(&map, &map, &symmetric_bell_projector()).unwrap();
            assert!(direct.matrix().max_abs_diff(&evolved) < 1e-13);
        }
    }

    #[test]
    fn x_state_uniform_parameters_give_maximally_mixed() {
        let params = XStateParams {
            mu1: 0.25,
            mu2: 0.25,
            nu: 0.25,
            u: C64::new(0.0, 0.0),
            v: C64::new(0.0, 0.0),
        };
        for basis in [XStateBasis::Computational, XStateBasis::SigmaXPair] {
            let state = x_state(&params, basis).unwrap();
            assert!(
                state
                    .matrix()
                    .max_abs_diff(&ComplexMatrix::identity(4).scale_real(0.25))
                    < 1e-14
            );
        }
    }

    #[test]
    fn x_state_violations_name_the_bound() {
        let params = XStateParams {
            mu1: 0.25,
            mu2: 0.25,
            nu: 0.25,
            u: C64::new(0.4, 0.0),
            v: C64::new(0.0, 0.0),
        };
        let err = x_state(&params, XStateBasis::Computational).unwrap_err();
        assert!(err.to_string().contains("sqrt(mu1 mu2)"));
        let params = XStateParams {
            mu1: 0.5,
            mu2: 0.5,
            nu: 0.1,
            u: C64::new(0.0, 0.0),
            v: C64::new(0.0, 0.0),
        };
        let err = x_state(&params, XStateBasis::Computational).unwrap_err();
        assert!(err.to_string().contains("nu"));
    }

    /// The conjugated X state matches its Pauli (Fano) expansion.
    #[test]
    fn x_state_fano_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..10 {
            let mu1: f64 = rng.gen_range(0.0..0.5);
            let mu2 = rng.gen_range(0.0..0.5);
            let nu = rng.gen_range(0.0..(1.0 - mu1 - mu2));
            let u_mag = rng.gen_range(0.0..(mu1 * mu2).sqrt());
            let v_mag = rng.gen_range(0.0..(nu * (1.0 - mu1 - mu2 - nu)).sqrt());
            let (a1, a2) = (
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
            let params = XStateParams {
                mu1,
                mu2,
                nu,
                u: C64::from_polar(u_mag, a1),
                v: C64::from_polar(v_mag, a2),
            };
            let state = x_state(&params, XStateBasis::SigmaXPair).unwrap();

            let s = |j: usize| pauli_matrix::<f64>(j);
            let tp = |a: &ComplexMatrix<f64>, b: &ComplexMatrix<f64>| tensor_product(a, b).unwrap();
            let u = params.u;
            let v = params.v;
            let mut expect = ComplexMatrix::identity(4);
            expect = expect
                .add(&tp(&s(1), &s(0)).scale_real(-(1.0 - 2.0 * (mu1 + nu))))
                .unwrap();
            expect = expect
                .add(&tp(&s(0), &s(1)).scale_real(1.0 - 2.0 * (mu2 + nu)))
                .unwrap();
            expect = expect
                .add(&tp(&s(1), &s(1)).scale_real(-(1.0 - 2.0 * (mu1 + mu2))))
                .unwrap();
            expect = expect
                .add(&tp(&s(2), &s(2)).scale_real(-2.0 * (u - v).re))
                .unwrap();
            expect = expect
                .add(&tp(&s(3), &s(3)).scale_real(2.0 * (u + v).re))
                .unwrap();
            expect = expect
                .add(&tp(&s(2), &s(3)).scale_real(2.0 * (u + v).im))
                .unwrap();
            expect = expect
                .add(&tp(&s(3), &s(2)).scale_real(2.0 * (u - v).im))
                .unwrap();
            let expect = expect.scale_real(0.25);
            assert!(state.matrix().max_abs_diff(&expect) < 1e-13);
        }
    }

    fn fig_state(u: f64) -> DensityMatrix<f64> {
        x_state(
            &XStateParams {
                mu1: 0.25,
                mu2: 0.25,
                nu: 0.25,
                u: C64::new(u, 0.0),
                v: C64::new(0.0, 0.125),
            },
            XStateBasis::SigmaXPair,
        )
        .unwrap()
    }

    #[test]
    fn continuous_information_starts_at_zero() {
        let model = ContinuousModel::new(1.0, 0.0).unwrap();
        let rho = fig_state(0.001);
        assert!(
            mutual_information_continuous(&model, &rho, 0.0)
                .unwrap()
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn continuous_information_decays_at_long_times() {
        let model = ContinuousModel::new(1.0, 0.0).unwrap();
        let rho = fig_state(0.001);
        let late = mutual_information_continuous(&model, &rho, 20.0).unwrap();
        assert!(late.abs() < 1e-6, "late-time value {late}");
    }

    #[test]
    fn continuous_information_rises_then_falls() {
        let model = ContinuousModel::new(1.0, 0.0).unwrap();
        let rho = fig_state(0.001);
        let series: Vec<f64> = (0..=600)
            .map(|k| mutual_information_continuous(&model, &rho, 0.01 * k as f64).unwrap())
            .collect();
        let peak = series
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!(peak > 0 && peak < 600, "peak at sample {peak}");
        assert!(series[peak] > series[0] + 1e-6);
        assert!(series[peak] > series[600] + 1e-6);
    }

    #[test]
    fn continuous_information_requires_two_branch_chain() {
        let model = ContinuousModel::new(1.0, 0.5).unwrap();
        let rho = fig_state(0.001);
        assert!(matches!(
            mutual_information_continuous(&model, &rho, 1.0),
            Err(Error::UnsupportedRegime(_))
        ));
    }

    /// Fano-coefficient evolution agrees with direct integration of the
    /// two-sided master equation for the branch pairs.
    #[test]
    fn branch_evolution_matches_generator_integration() {
        let model = ContinuousModel::new(1.0, 0.0).unwrap();
        let rho = fig_state(0.05);
        for (bi, bj) in [(0usize, 0usize), (0, 1), (1, 0)] {
            for t in [0.3, 0.9, 1.7] {
                let maps = branch_maps(&model, t);
                let fano = apply_tensor_pair(&maps[bi], &maps[bj], rho.matrix()).unwrap();

                // RK4 on d rho/dt = sum of two one-sided dissipators.
                let si = tensor_product(&pauli_matrix::<f64>(bi + 1), &ComplexMatrix::identity(2))
                    .unwrap();
                let sj = tensor_product(&ComplexMatrix::identity(2), &pauli_matrix::<f64>(bj + 1))
                    .unwrap();
                let rhs = |m: &ComplexMatrix<f64>| {
                    let a = si.matmul(m).unwrap().matmul(&si).unwrap().sub(m).unwrap();
                    let b = sj.matmul(m).unwrap().matmul(&sj).unwrap().sub(m).unwrap();
                    a.add(&b).unwrap()
                };
                let steps = 2000usize;
                let h = t / steps as f64;
                let mut state = rho.matrix().clone();
                for _ in 0..steps {
                    let k1 = rhs(&state);
                    let k2 = rhs(&state.add(&k1.scale_real(h / 2.0)).unwrap());
                    let k3 = rhs(&state.add(&k2.scale_real(h / 2.0)).unwrap());
                    let k4 = rhs(&state.add(&k3.scale_real(h)).unwrap());
                    let incr = k1
                        .add(&k2.scale_real(2.0))
                        .unwrap()
                        .add(&k3.scale_real(2.0))
                        .unwrap()
                        .add(&k4)
                        .unwrap()
                        .scale_real(h / 6.0);
                    state = state.add(&incr).unwrap();
                }
                assert!(
                    fano.max_abs_diff(&state) < 1e-9,
                    "branch ({bi},{bj}) at t = {t}"
                );
            }
        }
    }
}
