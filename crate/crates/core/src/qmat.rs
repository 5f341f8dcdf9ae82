//! Dense complex-matrix kernel for Hilbert-space dimensions up to 16.
//!
//! Provides the spectral machinery the rest of the crate is built on:
//! Hermitian eigenvalues via cyclic Jacobi rotations, trace norms, von
//! Neumann entropies, Kronecker products and partial trace/transpose.
//!
//! Composite indices are row-major throughout: the basis vector of a
//! bipartite system with local indices `(i_a, i_b)` sits at `i_a * dim_b + i_b`.
//! All operations are pure functions of their inputs.

use crate::{Error, Real, Result, C};

/// Largest supported Hilbert-space dimension.
pub const MAX_DIM: usize = 16;

/// Dense square complex matrix, row-major storage.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    entries: Vec<C<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    /// Builds a matrix from row-major entries; `entries.len()` must be `dim * dim`.
    pub fn new(dim: usize, entries: Vec<C<T>>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::DimensionTooLarge {
                got: dim,
                max: MAX_DIM,
            });
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self { dim, entries })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        let data = entries
            .iter()
            .map(|&x| C::new(T::of(x), T::zero()))
            .collect();
        Self::new(dim, data)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![C::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = C::new(T::one(), T::zero());
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: C<T>) {
        self.entries[i * self.dim + j] = z;
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j];
            }
        }
        out
    }

    pub fn trace(&self) -> C<T> {
        let mut t = C::new(T::zero(), T::zero());
        for i in 0..self.dim {
            t = t + self.entries[i * self.dim + i];
        }
        t
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| *a + *b)
            .collect();
        Ok(Self {
            dim: self.dim,
            entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| *a - *b)
            .collect();
        Ok(Self {
            dim: self.dim,
            entries,
        })
    }

    pub fn scale(&self, factor: C<T>) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| *z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: T) -> Self {
        self.scale(C::new(factor, T::zero()))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a.re.is_zero() && a.im.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] = out.entries[i * n + j] + a * other.entries[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// Largest entry-wise deviation from the adjoint.
    pub fn hermiticity_deviation(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let d = (self.entries[i * n + j] - self.entries[j * n + i].conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Largest entry-wise deviation between two matrices.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |acc, x| acc + x)
            .sqrt()
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.dim, self.dim, other.dim, other.dim
            )));
        }
        Ok(())
    }
}

impl<T: std::fmt::Debug> std::fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = &self.entries[i * self.dim + j];
                write!(f, "{:?}+{:?}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Hermitian operator: validated wrapper around [`ComplexMatrix`].
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator<T> {
    mat: ComplexMatrix<T>,
}

impl<T: Real> HermitianOperator<T> {
    /// Validates Hermiticity in the max-entry metric.
    pub fn new(mat: ComplexMatrix<T>) -> Result<Self> {
        let dev = mat.hermiticity_deviation();
        if dev > T::tol_validate() {
            return Err(Error::NotHermitian {
                deviation: dev.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { mat })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real(dim, entries)?)
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn trace(&self) -> T {
        self.mat.trace().re
    }

    /// Real spectrum in descending order.
    pub fn eigenvalues(&self) -> Vec<T> {
        jacobi_eigenvalues(&self.mat)
    }
}

/// Density matrix: unit-trace positive-semidefinite Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    op: HermitianOperator<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(op: HermitianOperator<T>) -> Result<Self> {
        let tr = op.trace();
        if (tr - T::one()).abs() > T::tol_validate() {
            return Err(Error::NotDensity(format!(
                "trace = {tr}, expected 1 within {}",
                T::tol_validate()
            )));
        }
        let evs = op.eigenvalues();
        if let Some(&min) = evs.last() {
            if min < -T::tol_negativity() {
                return Err(Error::NotDensity(format!(
                    "smallest eigenvalue {min} below -{}",
                    T::tol_negativity()
                )));
            }
        }
        Ok(Self { op })
    }

    pub fn from_matrix(mat: ComplexMatrix<T>) -> Result<Self> {
        Self::new(HermitianOperator::new(mat)?)
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::from_matrix(ComplexMatrix::from_real(dim, entries)?)
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let m = ComplexMatrix::identity(dim).scale_real(T::one() / T::of(dim as f64));
        Self {
            op: HermitianOperator { mat: m },
        }
    }

    /// Projector onto a computational basis vector.
    pub fn basis_projector(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut m = ComplexMatrix::zeros(dim);
        m.set(index, index, C::new(T::one(), T::zero()));
        Ok(Self {
            op: HermitianOperator { mat: m },
        })
    }

    pub fn operator(&self) -> &HermitianOperator<T> {
        &self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        self.op.matrix()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        self.op.eigenvalues()
    }
}

/// Kronecker product with row-major composite indices `(i_a, i_b) -> i_a * dim_b + i_b`.
pub fn tensor_product<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    let (da, db) = (a.dim(), b.dim());
    let dim = da * db;
    if dim > MAX_DIM {
        return Err(Error::DimensionTooLarge {
            got: dim,
            max: MAX_DIM,
        });
    }
    let mut out = ComplexMatrix::zeros(dim);
    for ia in 0..da {
        for ja in 0..da {
            let za = a.get(ia, ja);
            for ib in 0..db {
                for jb in 0..db {
                    out.set(ia * db + ib, ja * db + jb, za * b.get(ib, jb));
                }
            }
        }
    }
    Ok(out)
}

/// Contracts one tensor factor: `subsystem_dims` lists the local dimensions
/// (row-major order) and `traced_index` names the factor to trace out.
pub fn partial_trace<T: Real>(
    m: &ComplexMatrix<T>,
    subsystem_dims: &[usize],
    traced_index: usize,
) -> Result<ComplexMatrix<T>> {
    let total: usize = subsystem_dims.iter().product();
    if total != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {subsystem_dims:?} multiply to {total}, matrix dim is {}",
            m.dim()
        )));
    }
    if traced_index >= subsystem_dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "traced index {traced_index} out of range for {} factors",
            subsystem_dims.len()
        )));
    }
    let d_t = subsystem_dims[traced_index];
    // Split composite index as (left, t, right) with strides computed from the dims.
    let d_left: usize = subsystem_dims[..traced_index].iter().product();
    let d_right: usize = subsystem_dims[traced_index + 1..].iter().product();
    let kept = d_left * d_right;
    let mut out = ComplexMatrix::zeros(kept.max(1));
    for il in 0..d_left {
        for ir in 0..d_right {
            for jl in 0..d_left {
                for jr in 0..d_right {
                    let mut acc = C::new(T::zero(), T::zero());
                    for k in 0..d_t {
                        let row = (il * d_t + k) * d_right + ir;
                        let col = (jl * d_t + k) * d_right + jr;
                        acc = acc + m.get(row, col);
                    }
                    out.set(il * d_right + ir, jl * d_right + jr, acc);
                }
            }
        }
    }
    Ok(out)
}

/// Partial transpose of a two-qubit (4x4) matrix on the chosen factor.
pub fn partial_transpose<T: Real>(
    m: &ComplexMatrix<T>,
    on_first: bool,
) -> Result<ComplexMatrix<T>> {
    if m.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "partial transpose requires a 4x4 bipartite matrix, got {}x{}",
            m.dim(),
            m.dim()
        )));
    }
    let mut out = ComplexMatrix::zeros(4);
    for i1 in 0..2 {
        for i2 in 0..2 {
            for j1 in 0..2 {
                for j2 in 0..2 {
                    let (r, c) = if on_first {
                        (j1 * 2 + i2, i1 * 2 + j2)
                    } else {
                        (i1 * 2 + j2, j1 * 2 + i2)
                    };
                    out.set(r, c, m.get(i1 * 2 + i2, j1 * 2 + j2));
                }
            }
        }
    }
    Ok(out)
}

/// Real spectrum of a Hermitian operator, descending.
pub fn hermitian_eigenvalues<T: Real>(h: &HermitianOperator<T>) -> Vec<T> {
    h.eigenvalues()
}

/// Trace norm of a Hermitian operator: sum of absolute eigenvalues.
pub fn trace_norm<T: Real>(h: &HermitianOperator<T>) -> T {
    h.eigenvalues().iter().map(|e| e.abs()).sum()
}

/// Trace norm of a matrix already known to be Hermitian; skips revalidation.
pub(crate) fn trace_norm_hermitian_parts<T: Real>(m: &ComplexMatrix<T>) -> T {
    jacobi_eigenvalues(m).iter().map(|e| e.abs()).sum()
}

/// Von Neumann entropy in natural-log units, with `0 log 0 := 0`.
pub fn von_neumann_entropy<T: Real>(d: &DensityMatrix<T>) -> T {
    entropy_from_eigenvalues(&d.eigenvalues()).expect("density matrix spectrum already validated")
}

/// Entropy of a probability-like spectrum; eigenvalues in
/// `[-tol_negativity(), 0]` are clipped to zero, anything lower is rejected.
pub fn entropy_from_eigenvalues<T: Real>(eigenvalues: &[T]) -> Result<T> {
    let mut s = T::zero();
    for &e in eigenvalues {
        if e < -T::tol_negativity() {
            return Err(Error::NotDensity(format!(
                "negative eigenvalue {e} in entropy evaluation"
            )));
        }
        if e > T::zero() {
            s = s - e * e.ln();
        }
    }
    Ok(s)
}

/// Entropy of a Hermitian matrix trusted to be a state; used on evolved
/// states in hot paths where re-wrapping would revalidate the spectrum twice.
pub(crate) fn entropy_of_state_matrix<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    entropy_from_eigenvalues(&jacobi_eigenvalues(m))
}

const MAX_JACOBI_SWEEPS: usize = 64;

/// Eigenvalues of a (Hermitian) matrix by cyclic Jacobi rotations, descending.
///
/// Only the Hermitian part participates: the rotation targets
/// `(A[pq] + conj(A[qp]))/2`, so tiny anti-Hermitian noise is projected away.
pub(crate) fn jacobi_eigenvalues<T: Real>(m: &ComplexMatrix<T>) -> Vec<T> {
    let n = m.dim();
    let mut a = m.entries().to_vec();
    // Symmetrise once so the sweep operates on an exactly Hermitian matrix.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (a[i * n + j] + a[j * n + i].conj()).scale(T::of(0.5));
            a[i * n + j] = avg;
            a[j * n + i] = avg.conj();
        }
        a[i * n + i] = C::new(a[i * n + i].re, T::zero());
    }
    let scale = frobenius(&a).max(T::one());
    let stop = T::tol_jacobi() * scale;
    for _ in 0..MAX_JACOBI_SWEEPS {
        if off_diagonal_mass(&a, n) <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, n, p, q);
            }
        }
    }
    let mut evs: Vec<T> = (0..n).map(|i| a[i * n + i].re).collect();
    evs.sort_by(|x, y| y.partial_cmp(x).expect("finite eigenvalues"));
    evs
}

fn frobenius<T: Real>(a: &[C<T>]) -> T {
    a.iter()
        .map(|z| z.norm_sqr())
        .fold(T::zero(), |acc, x| acc + x)
        .sqrt()
}

fn off_diagonal_mass<T: Real>(a: &[C<T>], n: usize) -> T {
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation annihilating the `(p, q)` entry.
fn rotate<T: Real>(a: &mut [C<T>], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let r = apq.norm();
    if r.is_zero() {
        return;
    }
    let u = apq.unscale(r); // phase of the off-diagonal entry
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let tau = (aqq - app) / (r + r);
    // Smaller-magnitude root of t^2 + 2 tau t - 1 = 0.
    let t = if tau.is_infinite() {
        T::zero()
    } else if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    a[p * n + p] = C::new(app - t * r, T::zero());
    a[q * n + q] = C::new(aqq + t * r, T::zero());
    a[p * n + q] = C::new(T::zero(), T::zero());
    a[q * n + p] = C::new(T::zero(), T::zero());

    let cs = C::new(c, T::zero());
    let su = u.scale(s);
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        let new_kp = akp * cs - akq * su.conj();
        let new_kq = akp * su + akq * cs;
        a[k * n + p] = new_kp;
        a[p * n + k] = new_kp.conj();
        a[k * n + q] = new_kq;
        a[q * n + k] = new_kq.conj();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{pauli_matrix, symmetric_bell_projector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type M = ComplexMatrix<f64>;

    fn random_hermitian(rng: &mut impl Rng, dim: usize) -> HermitianOperator<f64> {
        let mut m = M::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C64::new(rng.gen_range(-1.0..1.0), 0.0));
            for j in (i + 1)..dim {
                let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m.set(i, j, z);
                m.set(j, i, z.conj());
            }
        }
        HermitianOperator::new(m).unwrap()
    }

    fn random_density(rng: &mut impl Rng, dim: usize) -> DensityMatrix<f64> {
        // G G^dag / tr, always a valid state.
        let mut g = M::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                g.set(
                    i,
                    j,
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                );
            }
        }
        let gg = g.matmul(&g.adjoint()).unwrap();
        let tr = gg.trace().re;
        DensityMatrix::from_matrix(gg.scale_real(1.0 / tr)).unwrap()
    }

    use crate::C64;

    /// det(A - lambda I) by Gaussian elimination with partial pivoting.
    fn char_poly_residual(m: &M, lambda: f64) -> f64 {
        let n = m.dim();
        let mut a: Vec<C64> = m.entries().to_vec();
        for i in 0..n {
            a[i * n + i] -= C64::new(lambda, 0.0);
        }
        let mut det = C64::new(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    a[i * n + col]
                        .norm()
                        .partial_cmp(&a[j * n + col].norm())
                        .unwrap()
                })
                .unwrap();
            if a[pivot * n + col].norm() == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            det *= a[col * n + col];
            for i in (col + 1)..n {
                let f = a[i * n + col] / a[col * n + col];
                for j in col..n {
                    let sub = f * a[col * n + j];
                    a[i * n + j] -= sub;
                }
            }
        }
        det.norm()
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let i2 = M::identity(2);
        let i4 = tensor_product(&i2, &i2).unwrap();
        assert_eq!(i4, M::identity(4));
    }

    #[test]
    fn tensor_of_sigma_x_pair_is_antidiagonal() {
        let sx: M = pauli_matrix(1);
        let t = tensor_product(&sx, &sx).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i + j == 3 { 1.0 } else { 0.0 };
                assert_eq!(t.get(i, j), C64::new(expect, 0.0));
            }
        }
    }

    #[test]
    fn symmetric_projector_has_half_corners() {
        let p: M = symmetric_bell_projector();
        for (i, j, v) in [
            (0usize, 0usize, 0.5),
            (0, 3, 0.5),
            (3, 0, 0.5),
            (3, 3, 0.5),
            (1, 1, 0.0),
            (2, 2, 0.0),
            (1, 2, 0.0),
        ] {
            assert!((p.get(i, j) - C64::new(v, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn tensor_dimension_guard() {
        let i4 = M::identity(4);
        let i8 = tensor_product(&i4, &M::identity(2)).unwrap();
        assert!(matches!(
            tensor_product(&i8, &i4),
            Err(Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn partial_trace_of_product_recovers_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let rho = random_density(&mut rng, 2);
            let sigma = random_density(&mut rng, 4);
            let joint = tensor_product(rho.matrix(), sigma.matrix()).unwrap();
            let back_rho = partial_trace(&joint, &[2, 4], 1).unwrap();
            let back_sigma = partial_trace(&joint, &[2, 4], 0).unwrap();
            assert!(back_rho.max_abs_diff(rho.matrix()) < 1e-13);
            assert!(back_sigma.max_abs_diff(sigma.matrix()) < 1e-13);
        }
    }

    #[test]
    fn partial_trace_of_bell_projector_is_maximally_mixed() {
        let p: M = symmetric_bell_projector();
        let m = partial_trace(&p, &[2, 2], 0).unwrap();
        assert!(m.max_abs_diff(&M::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_mismatched_dims() {
        let p: M = symmetric_bell_projector();
        assert!(partial_trace(&p, &[2, 4], 0).is_err());
    }

    /// Second marginal of the two-qubit state with diagonal (1/4, 1/4, 1/4, 1/4)
    /// and 1/8 corners.
    #[test]
    fn partial_trace_of_evolved_projector_matrix() {
        let m = M::from_real(
            4,
            &[
                0.25, 0.0, 0.0, 0.125, //
                0.0, 0.25, 0.0, 0.0, //
                0.0, 0.0, 0.25, 0.0, //
                0.125, 0.0, 0.0, 0.25,
            ],
        )
        .unwrap();
        let red = partial_trace(&m, &[2, 2], 1).unwrap();
        assert!(red.max_abs_diff(&M::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn eigenvalues_of_sigma_z() {
        let h = HermitianOperator::new(pauli_matrix::<f64>(3)).unwrap();
        let evs = h.eigenvalues();
        assert!((evs[0] - 1.0).abs() < 1e-14);
        assert!((evs[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_of_bell_projector() {
        let h = HermitianOperator::new(symmetric_bell_projector::<f64>()).unwrap();
        let evs = h.eigenvalues();
        assert!((evs[0] - 1.0).abs() < 1e-13);
        for &e in &evs[1..] {
            assert!(e.abs() < 1e-13);
        }
    }

    /// Spectrum of the step-1 evolved projector at vanishing perturbation:
    /// diagonalising the 1/4-diagonal, 1/8-corner matrix gives
    /// {3/8, 1/4, 1/4, 1/8}.
    #[test]
    fn eigenvalues_of_corner_matrix() {
        let h = HermitianOperator::<f64>::from_real(
            4,
            &[
                0.25, 0.0, 0.0, 0.125, //
                0.0, 0.25, 0.0, 0.0, //
                0.0, 0.0, 0.25, 0.0, //
                0.125, 0.0, 0.0, 0.25,
            ],
        )
        .unwrap();
        let evs = h.eigenvalues();
        let expect = [0.375, 0.25, 0.25, 0.125];
        for (e, x) in evs.iter().zip(expect) {
            assert!((e - x).abs() < 1e-14, "{evs:?}");
        }
    }

    #[test]
    fn eigenvalues_match_characteristic_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in [2usize, 3, 4, 6, 8] {
            for _ in 0..10 {
                let h = random_hermitian(&mut rng, dim);
                let evs = h.eigenvalues();
                let scale = h.matrix().frobenius_norm().max(1.0);
                for &e in &evs {
                    let res = char_poly_residual(h.matrix(), e);
                    assert!(
                        res < 1e-9 * scale.powi(dim as i32),
                        "residual {res} at eigenvalue {e} (dim {dim})"
                    );
                }
            }
        }
    }

    #[test]
    fn eigenvalue_sum_equals_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for dim in [2usize, 4, 8, 16] {
            for _ in 0..10 {
                let h = random_hermitian(&mut rng, dim);
                let sum: f64 = h.eigenvalues().iter().sum();
                assert!((sum - h.trace()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = M::identity(2);
        m.set(0, 1, C64::new(0.5, 0.0));
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn trace_norm_of_density_matrix_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let rho = random_density(&mut rng, 4);
            assert!((trace_norm(rho.operator()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_norm_of_zero_and_half_sigma_z() {
        let zero = HermitianOperator::new(M::zeros(3)).unwrap();
        assert_eq!(trace_norm(&zero), 0.0);
        let h = HermitianOperator::new(pauli_matrix::<f64>(3).scale_real(0.5)).unwrap();
        assert!((trace_norm(&h) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trace_norm_dominates_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..200 {
            let h = random_hermitian(&mut rng, 4);
            assert!(trace_norm(&h) >= h.trace().abs() - 1e-12);
        }
        // Equality on a PSD matrix.
        let rho = random_density(&mut rng, 4);
        assert!((trace_norm(rho.operator()) - rho.operator().trace()).abs() < 1e-12);
    }

    #[test]
    fn entropy_of_pure_state_is_zero() {
        let rho = DensityMatrix::<f64>::basis_projector(4, 2).unwrap();
        assert_eq!(von_neumann_entropy(&rho), 0.0);
    }

    #[test]
    fn entropy_of_maximally_mixed_is_log_dim() {
        let rho = DensityMatrix::<f64>::maximally_mixed(4);
        assert!((von_neumann_entropy(&rho) - 4.0f64.ln()).abs() < 1e-13);
    }

    /// Entropy of the corner matrix above: (20 log 2 - 3 log 3)/8.
    #[test]
    fn entropy_of_evolved_projector_at_zero_perturbation() {
        let rho = DensityMatrix::<f64>::from_real(
            4,
            &[
                0.25, 0.0, 0.0, 0.125, //
                0.0, 0.25, 0.0, 0.0, //
                0.0, 0.0, 0.25, 0.0, //
                0.125, 0.0, 0.0, 0.25,
            ],
        )
        .unwrap();
        let expect = (20.0 * 2.0f64.ln() - 3.0 * 3.0f64.ln()) / 8.0;
        assert!((von_neumann_entropy(&rho) - expect).abs() < 1e-13);
    }

    #[test]
    fn entropy_invariant_under_random_unitary_conjugation() {
        // Unitaries built by exponentiating nothing fancy: compose Givens-like
        // rotations from random Hermitian phases via Jacobi-style factors.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let rho = random_density(&mut rng, 4);
            // Random unitary from QR-free trick: product of complex rotations.
            let mut u = M::identity(4);
            for p in 0..4 {
                for q in (p + 1)..4 {
                    let theta = rng.gen_range(0.0..std::f64::consts::PI);
                    let phi = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
                    let mut g = M::identity(4);
                    g.set(p, p, C64::new(theta.cos(), 0.0));
                    g.set(q, q, C64::new(theta.cos(), 0.0));
                    g.set(p, q, C64::from_polar(theta.sin(), phi));
                    g.set(q, p, -C64::from_polar(theta.sin(), -phi));
                    u = u.matmul(&g).unwrap();
                }
            }
            let conj = u
                .matmul(rho.matrix())
                .unwrap()
                .matmul(&u.adjoint())
                .unwrap();
            let rho2 = DensityMatrix::from_matrix(conj).unwrap();
            assert!((von_neumann_entropy(&rho) - von_neumann_entropy(&rho2)).abs() < 1e-9);
        }
    }

    #[test]
    fn entropy_rejects_genuinely_negative_spectrum() {
        assert!(entropy_from_eigenvalues(&[1.1, -0.1]).is_err());
        // Within the clipping band: treated as zero.
        let s = entropy_from_eigenvalues(&[1.0, -1e-11]).unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn partial_transpose_of_product_state_stays_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let rho = random_density(&mut rng, 2);
        let sigma = random_density(&mut rng, 2);
        let joint = tensor_product(rho.matrix(), sigma.matrix()).unwrap();
        let pt = partial_transpose(&joint, true).unwrap();
        let evs = HermitianOperator::new(pt.clone()).unwrap().eigenvalues();
        assert!(*evs.last().unwrap() > -1e-12);
        // And it equals rho^T (x) sigma.
        let expect = tensor_product(&rho.matrix().transpose(), sigma.matrix()).unwrap();
        assert!(pt.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn partial_transpose_of_bell_projector_has_negative_eigenvalue() {
        let p: M = symmetric_bell_projector();
        let pt = partial_transpose(&p, false).unwrap();
        let evs = HermitianOperator::new(pt).unwrap().eigenvalues();
        assert!((evs.last().unwrap() + 0.5).abs() < 1e-13);
    }

    #[test]
    fn partial_transpose_rejects_wrong_dimension() {
        assert!(partial_transpose(&M::identity(8), true).is_err());
    }
}
