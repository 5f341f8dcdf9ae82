//! Qubit maps diagonal in the Pauli basis.
//!
//! A map `m` with eigenvalues `(l0, l1, l2, l3)` acts on
//! `X = sum_j x_j s_j` (with `s_0 = I` and `s_{1,2,3}` the Pauli matrices)
//! as `X -> sum_j l_j x_j s_j`. Trace-preserving maps have `l0 = 1`.
//!
//! The Choi matrix of such a map is diagonal in the Bell basis; its
//! eigenvalues are the Bell coefficients `c = W l / 4` with `W` the Walsh
//! matrix, which makes complete positivity, positivity of the second tensor
//! power and the diamond norm all available in closed form.

use crate::qmat::{
    jacobi_eigenvalues, tensor_product, trace_norm_hermitian_parts, ComplexMatrix,
    HermitianOperator,
};
use crate::{Error, Real, Result, C};

/// The Pauli matrix `s_j` for `j in 0..4` (`s_0 = I`).
pub fn pauli_matrix<T: Real>(j: usize) -> ComplexMatrix<T> {
    let o = T::zero();
    let l = T::one();
    let entries: [[C<T>; 4]; 4] = [
        [C::new(l, o), C::new(o, o), C::new(o, o), C::new(l, o)],
        [C::new(o, o), C::new(l, o), C::new(l, o), C::new(o, o)],
        [C::new(o, o), C::new(o, -l), C::new(o, l), C::new(o, o)],
        [C::new(l, o), C::new(o, o), C::new(o, o), C::new(-l, o)],
    ];
    ComplexMatrix::new(2, entries[j].to_vec()).expect("static 2x2")
}

/// Projector onto the symmetric Bell vector `(|00> + |11>)/sqrt(2)`:
/// `(I(x)I + s1(x)s1 - s2(x)s2 + s3(x)s3)/4`.
pub fn symmetric_bell_projector<T: Real>() -> ComplexMatrix<T> {
    bell_state_projector(0)
}

/// Projector onto the `k`-th Bell vector, `k in 0..4`, ordered as
/// `(|00>+|11>), (|01>+|10>), (|01>-|10>), (|00>-|11>)` (normalised).
pub fn bell_state_projector<T: Real>(k: usize) -> ComplexMatrix<T> {
    let h = T::of(0.5);
    let o = T::zero();
    let mut m = ComplexMatrix::zeros(4);
    let (i, j, sign) = match k {
        0 => (0usize, 3usize, h),
        1 => (1, 2, h),
        2 => (1, 2, -h),
        3 => (0, 3, -h),
        _ => panic!("Bell index out of range"),
    };
    m.set(i, i, C::new(h, o));
    m.set(j, j, C::new(h, o));
    m.set(i, j, C::new(sign, o));
    m.set(j, i, C::new(sign, o));
    m
}

/// Walsh matrix `W[j][k] = +1` when `j = 0`, `k = 0` or `j = k`, else `-1`.
/// Satisfies `W^2 = 4 I`.
pub fn walsh_apply<T: Real>(v: [T; 4]) -> [T; 4] {
    [
        v[0] + v[1] + v[2] + v[3],
        v[0] + v[1] - v[2] - v[3],
        v[0] - v[1] + v[2] - v[3],
        v[0] - v[1] - v[2] + v[3],
    ]
}

/// Weights of the Kraus-like form `X -> sum_k c_k s_k X s_k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellCoefficients<T> {
    c: [T; 4],
}

impl<T: Real> BellCoefficients<T> {
    pub fn coefficients(&self) -> [T; 4] {
        self.c
    }

    /// Recovers the map eigenvalues, `l = W c`.
    pub fn eigenvalues(&self) -> [T; 4] {
        walsh_apply(self.c)
    }

    pub fn min(&self) -> T {
        self.c.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn abs_sum(&self) -> T {
        self.c.iter().map(|x| x.abs()).sum()
    }
}

/// Qubit map diagonal in the Pauli basis, identified by its four eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliDiagonalMap<T> {
    lam: [T; 4],
}

impl<T: Real> PauliDiagonalMap<T> {
    pub fn new(lam: [T; 4]) -> Result<Self> {
        if lam.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self { lam })
    }

    pub fn identity() -> Self {
        Self { lam: [T::one(); 4] }
    }

    /// Conjugation by the Pauli matrix `s_k`; eigenvalues are `+1` on
    /// `s_0` and `s_k`, `-1` elsewhere.
    pub fn pauli_conjugation(k: usize) -> Self {
        let mut lam = [-T::one(); 4];
        lam[0] = T::one();
        lam[k] = T::one();
        Self { lam }
    }

    #[inline]
    pub fn eigenvalues(&self) -> [T; 4] {
        self.lam
    }

    #[inline]
    pub fn eigenvalue(&self, j: usize) -> T {
        self.lam[j]
    }

    pub fn is_trace_preserving(&self) -> bool {
        (self.lam[0] - T::one()).abs() <= T::tol_validate()
    }

    /// Applies the map to a `2x2` Hermitian operator.
    pub fn apply(&self, h: &HermitianOperator<T>) -> Result<HermitianOperator<T>> {
        if h.dim() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "Pauli-diagonal maps act on 2x2 operators, got {}x{}",
                h.dim(),
                h.dim()
            )));
        }
        let x = bloch_coefficients(h.matrix());
        let mut m = ComplexMatrix::zeros(2);
        for (j, &xj) in x.iter().enumerate() {
            let basis = pauli_matrix(j);
            m = m.add(&basis.scale_real(self.lam[j] * xj))?;
        }
        HermitianOperator::new(m)
    }

    /// Componentwise composition `self . other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut lam = [T::zero(); 4];
        for j in 0..4 {
            lam[j] = self.lam[j] * other.lam[j];
        }
        Self { lam }
    }

    /// Componentwise inverse; fails on eigenvalues within `1e-12` of zero.
    pub fn inverse(&self) -> Result<Self> {
        let mut lam = [T::zero(); 4];
        for j in 0..4 {
            if self.lam[j].abs() <= T::of(1e-12) {
                return Err(Error::SingularMap {
                    index: j,
                    value: self.lam[j].to_f64().unwrap_or(f64::NAN),
                });
            }
            lam[j] = T::one() / self.lam[j];
        }
        Ok(Self { lam })
    }

    /// `(self (x) id)` applied to the symmetric Bell projector.
    pub fn choi_matrix(&self) -> HermitianOperator<T> {
        let quarter = T::of(0.25);
        let signs = [T::one(), T::one(), -T::one(), T::one()];
        let mut m = ComplexMatrix::zeros(4);
        for j in 0..4 {
            let sj = pauli_matrix(j);
            let term = tensor_product(&sj, &sj).expect("4x4");
            m = m
                .add(&term.scale_real(quarter * signs[j] * self.lam[j]))
                .expect("same dim");
        }
        HermitianOperator::new(m).expect("Choi matrix of a real-eigenvalue map is Hermitian")
    }

    /// Bell coefficients `c = W lam / 4`; for trace-preserving maps these are
    /// exactly the Choi eigenvalues.
    pub fn bell_coefficients(&self) -> BellCoefficients<T> {
        let w = walsh_apply(self.lam);
        let quarter = T::of(0.25);
        BellCoefficients {
            c: [
                w[0] * quarter,
                w[1] * quarter,
                w[2] * quarter,
                w[3] * quarter,
            ],
        }
    }

    /// Complete positivity: all Bell coefficients above `-tol`.
    pub fn is_completely_positive(&self, tol: T) -> bool {
        self.bell_coefficients().min() >= -tol
    }

    /// Positivity on states: `l0 >= max_j |l_j|` within `tol`.
    ///
    /// Exact for every Pauli-diagonal map: the output Bloch vector has length
    /// `max_j |l_j|` at worst while the output trace part is `l0`.
    pub fn is_positive(&self, tol: T) -> bool {
        let bloch_max = self.lam[1]
            .abs()
            .max(self.lam[2].abs())
            .max(self.lam[3].abs());
        self.lam[0] >= -tol && bloch_max <= self.lam[0] + tol
    }

    /// Positivity of `self (x) self`, equivalent to complete positivity of
    /// `self . self` for Pauli-diagonal maps.
    pub fn tensor_square_is_positive(&self, tol: T) -> bool {
        self.compose(self).is_completely_positive(tol)
    }

    /// Diamond norm. For Pauli-diagonal maps the Choi matrix is Bell-diagonal
    /// with maximally mixed marginals, so the norm is `sum_k |c_k|`.
    pub fn diamond_norm(&self) -> T {
        self.bell_coefficients().abs_sum()
    }
}

/// Bloch-style coefficients `x_j = Re tr(s_j m) / 2` of a `2x2` matrix.
pub fn bloch_coefficients<T: Real>(m: &ComplexMatrix<T>) -> [T; 4] {
    let half = T::of(0.5);
    let a = m.get(0, 0);
    let d = m.get(1, 1);
    let b = m.get(0, 1);
    let c = m.get(1, 0);
    [
        (a.re + d.re) * half,
        (b.re + c.re) * half,
        (c.im - b.im) * half,
        (a.re - d.re) * half,
    ]
}

/// Fano coefficients `R[j][k] = Re tr((s_j (x) s_k) m) / 4` of a `4x4` matrix.
pub fn fano_coefficients<T: Real>(m: &ComplexMatrix<T>) -> Result<[[T; 4]; 4]> {
    if m.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "Fano decomposition requires a 4x4 matrix, got {}x{}",
            m.dim(),
            m.dim()
        )));
    }
    let quarter = T::of(0.25);
    let mut r = [[T::zero(); 4]; 4];
    for j in 0..4 {
        let sj = pauli_matrix::<T>(j);
        for k in 0..4 {
            let sk = pauli_matrix::<T>(k);
            let basis = tensor_product(&sj, &sk).expect("4x4");
            let prod = basis.matmul(m).expect("same dim");
            r[j][k] = prod.trace().re * quarter;
        }
    }
    Ok(r)
}

/// Rebuilds `sum_{jk} R[j][k] s_j (x) s_k`.
pub fn from_fano_coefficients<T: Real>(r: &[[T; 4]; 4]) -> ComplexMatrix<T> {
    let mut m = ComplexMatrix::zeros(4);
    for j in 0..4 {
        let sj = pauli_matrix::<T>(j);
        for k in 0..4 {
            if r[j][k].is_zero() {
                continue;
            }
            let sk = pauli_matrix::<T>(k);
            let basis = tensor_product(&sj, &sk).expect("4x4");
            m = m.add(&basis.scale_real(r[j][k])).expect("same dim");
        }
    }
    m
}

/// Applies `a (x) b` to a two-qubit Hermitian matrix by scaling its Fano
/// coefficients.
pub fn apply_tensor_pair<T: Real>(
    a: &PauliDiagonalMap<T>,
    b: &PauliDiagonalMap<T>,
    m: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    let mut r = fano_coefficients(m)?;
    for j in 0..4 {
        for k in 0..4 {
            r[j][k] = r[j][k] * a.eigenvalue(j) * b.eigenvalue(k);
        }
    }
    Ok(from_fano_coefficients(&r))
}

/// Trace norm of `(m (x) id)[x]` for a two-qubit Hermitian input; the brute
/// force reference the closed-form diamond norm is checked against.
pub fn output_trace_norm<T: Real>(m: &PauliDiagonalMap<T>, x: &ComplexMatrix<T>) -> Result<T> {
    let out = apply_tensor_pair(m, &PauliDiagonalMap::identity(), x)?;
    Ok(trace_norm_hermitian_parts(&out))
}

/// Lower-bounds the diamond norm by maximising `|| (m (x) id)[X] ||_1` over a
/// candidate set of unit-trace-norm Hermitian inputs. The four Bell
/// projectors are always included; they are extremal for Bell-diagonal Choi
/// matrices, so the bound is tight for Pauli-diagonal maps.
pub fn diamond_norm_lower_bound<T: Real>(
    m: &PauliDiagonalMap<T>,
    extra_candidates: &[ComplexMatrix<T>],
) -> Result<T> {
    let mut best = T::zero();
    for k in 0..4 {
        let v = output_trace_norm(m, &bell_state_projector(k))?;
        best = best.max(v);
    }
    for cand in extra_candidates {
        let norm = trace_norm_hermitian_parts(cand);
        if norm <= T::tol_validate() {
            continue;
        }
        let v = output_trace_norm(m, &cand.scale_real(T::one() / norm))?;
        best = best.max(v);
    }
    Ok(best)
}

/// Choi eigenvalues obtained numerically, descending; cross-checks the
/// Bell-coefficient route.
pub fn choi_eigenvalues_numeric<T: Real>(m: &PauliDiagonalMap<T>) -> Vec<T> {
    jacobi_eigenvalues(m.choi_matrix().matrix())
}
