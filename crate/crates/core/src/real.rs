use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Real scalar the numeric kernel is generic over (`f32` or `f64`).
///
/// The associated tolerances calibrate structural validation and boundary
/// verdicts to the precision of the scalar; all library defaults are stated
/// for `f64`.
pub trait Real: Float + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static {
    /// Tolerance for structural validation (Hermiticity, unit trace,
    /// stochasticity, probability normalisation).
    fn tol_validate() -> Self;

    /// Inclusive band around positivity boundaries; values this close to the
    /// boundary count as positive.
    fn tol_boundary() -> Self;

    /// Off-diagonal Frobenius mass at which the Jacobi sweep terminates,
    /// relative to the matrix scale.
    fn tol_jacobi() -> Self;

    /// Density-matrix eigenvalues in `[-tol_negativity(), 0]` are treated as
    /// exact zeros; anything below is rejected.
    fn tol_negativity() -> Self;

    /// Lossy conversion of an `f64` literal.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable in scalar type")
    }
}

impl Real for f64 {
    fn tol_validate() -> Self {
        1e-12
    }
    fn tol_boundary() -> Self {
        1e-10
    }
    fn tol_jacobi() -> Self {
        1e-14
    }
    fn tol_negativity() -> Self {
        1e-10
    }
}

impl Real for f32 {
    fn tol_validate() -> Self {
        1e-5
    }
    fn tol_boundary() -> Self {
        1e-4
    }
    fn tol_jacobi() -> Self {
        1e-6
    }
    fn tol_negativity() -> Self {
        1e-4
    }
}
