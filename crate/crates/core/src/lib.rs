//! Simulation and analysis toolkit for open-qubit dynamics driven by a
//! classical Markov-chain collisional environment.
//!
//! The crate is organised bottom-up:
//!
//! * [`qmat`] — dense complex-matrix kernel (spectra, norms, entropies,
//!   tensor and partial operations) for Hilbert-space dimensions up to 16;
//! * [`pauli`] — qubit maps diagonal in the Pauli basis: composition, Choi
//!   analysis, the positivity hierarchy and the diamond norm;
//! * [`mod@env`] — the 4-symbol Markov-chain environment: transition matrix,
//!   stationary law, path probabilities and inter-site correlations;
//! * [`dynamics`] — discrete-time reduced dynamics of a collisionally
//!   coupled qubit: path-sum oracle, recurrence, closed forms, intertwiners
//!   and divisibility classification;
//! * [`ctime`] — the continuous-time (stroboscopic) limit: closed-form
//!   eigenvalues, canonical rates and a Volterra integrator oracle;
//! * [`correlations`] — joint system-chain states and mutual information in
//!   discrete and continuous time;
//! * [`witness`] — backflow-of-information detection via Helstrom
//!   trajectories, ensemble quantumness and the separable construction.
//!
//! Everything numeric is generic over the scalar type through [`Real`];
//! concrete `f64` aliases are exported at the crate root.

// Index loops here typically walk several fixed-size arrays in lockstep.
#![allow(clippy::needless_range_loop)]

pub mod correlations;
pub mod ctime;
pub mod dynamics;
pub mod env;
mod error;
pub mod pauli;
pub mod qmat;
mod real;
pub mod witness;

pub use error::{Error, Result};
pub use real::Real;

/// Complex scalar over the generic real type.
pub type C<T> = num_complex::Complex<T>;

/// Complex scalar at double precision.
pub type C64 = num_complex::Complex<f64>;

/// Double-precision dense complex matrix.
pub type ComplexMatrix64 = qmat::ComplexMatrix<f64>;
/// Double-precision Hermitian operator.
pub type HermitianOperator64 = qmat::HermitianOperator<f64>;
/// Double-precision density matrix.
pub type DensityMatrix64 = qmat::DensityMatrix<f64>;
/// Double-precision Pauli-diagonal qubit map.
pub type PauliDiagonalMap64 = pauli::PauliDiagonalMap<f64>;
/// Double-precision chain parameters.
pub type ChainParams64 = env::ChainParams<f64>;
/// Double-precision Markov-chain environment.
pub type MarkovChainEnv64 = env::MarkovChainEnv<f64>;
/// Double-precision collision model.
pub type CollisionModel64 = dynamics::CollisionModel<f64>;
/// Double-precision continuous-time model.
pub type ContinuousModel64 = ctime::ContinuousModel<f64>;
