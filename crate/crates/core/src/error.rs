use thiserror::Error;

/// Errors surfaced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {got} exceeds the supported maximum {max}")]
    DimensionTooLarge { got: usize, max: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("entries must be finite")]
    NonFiniteEntry,

    #[error("operator is not Hermitian: max |A - A^dag| entry = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("chain symbol {0} out of range 0..4")]
    SymbolOutOfRange(u8),

    #[error("refusing to enumerate {paths} paths; raise `prune_below` or lower the horizon")]
    PathBlowup { paths: u128 },

    #[error("singular map: eigenvalue {index} is {value:e}")]
    SingularMap { index: usize, value: f64 },

    #[error("matrix is not column-stochastic: {0}")]
    NotStochastic(String),

    #[error("analytic and numerical divisibility verdicts disagree: {0}")]
    VerdictMismatch(String),

    #[error("integration step too coarse: local error estimate {estimate:e} exceeds {budget:e}")]
    StepTooCoarse { estimate: f64, budget: f64 },

    #[error("unsupported parameter regime: {0}")]
    UnsupportedRegime(String),
}

pub type Result<T> = std::result::Result<T, Error>;
