use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("site count {n} exceeds the configured cap of {cap}")]
    TooManySites { n: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    Unnormalized { norm_sqr: f64 },

    #[error("expectation value has imaginary part {imag}")]
    NonRealExpectation { imag: f64 },

    #[error("invalid Pauli label {0:?}")]
    InvalidPauli(char),

    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),

    #[error("eigensolver did not converge after {steps} Krylov steps (residual {residual:e})")]
    NoConvergence { steps: usize, residual: f64 },

    #[error("snapshot budget requires at least two observables, got {0}")]
    BudgetTooFewObservables(usize),

    #[error("no scheduled measurement round matches the observable")]
    NoMatchingRounds,

    #[error("empty input")]
    Empty,

    #[error("requested {k} clusters for {rows} rows")]
    TooManyClusters { k: usize, rows: usize },

    #[error("observable sets differ between rows")]
    InconsistentObservables,

    #[error("report for {0} has no exact value")]
    MissingExact(usize),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
