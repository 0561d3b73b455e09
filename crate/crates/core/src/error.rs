use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("weights must be nonincreasing (lambda[{index}] < lambda[{}])", index + 1)]
    UnsortedWeights { index: usize },
    #[error("weight lambda[{index}] is negative or not finite")]
    InvalidWeight { index: usize },
    #[error("weights must contain at least one positive entry")]
    ZeroWeights,
    #[error("ball radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("input vector has a non-finite entry at index {0}")]
    NonFiniteInput(usize),
    #[error("invalid solver parameter: {0}")]
    InvalidParams(String),
    #[error("prox parameter must be nonnegative, got {0}")]
    NegativeProxParameter(f64),
    #[error("point is inside the ball; the projector is the identity there")]
    TrivialProjection,
    #[error("Jacobian is degenerate: H lambda vanishes at the solution")]
    DegenerateJacobian,
    #[error("semismooth Newton did not converge after {iterations} iterations (eta = {eta:e})")]
    NotConverged { iterations: usize, eta: f64 },
    #[error("root bracket [{lo}, {hi}] has no sign change ({f_lo:e}, {f_hi:e})")]
    BracketFailure {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("root finder did not converge within {evaluations} evaluations")]
    RootNotConverged { evaluations: usize },
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}: unsupported vector file extension (expected .csv or .f64)")]
    UnknownExtension { path: PathBuf },
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
