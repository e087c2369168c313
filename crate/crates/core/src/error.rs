use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("zero divisor")]
    ZeroDivisor,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported period {0}")]
    UnsupportedPeriod(i64),
    #[error("field not totally real")]
    NotTotallyReal,
    #[error("invalid twist group: {0}")]
    InvalidGroup(String),
    #[error("out of scope modulus {0}")]
    OutOfScopeModulus(i64),
    #[error("averaging axiom inapplicable: {0}")]
    AxiomInapplicable(String),
    #[error("no convergence at depth {depth}: window spread {spread:e}")]
    NoConvergence { depth: usize, spread: f64 },
    #[error("outside proven half-plane: s = {0}")]
    OutsideHalfPlane(String),
    #[error("cutoff too small: {0}")]
    CutoffTooSmall(String),
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
    #[error("ill-conditioned solve: condition estimate {0:e}")]
    IllConditioned(f64),
    #[error("inconsistent system: {0}")]
    Inconsistent(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
