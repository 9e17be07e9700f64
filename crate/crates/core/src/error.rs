use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows} x {cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("column weight {weight} out of range 1..={size}")]
    WeightOutOfRange { weight: usize, size: usize },
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScramblerError {
    #[error("invalid scrambler parameters: {0}")]
    InvalidSpec(String),
    #[error("no nonsingular scrambler found after {attempts} attempts")]
    Construction { attempts: usize },
    #[error("input length {found} does not match scrambler size {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodeError {
    #[error("input length {found} does not match expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("unsupported field degree m = {0} (supported 3..=12)")]
    UnsupportedField(u32),
    #[error("no BCH code of length {n} with dimension {k}; nearby dimensions: {nearby:?}")]
    NoSuchBchCode { n: usize, k: usize, nearby: Vec<usize> },
    #[error("infeasible degree profile: {0}")]
    InfeasibleProfile(String),
    #[error("parity-check matrix is not lower triangular in its parity part")]
    NotTriangular,
    #[error("invalid puncturing pattern: {0}")]
    InvalidPuncturing(String),
    #[error("alist: {0}")]
    Alist(String),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("frame lengths differ: {expected} vs {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("nothing to combine")]
    Empty,
    #[error("invalid channel parameter: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("threshold {threshold:e} is not bracketed by the curve samples")]
    NotBracketed { threshold: f64 },
    #[error("quadrature did not converge (estimated error {estimate:e})")]
    Quadrature { estimate: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Scrambler(#[from] ScramblerError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Error)]
pub enum CurveIoError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("invalid curve: {0}")]
    Invalid(String),
}
