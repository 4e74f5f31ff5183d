use thiserror::Error;

/// Errors raised by the arithmetic, torsion and experiment layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("field of order {p}^{e} is too large")]
    FieldTooLarge { p: u64, e: u32 },
    #[error("extension degree must be at least 1")]
    ZeroExtensionDegree,
    #[error("division by zero")]
    DivisionByZero,
    #[error("gcd of two zero polynomials is undefined")]
    GcdOfZeros,
    #[error("expected a nonzero polynomial")]
    ZeroPolynomial,
    #[error("expected a polynomial of degree at least 1, got {0}")]
    ConstantPolynomial(String),
    #[error("valuation of zero is +infinity")]
    ZeroValuation,
    #[error("tail precision {have} is below the required depth {need}")]
    InsufficientPrecision { have: usize, need: usize },
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid ball: {0}")]
    InvalidBall(String),
    #[error("invalid torsion point: {0}")]
    InvalidPoint(String),
    #[error("invalid Galois-image model: {0}")]
    InvalidModel(String),
    #[error("rank must be at least {min}, got {got}")]
    RankTooSmall { min: usize, got: usize },
    #[error("orbit has {size} candidates, above the materialization cap {cap}")]
    OrbitTooLarge { size: u128, cap: u128 },
    #[error("base point {point} does not have exact order {order}")]
    UnsatisfiableBase { point: String, order: String },
    #[error("cross-check failed: {0}")]
    Inconsistent(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
