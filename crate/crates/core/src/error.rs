use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("period matrix is asymmetric (max |tau_ij - tau_ji| = {asymmetry:e})")]
    AsymmetricInput { asymmetry: f64 },
    #[error("imaginary part is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid half characteristic: entries must be 0 or 1/2")]
    InvalidCharacteristic,
    #[error("jet total order {order} exceeds the maximum {max}")]
    JetTooDeep { order: u32, max: u32 },
    #[error("invalid truncation policy: {0}")]
    InvalidPolicy(String),
    #[error("truncation radius {needed} exceeds cap {cap}")]
    RadiusCapExceeded { needed: u32, cap: u32 },
    #[error("Newton iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("wrong genus: expected {expected}, got {got}")]
    WrongGenus { expected: usize, got: usize },
    #[error("degenerate query: {0}")]
    DegenerateQuery(String),
    #[error("singular linear system: {0}")]
    SingularSystem(String),
    #[error("point is not on the theta divisor (|theta| = {value:e}, scale {scale:e})")]
    NotOnDivisor { value: f64, scale: f64 },
    #[error("divisor degree is {degree}, expected 0")]
    DegreeMismatch { degree: i64 },
    #[error("truncation underflow: requested {requested}, available {available}")]
    TruncationUnderflow { requested: i64, available: i64 },
    #[error("leading coefficient is not a unit at the basepoint")]
    NonUnitLeadingCoefficient,
    #[error("operators do not commute (residual {residual:e})")]
    NotCommuting { residual: f64 },
    #[error("no solution: constraint residual {residual:e}")]
    NoSolution { residual: f64 },
    #[error("dressing operator is not monic of order 0")]
    NotMonic,
    #[error("residue obstruction at s = {s} (residue {residue:e})")]
    ResidueObstruction { s: usize, residue: f64 },
    #[error("no relation found at this depth (residual {residual:e})")]
    NoRelationAtDepth { residual: f64 },
    #[error("schema error at {path}: {message}")]
    SchemaError { path: String, message: String },
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("window touches the theta divisor: {0}")]
    DivisorCollision(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("track lost at step {step}: {reason}")]
    TrackLost { step: usize, reason: String },
    #[error("seed zero not found: {0}")]
    SeedNotFound(String),
    #[error("unknown check '{0}'")]
    UnknownCheck(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
