use thiserror::Error;

#[derive(Debug, Error)]
pub enum DunklError {
    #[error("multiplicity must be finite and non-negative, got {0}")]
    InvalidMultiplicity(f64),

    #[error("dimension must be positive")]
    EmptyDimension,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinate index {index} out of range for dimension {d}")]
    CoordinateOutOfRange { index: usize, d: usize },

    #[error("kernel evaluated at singular time t = {t} (distance to singular set {distance:e})")]
    SingularTime { t: f64, distance: f64 },

    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),

    #[error("Mehler parameter w = {re}{im:+}i is on the singular set w^2 = 1")]
    SingularMehlerParameter { re: f64, im: f64 },

    #[error("quadrature order {got} below required {required}")]
    QuadratureOrder { required: usize, got: usize },

    #[error("quadrature construction failed: {0}")]
    Quadrature(String),

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("requested {requested} orthonormal functions but only {available} are available")]
    SystemTooLarge { requested: usize, available: usize },

    #[error("degenerate symplectic determinant alpha*delta - beta*gamma = {0}")]
    DegenerateDeterminant(f64),

    #[error("operator is not self-adjoint (max |A - A*| = {0:e})")]
    NotSelfAdjoint(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, DunklError>;
