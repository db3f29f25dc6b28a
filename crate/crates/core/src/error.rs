use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("form is not antisymmetric (defect {0:e})")]
    NotAntisymmetric(f64),

    #[error("metric is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("odd phase-space dimension {0}")]
    OddDimension(usize),

    #[error("antisymmetric form is singular (smallest symplectic eigenvalue {0:e})")]
    SingularForm(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("Hermite basis with {levels} levels needs a halfwidth of at least {needed}, got {halfwidth}")]
    HalfwidthTooSmall { levels: usize, halfwidth: f64, needed: f64 },

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("resolvent parameter outside the validity region: {0}")]
    OutsideValidity(String),

    #[error("z = {re}{im:+}i lies within {distance:e} of the pole {pole}")]
    NearPole { re: f64, im: f64, pole: f64, distance: f64 },

    #[error("energy {0} is not of the form d/2 + m")]
    NotAnEigenvalue(f64),

    #[error("quantized symbol is numerically singular (condition number {0:e})")]
    NotInvertible(f64),

    #[error("window boundary {boundary} is within {margin:e} of the eigenvalue {eigenvalue}")]
    WindowTooClose { boundary: f64, eigenvalue: f64, margin: f64 },

    #[error("lattice too coarse: N^2 = {n2} but at least {required} required")]
    LatticeTooCoarse { n2: usize, required: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("eigensolver did not converge after {iterations} iterations (max residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("requested {requested} eigenvalues but the limit is {limit}")]
    TooManyEigenvalues { requested: usize, limit: usize },

    #[error("insufficient spectrum depth: largest computed value {largest} does not exceed {lambda}; about {required} eigenvalues needed")]
    InsufficientDepth { lambda: f64, largest: f64, required: usize },

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
