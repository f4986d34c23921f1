use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grading order lambda must be at least 2, got {0}")]
    InvalidLambda(usize),

    #[error("alpha has {got} components but lambda = {expected}")]
    AlphaLength { expected: usize, got: usize },

    #[error("alpha contains a non-finite component")]
    NonFinite,

    #[error("alpha components sum to {sum:e}, which is not zero")]
    SumNotZero { sum: f64 },

    #[error("condition beta_mu + mu > 0 violated at mu = {mu} (beta_mu + mu = {value})")]
    ConditionViolated { mu: usize, value: f64 },

    #[error("sector index {mu} out of range for lambda = {lambda}")]
    InvalidSector { mu: usize, lambda: usize },

    #[error("truncation dimension {dim} is too small, need at least {min}")]
    DimTooSmall { dim: usize, min: usize },

    #[error("Pochhammer base {a} must be positive for k > 0")]
    NonpositiveBase { a: f64 },

    #[error("hypergeometric denominator parameter {b} must be positive")]
    NonpositiveParameter { b: f64 },

    #[error("{what} = {value} is out of range (max {max})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not implemented: {0}")]
    NotImplemented(String),

    #[error("not supported: {0}")]
    NotSupported(String),

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("mean photon number is zero, Mandel parameter undefined")]
    ZeroMeanPhotonNumber,

    #[error("quantity only available for sector mu = 0, got mu = {mu}")]
    UnsupportedSector { mu: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag, used in the CLI's error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidLambda(_) => "InvalidLambda",
            Error::AlphaLength { .. } => "AlphaLength",
            Error::NonFinite => "NonFinite",
            Error::SumNotZero { .. } => "SumNotZero",
            Error::ConditionViolated { .. } => "ConditionViolated",
            Error::InvalidSector { .. } => "InvalidSector",
            Error::DimTooSmall { .. } => "DimTooSmall",
            Error::NonpositiveBase { .. } => "NonpositiveBase",
            Error::NonpositiveParameter { .. } => "NonpositiveParameter",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::NotImplemented(_) => "NotImplemented",
            Error::NotSupported(_) => "NotSupported",
            Error::QuadratureFailure(_) => "QuadratureFailure",
            Error::ZeroMeanPhotonNumber => "ZeroMeanPhotonNumber",
            Error::UnsupportedSector { .. } => "UnsupportedSector",
            Error::Config(_) => "Config",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
