use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field configuration: {0}")]
    InvalidField(String),

    #[error("configured unit #{index} has norm {norm}, expected +-1")]
    NonUnit { index: usize, norm: i128 },

    #[error("unit lattice is numerically singular (min pivot {pivot:e})")]
    SingularLattice { pivot: f64 },

    #[error(
        "no generator found for prime of norm {norm} over p = {p} within squared length {bound:.3}"
    )]
    GeneratorNotFound { norm: u64, p: u64, bound: f64 },

    #[error("field is not flagged as class number one")]
    NotClassNumberOne,

    #[error("logarithm of the zero element")]
    ZeroElement,

    #[error("parameter violation: {0}")]
    ParamViolation(String),

    #[error("points are not tail equivalent: {0}")]
    NotEquivalent(String),

    #[error("coordinate {coord} sits at its truncation level {level}")]
    TailLevel { coord: usize, level: u32 },

    #[error("blocks {first} and {second} share coordinate {coord}")]
    Overlap { first: usize, second: usize, coord: usize },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable code for the error class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidField(_) => "InvalidField",
            Error::NonUnit { .. } => "NonUnit",
            Error::SingularLattice { .. } => "SingularLattice",
            Error::GeneratorNotFound { .. } => "GeneratorNotFound",
            Error::NotClassNumberOne => "NotClassNumberOne",
            Error::ZeroElement => "ZeroElement",
            Error::ParamViolation(_) => "ParamViolation",
            Error::NotEquivalent(_) => "NotEquivalent",
            Error::TailLevel { .. } => "TailLevel",
            Error::Overlap { .. } => "OverlapError",
            Error::Parse(_) => "ParseError",
            Error::Json(_) => "JsonError",
            Error::Io(_) => "IoError",
        }
    }
}
