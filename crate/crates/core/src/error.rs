use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("window too large: {0}")]
    WindowTooLarge(String),
    #[error("parameter error: {0}")]
    ParamError(String),
    #[error("ill-formed HNN extension: {0}")]
    IllFormedHnn(String),
    #[error("not small cancellation: {0}")]
    NotSmallCancellation(String),
    #[error("oracle could not decide: {0}")]
    OracleUnknown(String),
    #[error("word is not a relation: {0}")]
    NotARelation(String),
    #[error("matrix too large: {0}")]
    MatrixTooLarge(String),
    #[error("nonzero stable-letter exponent {0}")]
    NonzeroTExponent(i64),
    #[error("base membership undecidable: {0}")]
    BaseMembershipUndecidable(String),
    #[error("contraction detected: {0}")]
    ContractionDetected(String),
    #[error("law violated: {0}")]
    LawViolated(String),
    #[error("hypothesis ({0}) failed: {1}")]
    HypothesisFailed(u8, String),
    #[error("unknown group spec: {0}")]
    UnknownGroupSpec(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { location: location.into(), message: message.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
