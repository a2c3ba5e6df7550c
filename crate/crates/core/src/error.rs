use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("not a total x-derivative")]
    NotTotalDerivative,
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("no admissible one-cut root at T = {0}")]
    NoAdmissibleRoot(String),
    #[error("no admissible two-cut solution at T = {0}")]
    NoTwoCutSolution(String),
    #[error("phase could not be classified at T = {0}")]
    Unclassifiable(String),
    #[error("point lies outside the eigenvalue support")]
    OutsideSupport,
    #[error("W'(r0) vanishes: critical point, use the double-scaling path")]
    CriticalPointHit,
    #[error("hodograph Jacobian is singular")]
    SingularHodograph,
    #[error("series truncation exceeded: {0}")]
    TruncationExceeded(String),
    #[error("moment problem numerically singular; trusted up to n = {trusted}")]
    NumericallySingular { trusted: usize },
    #[error("derivations disagree: {0}")]
    Mismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::NotTotalDerivative => "NotTotalDerivative",
            Error::DivisionByZero(_) => "DivisionByZero",
            Error::NoAdmissibleRoot(_) => "NoAdmissibleRoot",
            Error::NoTwoCutSolution(_) => "NoTwoCutSolution",
            Error::Unclassifiable(_) => "Unclassifiable",
            Error::OutsideSupport => "OutsideSupport",
            Error::CriticalPointHit => "CriticalPointHit",
            Error::SingularHodograph => "SingularHodograph",
            Error::TruncationExceeded(_) => "TruncationExceeded",
            Error::NumericallySingular { .. } => "NumericallySingular",
            Error::Mismatch(_) => "Mismatch",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
