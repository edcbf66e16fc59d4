use thiserror::Error;

use crate::weil_model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("q = {q} is divisible by ell = {ell}")]
    QDivisibleByEll { q: i64, ell: u64 },
    #[error("invalid model:\n{0}")]
    InvalidModel(ValidationReport),
    #[error("unknown atom {0}")]
    UnknownAtom(String),
    #[error("fusion of {0} and {1} is opaque in this model")]
    OpaqueFusion(String, String),
    #[error("class is not nilpotent: {0}")]
    NotNilpotent(String),
    #[error("class is not a C-parameter: {0}")]
    NotCParameter(String),
    #[error("negative coefficient in {0}")]
    NegativeCoefficient(String),
    #[error("coefficient too large for a multiplicity: {0}")]
    Overflow(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("operation requires a model whose atoms are all one-dimensional with total fusion")]
    NonCharacterModel,
    #[error("invalid explicit representation: {0}")]
    InvalidExplicitRep(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable code, used by the CLI in JSON mode.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "NotPrime",
            Error::QDivisibleByEll { .. } => "QDivisibleByEll",
            Error::InvalidModel(_) => "InvalidModel",
            Error::UnknownAtom(_) => "UnknownAtom",
            Error::OpaqueFusion(..) => "OpaqueFusion",
            Error::NotNilpotent(_) => "NotNilpotent",
            Error::NotCParameter(_) => "NotCParameter",
            Error::NegativeCoefficient(_) => "NegativeCoefficient",
            Error::Overflow(_) => "Overflow",
            Error::Parse { .. } => "ParseError",
            Error::NonCharacterModel => "NonCharacterModel",
            Error::InvalidExplicitRep(_) => "InvalidExplicitRep",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}
