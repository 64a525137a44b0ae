use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },

    #[error("invalid rational literal `{0}`")]
    BadRational(String),

    #[error("cannot parse polynomial `{text}`: {reason}")]
    BadPolynomial { text: String, reason: String },

    #[error("invalid Lie algebra: {0}")]
    BadAlgebra(String),

    #[error("unknown catalog algebra `{0}`")]
    UnknownAlgebra(String),

    #[error("subspace is not closed under the bracket")]
    NotSubalgebra,

    #[error("weights must be pairwise distinct (repeated {0})")]
    RepeatedWeights(String),

    #[error("invalid model: {0}")]
    InvalidSpec(String),

    #[error("pencil direction ({t1}, {t2}) is exceptional: t1 + a_j t2 vanishes for site {site}")]
    ExceptionalDirection { t1: String, t2: String, site: usize },

    #[error("pole {0} is not among the declared poles")]
    UnknownPole(String),

    #[error("element is not regular: rank {rank} below generic rank {generic}")]
    NotRegular { rank: usize, generic: usize },

    #[error("Casimir candidate {index} fails: bracket with coordinate {coordinate} is nonzero")]
    NotCasimir { index: usize, coordinate: usize },

    #[error("no Casimir generators known for algebra `{0}`")]
    NoCasimirs(String),

    #[error("exceptional direction ({0}, {1}) supplied among off-exceptional samples")]
    ExceptionalSample(String, String),

    #[error("integration produced a non-finite state at step {step}")]
    NonFinite { step: usize },

    #[error("invalid integration parameters: {0}")]
    BadIntegration(String),

    #[error("serialization: {0}")]
    Serde(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

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
