use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("eta = {eta} makes H vanish; the eta-mu model reduces to Nakagami-m and the closed forms are singular")]
    DegenerateEta { eta: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error in {func}: {reason}")]
    Domain { func: &'static str, reason: String },

    #[error("gamma function pole at argument {arg}")]
    Pole { arg: f64 },

    #[error("integration did not converge: value {value:e}, error estimate {error:e} after {evaluations} evaluations")]
    NonConvergent {
        value: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("series diverged: {reason}")]
    SeriesDiverged { reason: String },

    #[error("assembled value {value:e} disagrees with direct reference {reference:e}")]
    CancellationWarning { value: f64, reference: f64 },

    #[error("non-finite value while evaluating {context}")]
    NonFinite { context: &'static str },

    #[error("polynomial expansion of degree {degree} exceeds the supported maximum of {max}")]
    ExpansionTooLarge { degree: usize, max: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("comparison needs analytic and mc rows for the same metric")]
    MissingEngine,

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
