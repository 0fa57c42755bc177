use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero reference speed")]
    ZeroReferenceSpeed,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("degenerate derivative set")]
    DegenerateDerivativeSet,

    /// The elimination produced complex time constants; only their sum and
    /// product are meaningful.
    #[error("oscillatory pair: T1+T2 = {sum}, T1*T2 = {product}")]
    OscillatoryPair { sum: f64, product: f64 },

    #[error("singular mass matrix: {0}")]
    SingularMassMatrix(String),

    #[error("model blew up at t = {t} s")]
    ModelBlewUp { t: f64 },

    #[error("step-size underflow at t = {t} s")]
    StepSizeUnderflow { t: f64 },

    #[error("insufficient excitation")]
    InsufficientExcitation,

    #[error("series too short: need at least {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(String),
}

impl Error {
    pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
