use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("battery contract violated: stored energy {value} kWh outside [0, {capacity}] kWh")]
    ContractViolation { value: f64, capacity: f64 },

    #[error("infeasible demand at {at}: {demand_kw} kW exceeds path capacity {capacity_kw} kW")]
    InfeasibleDemand {
        at: String,
        demand_kw: f64,
        capacity_kw: f64,
    },

    #[error("{path}:{line}: {message}")]
    Schema {
        path: String,
        line: u64,
        message: String,
    },

    #[error("series misaligned: {0}")]
    Misaligned(String),

    #[error("singular fit: {0}")]
    SingularFit(String),

    #[error("savings undefined for a zero baseline bill")]
    UndefinedBaseline,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
