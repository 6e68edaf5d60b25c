use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("year {year} outside the range of `{series}` ({first}..={last})")]
    YearOutOfRange {
        series: String,
        year: i32,
        first: i32,
        last: i32,
    },

    #[error("{0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "emissions target {target:.6} Gt is not achievable; feasible interval is [{min:.6}, {max:.6}] Gt"
    )]
    InfeasibleTarget { target: f64, min: f64, max: f64 },

    #[error(
        "solver did not converge after {iterations} iterations \
         (constraint residual {constraint_residual:.3e} Gt, stationarity residual {stationarity_residual:.3e})"
    )]
    NonConvergence {
        iterations: usize,
        constraint_residual: f64,
        stationarity_residual: f64,
    },

    #[error("{}:{line}: {message}", path.display())]
    Data {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn data(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Data {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
