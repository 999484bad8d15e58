//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A fixed-point or root-finding iteration failed to converge; carries
    /// the last iterate as a diagnostic.
    #[error("no convergence after {iterations} iterations (last iterate {last})")]
    NonConvergence { last: f64, iterations: usize },

    /// A submission log violated the pod protocol's structural rules.
    #[error("malformed submission log: {0}")]
    MalformedLog(String),

    /// The demeaned regression design is singular.
    #[error("rank-deficient design: column `{0}` has no within-author variation")]
    RankDeficient(String),

    /// A run configuration is inconsistent or leaves nothing to do.
    #[error("configuration error: {0}")]
    Config(String),

    /// A line of an input file failed to parse.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
