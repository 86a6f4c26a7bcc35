//! Error type shared by every module, with the process exit code each
//! variant maps to at the CLI boundary.

use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A configuration value is missing, unknown, conflicting or out of range.
    #[error("configuration error for `{key}`: {message}")]
    Config { key: String, message: String },

    /// Arguments outside an operation's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series expansion did not reach its stopping criterion.
    #[error("series did not converge after {terms} terms (partial sum {partial_sum})")]
    NonConvergence { partial_sum: f64, terms: usize },

    /// An integrand returned NaN or an infinity.
    #[error("integrand is not finite at x = {abscissa}")]
    NonFinite { abscissa: f64 },

    /// Root finding was started on an interval without a sign change.
    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// A Monte Carlo run produced no usable samples.
    #[error("statistical error: {0}")]
    Statistical(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("usage error: {0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 usage/config, 3 I/O, 4 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Usage(_) => 2,
            Error::Io { .. } => 3,
            Error::Domain(_)
            | Error::NonConvergence { .. }
            | Error::NonFinite { .. }
            | Error::NoSignChange { .. }
            | Error::Statistical(_) => 4,
        }
    }
}
