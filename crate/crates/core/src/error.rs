use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates its contract. `key` is the dotted
    /// config path (`grid.n_points`).
    #[error("invalid configuration at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown configuration key `{key}` on line {line}")]
    UnknownKey { key: String, line: usize },

    #[error("propagation aborted at step {step}: {message}")]
    Propagation { step: usize, message: String },

    #[error("undefined value: {0}")]
    Undefined(String),

    #[error("not in tunneling regime: {0}")]
    Regime(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("corrupt trajectory: {0}")]
    Corrupt(String),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 2 for runtime failures (propagation, output I/O),
    /// 1 for everything attributable to bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Propagation { .. } | Error::Write { .. } => 2,
            _ => 1,
        }
    }
}
