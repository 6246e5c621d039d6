//! Subcommand implementations, callable as library functions so the
//! validation suites and the integration tests drive exactly the code the
//! binary runs.

pub mod conjecture;
pub mod fluct;
pub mod limits_cmd;
pub mod phase;
pub mod simulate;
pub mod speed;
pub mod validate;

/// Command failure, split by exit-code class.
#[derive(Debug)]
pub enum CmdError {
    /// Bad input: config, arguments, unsupported regime. Exit code 2.
    Invalid(String),
    /// Runtime failure (I/O, budget). Exit code 1.
    Runtime(String),
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmdError::Invalid(m) => write!(f, "invalid input: {m}"),
            CmdError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

impl std::error::Error for CmdError {}

impl From<deposim::Error> for CmdError {
    fn from(e: deposim::Error) -> Self {
        match e {
            deposim::Error::InvalidParameter { .. }
            | deposim::Error::DimensionMismatch { .. }
            | deposim::Error::SpeedIntegralDiverges { .. }
            | deposim::Error::SeriesDiverges { .. }
            | deposim::Error::InfiniteVariance { .. } => CmdError::Invalid(e.to_string()),
            other => CmdError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Runtime(e.to_string())
    }
}

impl From<crate::config::ConfigError> for CmdError {
    fn from(e: crate::config::ConfigError) -> Self {
        CmdError::Invalid(e.to_string())
    }
}
