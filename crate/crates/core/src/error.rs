use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value breaks one of its invariants.
    #[error("invalid config: {field}: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("filter step rejected: dt/tau = {ratio} exceeds 0.5")]
    FilterStability { ratio: f64 },

    #[error("arm {arm}: target at distance {distance} m from the shoulder is outside the reach annulus [{min_reach}, {max_reach}]")]
    Unreachable {
        arm: u8,
        distance: f64,
        min_reach: f64,
        max_reach: f64,
    },

    #[error("mass matrix is not positive definite")]
    SingularMassMatrix,

    #[error("run aborted at record {step} (t = {t} s): non-finite state")]
    RunAborted { step: usize, t: f64 },

    #[error("run log is empty")]
    EmptyLog,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("cannot serialize config: {0}")]
    Serialize(#[from] toml::ser::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
