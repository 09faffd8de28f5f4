use std::fmt;

use atlas_core::infinite::InfiniteError;
use atlas_core::model::ModelError;
use atlas_core::particles::ParticleError;
use atlas_core::rbm::RbmError;
use atlas_core::stats::StatsError;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    /// The run finished but a statistical gate failed, or the simulation hit
    /// a numerical failure.
    GateFailed = 1,
    /// Drifts without a stationary law (non-tight spec, non-ergodic RBM).
    NotTight = 2,
    /// Unreadable, malformed or out-of-range configuration, or an output
    /// directory that cannot be written.
    Config = 3,
    /// No truncation size meets the requested error within the cap.
    Truncation = 4,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    NotTight(String),
    Truncation(String),
    Numerical(String),
}

impl CliError {
    pub fn exit(&self) -> Exit {
        match self {
            CliError::Config(_) | CliError::Io(_) => Exit::Config,
            CliError::NotTight(_) => Exit::NotTight,
            CliError::Truncation(_) => Exit::Truncation,
            CliError::Numerical(_) => Exit::GateFailed,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
            CliError::NotTight(m) => write!(f, "no stationary law: {m}"),
            CliError::Truncation(m) => write!(f, "truncation failure: {m}"),
            CliError::Numerical(m) => write!(f, "simulation failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::NotTight { .. } => CliError::NotTight(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<ParticleError> for CliError {
    fn from(e: ParticleError) -> Self {
        match e {
            ParticleError::InvalidConfig(_)
            | ParticleError::LengthMismatch { .. }
            | ParticleError::EmptySystem => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<RbmError> for CliError {
    fn from(e: RbmError) -> Self {
        match e {
            RbmError::NotErgodic { .. } => CliError::NotTight(e.to_string()),
            RbmError::NoConvergence { .. } | RbmError::NonFinite | RbmError::Stats(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<InfiniteError> for CliError {
    fn from(e: InfiniteError) -> Self {
        match e {
            InfiniteError::Unreachable { .. } => CliError::Truncation(e.to_string()),
            InfiniteError::Model(m) => m.into(),
            InfiniteError::Particle(p) => p.into(),
            InfiniteError::InvalidParameter(_) | InfiniteError::WindowViolation { .. } => {
                CliError::Config(e.to_string())
            }
        }
    }
}
