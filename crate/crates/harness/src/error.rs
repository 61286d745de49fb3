use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),

    #[error("invariant violated in {algorithm} (seed {seed}, replication {replication}): {source}")]
    Invariant {
        algorithm: String,
        seed: u64,
        replication: u64,
        #[source]
        source: cbm_core::Error,
    },

    #[error("{algorithm} failed (seed {seed}, replication {replication}): {source}")]
    Run {
        algorithm: String,
        seed: u64,
        replication: u64,
        #[source]
        source: cbm_core::Error,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// Process exit code: 2 for invariant violations, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Invariant { .. } => 2,
            _ => 1,
        }
    }

    /// Classifies a core error raised while simulating.
    pub(crate) fn from_run(algorithm: &str, seed: u64, replication: u64, source: cbm_core::Error) -> Self {
        use cbm_core::Error as E;
        let algorithm = algorithm.to_string();
        match source {
            E::BudgetViolation { .. } | E::NonMonotoneBudget { .. } | E::InvalidBudget { .. } => {
                Self::Invariant { algorithm, seed, replication, source }
            }
            _ => Self::Run { algorithm, seed, replication, source },
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
