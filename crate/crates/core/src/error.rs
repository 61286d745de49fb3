use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("budget decreased from {previous} to {next} at round {round}")]
    NonMonotoneBudget { round: usize, previous: f64, next: f64 },

    #[error("budget must be non-negative and finite, got {value} at round {round}")]
    InvalidBudget { round: usize, value: f64 },

    #[error("no-budget round {round} reached before any policy snapshot exists")]
    NoSnapshot { round: usize },

    #[error("reward {reward} outside [0, 1]")]
    RewardOutOfRange { reward: f64 },

    #[error("design matrix is not positive definite")]
    SingularDesign,

    #[error("query budget exceeded at round {round}: used {used} > available {available}")]
    BudgetViolation { round: usize, used: f64, available: f64 },

    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
