use thiserror::Error;

#[derive(Debug, Error)]
pub enum EconError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("unknown column {0}")]
    UnknownColumn(String),
    #[error("column {column}: {reason}")]
    BadColumn { column: String, reason: String },
    #[error("invalid specification: {0}")]
    Spec(String),
    #[error("no observations left after dropping {dropped}")]
    NoObservations { dropped: usize },
    #[error("no convergence after {iterations} iterations (last change {change:e})")]
    NonConvergence { iterations: usize, change: f64 },
    #[error("fixed-effect absorption did not converge after {iterations} sweeps")]
    AbsorptionNonConvergence { iterations: usize },
    #[error("regressor {0} separates zero from positive outcomes")]
    Separation(String),
    #[error("regressor {0} is perfectly collinear with the fixed effects or other regressors")]
    Collinear(String),
    #[error("logit outcome is perfectly predicted")]
    PerfectPrediction,
    #[error("clustered errors need at least two clusters, got {0}")]
    SingleCluster(usize),
    #[error("null model log-likelihood is zero; pseudo R-squared undefined")]
    DegenerateNull,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("nothing to report")]
    EmptyResults,
}

pub type Result<T, E = EconError> = std::result::Result<T, E>;
