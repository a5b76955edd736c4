use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the supported domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value is missing, malformed or inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A matrix or vector had the wrong shape for the requested operation.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: String, found: String },

    /// Grid refinement did not settle within the allowed number of doublings.
    #[error("quadrature did not converge: best estimate {value:e}, last relative change {rel_change:e}")]
    NotConverged { value: f64, rel_change: f64 },

    /// Too many Monte Carlo trials landed where an approximate evaluator flags degraded accuracy.
    #[error("{flagged} of {trials} trials hit degraded-accuracy evaluations (limit 0.1%); set the override to proceed")]
    DegradedTrials { flagged: u64, trials: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
