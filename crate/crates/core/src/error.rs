use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The forward Wright-Fisher run did not fix within its budget of binomial draws.
    #[error("no fixation within {budget} generations")]
    GenerationBudgetExceeded { budget: u64 },

    #[error("no fixation within {budget} Euler steps")]
    StepBudgetExceeded { budget: u64 },

    #[error("frequency path is incomplete: {0}")]
    IncompletePath(String),

    #[error("frequency path violates its invariants: {0}")]
    InvalidPath(String),

    #[error("coalescent state invariant violated: {0}")]
    InvariantViolation(String),

    #[error("Kingman tail requires an empty beneficial background, found {0} block(s)")]
    BeneficialNotEmpty(usize),

    #[error("sample of {requested} lines requested from {available}")]
    SampleTooLarge { requested: usize, available: usize },

    #[error("level interval ({from}, {to}) is reversed")]
    ReversedLevels { from: usize, to: usize },

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}")]
    QuadratureNonConvergence { estimate: f64, error: f64 },

    #[error("expected fixation time diverges for theta = 0")]
    DivergentExpectation,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{failed} of {total} replicates failed (first: {first})")]
    ReplicateFailures { failed: usize, total: usize, first: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}
