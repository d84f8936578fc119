use thiserror::Error;

/// Errors raised by scoring, model construction and the simulation harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {point:?} is not interior to the density support ({support})")]
    PointOutsideSupport { point: Vec<f64>, support: String },

    #[error("density is not twice differentiable on its support: {0}")]
    NonSmoothDensity(String),

    #[error("model has discrete support, the Hyvarinen score is undefined: {0}")]
    DiscreteSupport(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("prior covariance is not symmetric positive definite")]
    NonSPDPrior,

    #[error("design matrix is rank deficient (rank < {p} columns)")]
    RankDeficientDesign { p: usize },

    #[error("improper prior has no marginal mass; the marginal likelihood is undefined")]
    ImproperPriorHasNoMarginalMass,

    #[error("improper prior needs more than {p} observations before the first proper predictive (got {n})")]
    InsufficientBurnIn { n: usize, p: usize },

    #[error("observation {index} ({value}) lies outside the model support")]
    OutOfSupport { index: usize, value: f64 },

    #[error("at step {index}: {source}")]
    AtStep {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("no candidate models supplied")]
    EmptyCandidates,

    #[error("slope fit is degenerate: {0}")]
    DegenerateFit(String),
}

impl Error {
    /// Strips `AtStep` wrappers and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
