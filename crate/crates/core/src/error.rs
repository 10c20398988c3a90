use thiserror::Error;

/// Errors raised by the distribution and inference routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The sample cannot support the requested statistic (e.g. zero variance).
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// The design matrix is rank deficient.
    #[error("singular design: {0}")]
    SingularDesign(String),

    /// Hyperparameters do not describe a proper distribution.
    #[error("improper posterior: {0}")]
    ImproperPosterior(String),

    /// An iterative method failed to converge or bracket.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Bad simulation plan or procedure selector.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
