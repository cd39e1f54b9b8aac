use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The Mittag-Leffler evaluator could not reach the requested accuracy.
    #[error("Mittag-Leffler evaluation did not converge for x = {x} (alpha = {alpha}, beta = {beta}, gamma = {gamma}); estimated error {estimate:e}")]
    NonConvergence {
        alpha: f64,
        beta: f64,
        gamma: f64,
        x: f64,
        estimate: f64,
    },

    /// Enumeration-based pmf forms are refused beyond the configured cap.
    #[error("method `{method}` enumerates partitions and is capped at n_max = {cap} (requested {requested})")]
    EnumerationCap {
        method: &'static str,
        cap: usize,
        requested: usize,
    },

    /// The requested method does not apply to the process.
    #[error("method `{method}` is not available for {process}")]
    MethodUnavailable {
        method: &'static str,
        process: &'static str,
    },

    /// Asymptotic covariance formulas need t / s above a threshold.
    #[error("asymptotic regime requires t/s >= {threshold} (got {ratio})")]
    AsymptoticThreshold { threshold: f64, ratio: f64 },

    /// Not enough usable bins for a goodness-of-fit test.
    #[error("goodness-of-fit needs at least two bins after pooling (got {0})")]
    DegreesOfFreedom(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
