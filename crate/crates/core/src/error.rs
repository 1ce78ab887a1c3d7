use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Conditioning on an outcome that has zero probability.
    #[error("unreachable outcome: {0}")]
    UnreachableOutcome(String),

    /// A conditioned ratio has an empty denominator.
    #[error("no events pass the selection: {0}")]
    NoEventsPass(String),

    #[error("cutoff too small: leakage {leakage:.3e} exceeds {bound:.1e}")]
    CutoffTooSmall { leakage: f64, bound: f64 },

    /// Two tables or states do not share an index structure.
    #[error("structural mismatch: {0}")]
    Structural(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
