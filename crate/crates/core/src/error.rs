use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical input outside the model's domain (zero separation, zero rates, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("frequency grid does not cover the cascade lines: {0}")]
    GridCoverage(String),

    #[error("integrator failure at t = {t:.6e}: {reason}")]
    Integrator { t: f64, reason: String },

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
