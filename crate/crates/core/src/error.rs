use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration: {0}")]
    Config(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("integration failed at t={t:.6e} (xi={xi:?}, h={h:.3e}): {msg}")]
    Integration {
        t: f64,
        xi: Option<f64>,
        h: f64,
        msg: String,
    },
    #[error("aliasing guard: {fraction:.3e} of mass above 0.9 Nyquist")]
    Aliasing { fraction: f64 },
    #[error("instability: {0}")]
    Instability(String),
    #[error("smallness guard refused: {0}")]
    Guard(String),
    #[error("no convergence: {0}")]
    NotConverged(String),
    #[error("inconsistency: {0}")]
    Inconsistency(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Attach a frequency to an integration failure.
    pub fn at_xi(self, xi: f64) -> Self {
        match self {
            Error::Integration { t, h, msg, .. } => Error::Integration {
                t,
                xi: Some(xi),
                h,
                msg,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
