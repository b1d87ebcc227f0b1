use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the region where the operation is defined.
    #[error("{key}: {reason}")]
    Domain { key: &'static str, reason: String },

    /// Storing full paths would exceed the configured budget.
    #[error("path_budget: {requested} stored values exceed the budget of {budget}")]
    Resource { requested: u128, budget: u128 },
}

impl Error {
    pub(crate) fn domain(key: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            key,
            reason: reason.into(),
        }
    }

    /// The offending key, used for `error: <key>: <reason>` diagnostics.
    pub fn key(&self) -> &'static str {
        match self {
            Error::Domain { key, .. } => key,
            Error::Resource { .. } => "path_budget",
        }
    }
}

pub(crate) fn ensure_finite(key: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(key, format!("must be finite, got {v}")))
    }
}

pub(crate) fn ensure_non_negative(key: &'static str, v: f64) -> Result<f64> {
    ensure_finite(key, v)?;
    if v < 0.0 {
        return Err(Error::domain(key, format!("must be non-negative, got {v}")));
    }
    Ok(v)
}
