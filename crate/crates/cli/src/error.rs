use thiserror::Error;

/// Every failure carries the offending key; the binary prints
/// `error: <key>: <reason>` and exits with [`CliError::exit_code`].
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{key}: {reason}")]
    Config { key: String, reason: String },

    #[error("{key}: {reason}")]
    Domain { key: String, reason: String },

    #[error("validate: {failed} of {total} comparisons failed")]
    ValidationFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ValidationFailed { .. } => 1,
            CliError::Config { .. } => 2,
            CliError::Domain { .. } => 3,
        }
    }

    /// Model errors raised while building parameters from a config are
    /// configuration errors; keys are reported with their config prefix.
    pub(crate) fn from_model(err: hka_credit::Error) -> Self {
        let key = err.key();
        let key = if key.starts_with("lambda") {
            format!("model.{key}")
        } else {
            key.to_string()
        };
        CliError::Config {
            key,
            reason: reason_of(&err),
        }
    }
}

fn reason_of(err: &hka_credit::Error) -> String {
    match err {
        hka_credit::Error::Domain { reason, .. } => reason.clone(),
        other => other.to_string(),
    }
}

impl From<hka_credit::Error> for CliError {
    fn from(err: hka_credit::Error) -> Self {
        let key = err.key().to_string();
        let reason = reason_of(&err);
        match err {
            hka_credit::Error::Resource { .. } => CliError::Config { key, reason },
            hka_credit::Error::Domain { .. } => CliError::Domain { key, reason },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
