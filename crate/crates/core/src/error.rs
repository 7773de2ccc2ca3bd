use thiserror::Error;

/// Errors surfaced by construction, validation and numeric front-ends.
///
/// Numeric indeterminacy (e.g. a tail moment that cannot be certified) is not
/// an error: it is encoded in result types such as
/// [`crate::levy_measure::TailMoment::Indeterminate`].
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;

impl CoreError {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        CoreError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
