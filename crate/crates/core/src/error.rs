use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A function produced a non-finite value.
    #[error("evaluation error at {point:?}: {message}")]
    Evaluation { point: Vec<f64>, message: String },

    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),

    #[error("variable x{index} out of range for arity {arity}")]
    VariableOutOfRange { index: usize, arity: usize },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn evaluation(point: Vec<f64>, message: impl Into<String>) -> Self {
        Error::Evaluation {
            point,
            message: message.into(),
        }
    }

    /// True for parse-time errors (as opposed to numerical failures).
    pub fn is_syntax(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. } | Error::UnknownIdentifier(_) | Error::VariableOutOfRange { .. }
        )
    }
}
