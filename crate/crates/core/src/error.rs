use std::fmt;

use crate::exact::FieldSpec;
use crate::graded::DegreeBox;

/// A single problem found while validating a presentation.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Diagnostic {
    /// JSON-pointer style location of the offending item, e.g. `/differential/x`.
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn join(diags: &[Diagnostic]) -> String {
    diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch { left: FieldSpec, right: FieldSpec },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not a complex: {0}")]
    NotAComplex(String),
    #[error("non-connective generator `{0}`")]
    NonConnective(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failed: {}", join(.0))]
    Validation(Vec<Diagnostic>),
    #[error("resource limit exceeded: {message}")]
    Resource {
        message: String,
        /// Largest sub-box that was fully computed before the limit was hit.
        completed: Option<DegreeBox>,
    },
    #[error("non-tabulable localization: {0}")]
    NonTabulable(String),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
