use thiserror::Error;

use crate::logic::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input text or files.
    Input,
    /// Well-formed input that violates a semantic precondition.
    Domain,
    /// An enumeration cap or step budget was exceeded.
    Resource,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid atom name `{0}`")]
    InvalidAtom(String),

    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),

    #[error("atom `{atom}` is not declared in the signature")]
    UndeclaredAtom { atom: String },

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("signature has {atoms} atoms, above the enumeration cap of {cap}")]
    AtomCap { atoms: usize, cap: usize },

    #[error("{what} has {size} entries, above the exhaustive search cap of {cap}")]
    SubsetCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("search budget of {0} steps exhausted")]
    BudgetExhausted(u64),

    #[error("inconsistent knowledge base: {0}")]
    Inconsistent(String),

    #[error("unsatisfiable formula: {0}")]
    Unsatisfiable(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown action `{0}`")]
    UnknownAction(String),

    #[error("name `{0}` is reserved for goal markers")]
    ReservedName(String),

    #[error("name `{0}` is used both as a fluent and as an action")]
    NameCollision(String),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("model does not satisfy `{0}`")]
    ModelMismatch(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse(_)
            | Error::InvalidAtom(_)
            | Error::Schema { .. }
            | Error::DuplicateLabel(_)
            | Error::UndeclaredAtom { .. } => ErrorKind::Input,
            Error::AtomCap { .. } | Error::SubsetCap { .. } | Error::BudgetExhausted(_) => {
                ErrorKind::Resource
            }
            _ => ErrorKind::Domain,
        }
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}
