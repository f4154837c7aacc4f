use thiserror::Error;

/// Every failure surfaced by parsing, translation, or evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    NTriples { line: usize, message: String },

    #[error("syntax error at offset {position}: expected {expected}, found {found}")]
    Syntax {
        position: usize,
        expected: String,
        found: String,
    },

    #[error("unsupported feature: {0}")]
    Unsupported(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("predicate <{0}> is neither a relationship type nor a property key")]
    UnknownPredicate(String),

    #[error("predicates used with both literal and resource objects: {}", .0.join(", "))]
    MixedPredicate(Vec<String>),

    #[error("invalid catalog: {0}")]
    InvalidCatalog(String),

    #[error("FILTER references unbound variable ?{0}")]
    UnboundFilterVariable(String),

    #[error("UNION arms return {left} and {right} columns")]
    UnunifiableUnion { left: usize, right: usize },

    #[error("relationships {0} and {1} have the same type and endpoints")]
    AmbiguousRelationship(String, String),

    #[error("reference to unbound name `{0}`")]
    UnboundName(String),

    #[error("invalid RDF term: {0}")]
    InvalidTerm(String),

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
