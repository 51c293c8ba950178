use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid signature: {0}")]
    Signature(String),
    #[error("position {0} is not a position of the term")]
    InvalidPosition(String),
    #[error("positions {0} and {1} are comparable")]
    ComparablePositions(String, String),
    #[error("pattern {0} is a subterm of pattern {1}")]
    NestedPatterns(String, String),
    #[error("variable x{0} is unbound")]
    UnboundVariable(u32),
    #[error("no operation table for `{0}`")]
    MissingTable(String),
    #[error("invalid algebra: {0}")]
    Algebra(String),
    #[error("invalid theory: {0}")]
    Theory(String),
    #[error("term uses symbols outside the theory signature: {0}")]
    SignatureMismatch(String),
    #[error("term {0} has no variables")]
    NoVariables(String),
    #[error("oracle could not decide {0}")]
    UnknownVerdict(String),
    #[error("invalid proof script: {0}")]
    ProofSyntax(String),
    #[error("invalid hypersubstitution: {0}")]
    Hyper(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
