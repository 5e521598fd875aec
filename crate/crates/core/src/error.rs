use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("{which} is undefined for ({x}, {y})")]
    Partiality {
        x: String,
        y: String,
        which: &'static str,
    },

    #[error("axiom violated: {0}")]
    Axiom(String),

    #[error("move not applicable: {0}")]
    Precondition(String),

    #[error("invalid diagram: {0}")]
    Diagram(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
