use std::fmt;

use thiserror::Error;

/// Position-tagged syntax error from the formula parser.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input where the problem was detected.
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    UnbalancedParen,
    DanglingOperator(String),
    ReservedWord(String),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => {
                write!(f, "unexpected character {c:?} at {}", self.position)
            }
            ParseErrorKind::UnexpectedToken(t) => {
                write!(f, "unexpected token `{t}` at {}", self.position)
            }
            ParseErrorKind::UnexpectedEnd => {
                write!(f, "unexpected end of input at {}", self.position)
            }
            ParseErrorKind::UnbalancedParen => {
                write!(f, "unbalanced parenthesis at {}", self.position)
            }
            ParseErrorKind::DanglingOperator(op) => {
                write!(f, "operator `{op}` at {} has no operand", self.position)
            }
            ParseErrorKind::ReservedWord(w) => {
                write!(
                    f,
                    "reserved word `{w}` cannot be used here (at {})",
                    self.position
                )
            }
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error: {0}")]
    Parse(#[from] ParseError),
    #[error("invalid subset space: {0}")]
    InvalidSpace(String),
    #[error("not a topology")]
    NotATopology,
    #[error("unknown atom {0}")]
    UnknownAtom(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("search bound violated: {0}")]
    Bound(String),
    /// A property that must hold by construction failed to hold.
    #[error("internal consistency failure: {0}")]
    Inconsistency(String),
    #[error("model document: {0}")]
    Document(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
