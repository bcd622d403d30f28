use thiserror::Error;

use crate::position::Position;

/// Errors produced while reading terms, positions and signature files.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown symbol `{name}` at offset {offset}")]
    UnknownSymbol { name: String, offset: usize },
    #[error("symbol `{name}` at offset {offset} has arity {expected}, found {found} arguments")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
        offset: usize,
    },
    #[error("wildcard not allowed at offset {offset}")]
    WildcardForbidden { offset: usize },
    #[error("signature line {line}: {message}")]
    Signature { line: usize, message: String },
}

impl ParseError {
    /// Byte offset of the error within the parsed text, when there is one.
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownSymbol { offset, .. }
            | ParseError::ArityMismatch { offset, .. }
            | ParseError::WildcardForbidden { offset } => Some(*offset),
            ParseError::Signature { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("position {0} is outside the term domain")]
    OutsideDomain(Position),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternSetError {
    #[error("pattern set is empty")]
    Empty,
    #[error("pattern {index} is the bare wildcard")]
    BareWildcard { index: usize },
    #[error("pattern {index} duplicates pattern {first}")]
    Duplicate { index: usize, first: usize },
    #[error("pattern {index}: {source}")]
    Parse {
        index: usize,
        #[source]
        source: ParseError,
    },
    #[error("line {line}: {source}")]
    Line {
        line: usize,
        #[source]
        source: ParseError,
    },
    #[error("pattern {index} uses a symbol outside the signature")]
    ForeignSymbol { index: usize },
}

/// A construction invariant failed. These indicate a bug, never bad input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("position {position} does not extend class prefix {prefix}")]
    NotBelowPrefix { position: Position, prefix: Position },
    #[error("lifted class has no root goal")]
    NoRootGoalInClass,
    #[error("state {state}: {message}")]
    State { state: usize, message: String },
    #[error("cannot lift an empty goal class")]
    EmptyClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error("state limit of {0} exceeded")]
    StateLimit(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("subject symbol `{0}` is not in the automaton signature")]
    UnknownSymbol(String),
    #[error("inspection position {pointer}.{label} is outside the subject domain")]
    OutsideDomain { pointer: Position, label: Position },
    #[error("subject contains a wildcard")]
    OpenSubject,
    #[error("evaluation worker panicked")]
    WorkerPanic,
}

#[derive(Debug, Error)]
pub enum SerialError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported automaton version {found}, expected {expected}")]
    Version { found: u64, expected: u64 },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
}

impl SerialError {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> SerialError {
        SerialError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}
