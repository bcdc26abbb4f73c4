use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("malformed XML at byte offset {offset}: {message}")]
    Xml { offset: u64, message: String },

    #[error("{context}, line {line}: {message}")]
    Parse {
        context: String,
        line: usize,
        message: String,
    },

    #[error("duplicate title {title:?} in the {lang} collection")]
    DuplicateTitle { lang: String, title: String },

    #[error("mixed languages in one collection: expected {expected}, found {found}")]
    MixedLanguages { expected: String, found: String },

    #[error("empty sentence")]
    EmptySentence,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty document")]
    EmptyDocument,

    #[error("document of {rows}x{cols} sentences exceeds the {max_rows}x{max_cols} limit; split it into smaller documents")]
    OversizeDocument {
        rows: usize,
        cols: usize,
        max_rows: usize,
        max_cols: usize,
    },

    #[error("non-finite training loss at epoch {epoch}; lower the learning rate or raise lambda")]
    NonFiniteLoss { epoch: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not enough data: {0}")]
    NotEnoughData(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(context: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            line,
            message: message.into(),
        }
    }
}
