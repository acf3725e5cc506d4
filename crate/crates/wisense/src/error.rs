//! Crate-wide error type.

use std::fmt;
use std::io;

/// Errors produced by the sensing pipeline.
#[derive(Debug)]
pub enum Error {
    /// A precondition on an argument was violated.
    InvalidArgument(String),
    /// An index was outside the dimensions of a frame or trace.
    IndexOutOfRange(String),
    /// The binary log stream could not be parsed; `offset` is the byte
    /// position of the offending record.
    ParseLog { offset: usize, message: String },
    /// A record inside the binary log violated its own length or layout
    /// invariants; `offset` is the byte position of the record body.
    MalformedRecord { offset: usize, message: String },
    /// A text artifact (trace, manifest, model, config) could not be parsed;
    /// `line` is 1-based.
    ParseText { line: usize, message: String },
    /// Feature layouts of two vectors or datasets disagree.
    LayoutMismatch(String),
    Io(io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::IndexOutOfRange(msg) => write!(f, "index out of range: {msg}"),
            Error::ParseLog { offset, message } => {
                write!(f, "log parse error at byte {offset}: {message}")
            }
            Error::MalformedRecord { offset, message } => {
                write!(f, "malformed record at byte {offset}: {message}")
            }
            Error::ParseText { line, message } => {
                write!(f, "parse error at line {line}: {message}")
            }
            Error::LayoutMismatch(msg) => write!(f, "feature layout mismatch: {msg}"),
            Error::Io(err) => write!(f, "io error: {err}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(err: io::Error) -> Self {
        Error::Io(err)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
