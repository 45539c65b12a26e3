use std::fmt;
use std::io;

/// Crate-wide error type.
#[derive(Debug)]
pub enum Error {
    /// A text input (edge list, membership file, LFR pair) could not be parsed.
    /// Line numbers are 1-based.
    Parse { line: usize, message: String },
    Io(io::Error),
    /// Modularity is undefined on a graph without edges.
    EdgelessGraph,
    /// A configuration value is outside its documented range.
    InvalidConfig(String),
    /// Inputs are structurally inconsistent (mismatched node sets, bad indices, ...).
    Data(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::Io(e) => write!(f, "i/o error: {e}"),
            Error::EdgelessGraph => write!(f, "modularity is undefined for a graph with no edges"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::Data(msg) => write!(f, "data error: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(e: io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
