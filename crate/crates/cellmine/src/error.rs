//! Crate-wide error type.

use thiserror::Error;

/// Errors produced while parsing inputs, building graphs, or emitting artifacts.
#[derive(Debug, Error)]
pub enum Error {
    /// Syntax or semantic error in an input file, with a 1-based line number.
    #[error("{file}:{line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },

    /// A netlist references a cell the library does not define.
    #[error("unknown cell type `{0}`")]
    UnknownCell(String),

    /// A connection names a pin the cell does not have.
    #[error("cell `{cell}` has no pin `{pin}`")]
    UnknownPin { cell: String, pin: String },

    /// Two drivers contend for one net.
    #[error("net `{net}` has multiple drivers ({first} and {second})")]
    MultipleDrivers {
        net: String,
        first: String,
        second: String,
    },

    /// Operation requires a flattened netlist but the model still instantiates submodels.
    #[error("model `{0}` is not flat; flatten the hierarchy first")]
    NotFlat(String),

    /// Invalid configuration value (bad area-model parameter, zero pattern size, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A merge needs a cell's transistor-level subcircuit but the library has none.
    #[error("cell `{0}` has no SPICE body in the library")]
    MissingSpice(String),

    /// An external helper command failed or produced unusable output.
    #[error("external command failed: {0}")]
    External(String),

    /// An input or output file could not be read or written.
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Internal consistency violation; indicates a bug, not bad input.
    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Shorthand for a parse error at a known line.
    pub fn parse(file: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            msg: msg.into(),
        }
    }

    /// Shorthand for an I/O error tied to a named file.
    pub fn file(path: impl std::fmt::Display, source: std::io::Error) -> Self {
        Error::File {
            path: path.to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
