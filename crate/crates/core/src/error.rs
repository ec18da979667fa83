use alloc::string::String;
use core::fmt;

/// Error type shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Input lies outside the mathematical domain of the operation.
    Domain(String),
    /// Input exceeds a documented capacity ceiling, or an exact computation
    /// would overflow its integer width.
    Capacity(String),
    /// The pattern covers every residue class modulo `witness`, so it admits
    /// at most finitely many prime tuples.
    Inadmissible { witness: u64 },
    /// Text input could not be parsed; `position` is a byte offset.
    Parse { position: usize, message: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Capacity(msg) => write!(f, "capacity exceeded: {msg}"),
            Error::Inadmissible { witness } => {
                write!(f, "inadmissible: covers residues mod {witness}")
            }
            Error::Parse { position, message } => {
                write!(f, "parse error at byte {position}: {message}")
            }
        }
    }
}

impl core::error::Error for Error {}
