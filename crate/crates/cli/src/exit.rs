use std::fmt;
use std::io;

use greenkern::Error;

/// Process exit codes. Stable; listed in the README.
pub mod code {
    pub const OK: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const INADMISSIBLE: i32 = 2;
    pub const GRID_FAILURE: i32 = 3;
    pub const ILL_CONDITIONED: i32 = 4;
    pub const MALFORMED_DATA: i32 = 5;
    pub const USAGE: i32 = 64;
    pub const BAD_SPEC: i32 = 65;
    pub const MISSING_FILE: i32 = 66;
    pub const IO: i32 = 74;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(code::USAGE, message)
    }

    pub fn bad_spec(message: impl Into<String>) -> Self {
        Self::new(code::BAD_SPEC, message)
    }

    pub fn malformed(message: impl Into<String>) -> Self {
        Self::new(code::MALFORMED_DATA, message)
    }

    /// Wraps a library error raised while handling `context`.
    pub fn from_lib(context: &str, e: Error) -> Self {
        let code = match &e {
            Error::Inadmissible(_) => code::INADMISSIBLE,
            Error::Grid(_) | Error::BoundaryDecay { .. } | Error::RouteMismatch { .. } => {
                code::GRID_FAILURE
            }
            Error::IllConditioned { .. } => code::ILL_CONDITIONED,
            Error::DuplicatePoints { .. } | Error::Malformed(_) | Error::DimensionMismatch { .. } => {
                code::MALFORMED_DATA
            }
            Error::InvalidParameter(_)
            | Error::EmptyOperator
            | Error::NoSpectralDensity(_)
            | Error::Json(_) => code::BAD_SPEC,
            Error::Unknown { .. } => code::USAGE,
            Error::Io(io) if io.kind() == io::ErrorKind::NotFound => code::MISSING_FILE,
            Error::Io(_) => code::IO,
        };
        CliError::new(code, format!("{context}: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub trait Context<T> {
    fn context(self, what: &str) -> CliResult<T>;
}

impl<T> Context<T> for greenkern::Result<T> {
    fn context(self, what: &str) -> CliResult<T> {
        self.map_err(|e| CliError::from_lib(what, e))
    }
}
