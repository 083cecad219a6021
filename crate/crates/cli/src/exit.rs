//! Exit codes and the error type carrying them.

use std::fmt;

use solwave_core::Error;

pub const OK: i32 = 0;
pub const FAILURE: i32 = 1;
pub const USAGE: i32 = 2;
pub const BLOCKED: i32 = 3;
pub const NO_CONVERGENCE: i32 = 4;
pub const VERIFY_FAILED: i32 = 5;
pub const SWEEP_FAILED: i32 = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> CliError {
        CliError { code, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> CliError {
        CliError::new(USAGE, message)
    }

    pub fn io(path: &std::path::Path, e: impl fmt::Display) -> CliError {
        CliError::new(FAILURE, format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        let code = match &e {
            Error::InvalidGrid(_)
            | Error::GridMismatch
            | Error::InvalidField(_)
            | Error::NegativeOrder(_)
            | Error::PhaseWrap { .. }
            | Error::InfeasibleStart
            | Error::Precondition(_)
            | Error::Parse(_) => USAGE,
            Error::NoConvergence { .. }
            | Error::PositiveEnergyStall
            | Error::DivergentFactor { .. }
            | Error::NotLocalized { .. } => NO_CONVERGENCE,
            _ => FAILURE,
        };
        CliError::new(code, e.to_string())
    }
}
