//! Command implementations behind the `collatz` binary. Each command
//! returns its stdout text so it can be exercised without a process.

pub mod reference;
pub mod report;
pub mod svg;
pub mod verify;

use std::fmt;

use collatz_perm::{Error, TraceType, DEFAULT_GUARD};
use num_bigint::BigUint;

/// A failed command: process exit code plus one diagnostic line.
#[derive(Debug, Clone, PartialEq, Eq)]
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
        CliError::new(exit::USAGE, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub mod exit {
    pub const FAILED_CHECK: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const GUARD: i32 = 3;
    pub const OUTPUT: i32 = 4;
    pub const CHECKPOINT: i32 = 5;
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::GuardExceeded { .. } => exit::GUARD,
            Error::Checkpoint(_) => exit::CHECKPOINT,
            Error::Io(_) => exit::OUTPUT,
            _ => exit::USAGE,
        };
        CliError::new(code, e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Parses a type word; `-` spells the empty type.
pub fn parse_type(word: &str) -> CliResult<TraceType> {
    let word = if word == "-" { "" } else { word };
    word.parse()
        .map_err(|e: Error| CliError::usage(format!("invalid type {word:?}: {e}")))
}

pub fn parse_start(s: &str) -> CliResult<BigUint> {
    match s.parse::<BigUint>() {
        Ok(x) if x > BigUint::from(0u32) => Ok(x),
        _ => Err(CliError::usage(format!(
            "invalid start value {s:?}: expected a positive decimal integer"
        ))),
    }
}

/// Iteration guard, overridable through `COLLATZ_GUARD`.
pub fn guard_from_env() -> CliResult<u64> {
    match std::env::var("COLLATZ_GUARD") {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .ok()
            .filter(|&g| g > 0)
            .ok_or_else(|| {
                CliError::usage(format!("COLLATZ_GUARD={v:?} is not a positive integer"))
            }),
        Err(_) => Ok(DEFAULT_GUARD),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type_parsing() {
        assert_eq!(parse_type("-").unwrap(), TraceType::empty());
        assert_eq!(parse_type("uddud").unwrap().to_string(), "uddud");
        assert_eq!(parse_type("uu").unwrap_err().code, exit::USAGE);
    }

    #[test]
    fn start_parsing() {
        assert_eq!(parse_start("12").unwrap(), BigUint::from(12u32));
        assert!(parse_start("0").is_err());
        assert!(parse_start("-3").is_err());
        assert!(parse_start("abc").is_err());
    }

    #[test]
    fn error_codes() {
        let e: CliError = Error::PowerOfTwoStart("16".into()).into();
        assert_eq!(e.code, exit::USAGE);
        let e: CliError = Error::GuardExceeded {
            start: "27".into(),
            guard: 3,
        }
        .into();
        assert_eq!(e.code, exit::GUARD);
        let e: CliError = Error::Checkpoint("bad".into()).into();
        assert_eq!(e.code, exit::CHECKPOINT);
    }
}
