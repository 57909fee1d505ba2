//! Spec-document parsing, command orchestration and report rendering for
//! the `amalgam` binary.

pub mod commands;
pub mod document;
pub mod report;

use amalgam_core::Error;
use thiserror::Error as ThisError;

pub use commands::{run, Command, Options, Outcome};
pub use document::{load_path, LoadedSpec, SpecDocument};
pub use report::{Check, Report};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("computation failed: {0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::Failed(_) => EXIT_CHECK_FAILED,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Budget(m) | CliError::Failed(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::OrderTooLarge { .. } | Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            Error::SymbolicFactor(_) | Error::InvalidWeights(_) | Error::Descriptor(_) => CliError::Parse(e.to_string()),
            e => CliError::Failed(e.to_string()),
        }
    }
}
