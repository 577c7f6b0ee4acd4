//! CLI error carrying a machine-parseable code.
//!
//! Every failure path prints exactly one line to stderr of the form
//! `error[CODE]: message` and exits nonzero.

use std::fmt;

#[derive(Debug)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn spec(message: impl Into<String>) -> Self {
        Self::new("E_SPEC", message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new("E_IO", message)
    }

    pub fn flag(message: impl Into<String>) -> Self {
        Self::new("E_FLAG", message)
    }

    pub fn run(message: impl Into<String>) -> Self {
        Self::new("E_RUN", message)
    }

    pub fn eval(message: impl Into<String>) -> Self {
        Self::new("E_EVAL", message)
    }

    pub fn log(message: impl Into<String>) -> Self {
        Self::new("E_LOG", message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.code, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e.to_string())
    }
}

impl From<vfcb::fedsim::FedsimError> for CliError {
    fn from(e: vfcb::fedsim::FedsimError) -> Self {
        CliError::run(e.to_string())
    }
}

impl From<vfcb::envs::EnvError> for CliError {
    fn from(e: vfcb::envs::EnvError) -> Self {
        CliError::eval(e.to_string())
    }
}

impl From<vfcb::io::IoError> for CliError {
    fn from(e: vfcb::io::IoError) -> Self {
        CliError::log(e.to_string())
    }
}

impl From<vfcb::costs::CostError> for CliError {
    fn from(e: vfcb::costs::CostError) -> Self {
        CliError::run(e.to_string())
    }
}

impl From<vfcb::o3m::O3mError> for CliError {
    fn from(e: vfcb::o3m::O3mError) -> Self {
        CliError::run(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
