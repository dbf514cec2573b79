//! Errors carrying the process exit code.

use std::fmt;

use dimerwave::linear::LinearError;
use dimerwave::operator::OperatorError;
use dimerwave::solver::SolverError;
use dimerwave::spectral::SpectralError;
use dimerwave::symmetry::SymmetryError;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: EXIT_CONFIG, message: message.into() }
    }

    pub fn nonconvergence(message: impl Into<String>) -> Self {
        Self { code: EXIT_NONCONVERGENCE, message: message.into() }
    }

    pub fn verification(message: impl Into<String>) -> Self {
        Self { code: EXIT_VERIFICATION, message: message.into() }
    }

    /// Prefixes the message with the config field responsible for it.
    pub fn context(mut self, field: &str) -> Self {
        self.message = format!("{field}: {}", self.message);
        self
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::GridTooSmall { .. } => Self::config(format!("numerics.grid: {e}")),
            _ => Self::verification(e.to_string()),
        }
    }
}

/// Input problems are config errors; failed internal certifications are verification failures.
impl From<LinearError> for CliError {
    fn from(e: LinearError) -> Self {
        match e {
            LinearError::Subsonic { .. } => Self::config(format!("task.c: {e}")),
            LinearError::Spectral(s) => s.into(),
            _ => Self::verification(e.to_string()),
        }
    }
}

impl From<OperatorError> for CliError {
    fn from(e: OperatorError) -> Self {
        match e {
            OperatorError::Subsonic { .. } => Self::config(format!("task.c: {e}")),
            OperatorError::GridTooSmall { .. } => Self::config(format!("numerics.grid: {e}")),
            OperatorError::EmptyTruncation => Self::config(format!("numerics.n: {e}")),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Config { .. } => Self::config(format!("numerics: {e}")),
            SolverError::AboveCap { .. } => Self::config(e.to_string()),
            SolverError::NotConverged { .. } | SolverError::Rejected { .. } => Self::nonconvergence(e.to_string()),
            SolverError::Linear(l) => l.into(),
            SolverError::Spectral(s) => s.into(),
            SolverError::Operator(o) => o.into(),
        }
    }
}

impl From<SymmetryError> for CliError {
    fn from(e: SymmetryError) -> Self {
        match e {
            SymmetryError::Mismatch { .. } => Self::config(format!("task.symmetry: {e}")),
            _ => Self::verification(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_failure_kind() {
        let above: CliError = SolverError::AboveCap { a: 1.0, cap: 0.1 }.into();
        assert_eq!(above.code, EXIT_CONFIG);
        assert!(above.message.contains("amplitude above configured cap"));
        let stuck: CliError = SolverError::NotConverged { a: 0.1, iterations: 3, last: 1.0, history: vec![] }.into();
        assert_eq!(stuck.code, EXIT_NONCONVERGENCE);
        let sub: CliError = LinearError::Subsonic { c: 0.1, c_star: 1.0 }.into();
        assert!(sub.code == EXIT_CONFIG && sub.message.starts_with("task.c"));
        let internal: CliError = LinearError::RootResidual { residual: 1.0 }.into();
        assert_eq!(internal.code, EXIT_VERIFICATION);
    }
}
