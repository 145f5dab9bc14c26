//! Scenario definitions, output formats and the run driver for `leapfrog-core`.

use std::path::Path;

pub mod config;
pub mod convergence;
pub mod driver;
pub mod io;
pub mod scenarios;

pub use config::ScenarioConfig;
pub use driver::{run, run_with, RunOptions, RunStatus, RunSummary};
pub use scenarios::{convergence_study, mode_i, mode_ii, Simulation};

/// Errors of the driver, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] leapfrog_core::Error),
}

impl SimError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        SimError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 2 for configuration problems, 3 for a blow-up, 4 when the step-size
    /// estimate fails, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use leapfrog_core::Error as E;
        match self {
            SimError::Config(_) => 2,
            SimError::Core(E::Config(_) | E::Dimension { .. }) => 2,
            SimError::Core(E::BlowUp { .. }) => 3,
            SimError::Core(E::Estimation { .. }) => 4,
            SimError::Core(E::Process { .. }) | SimError::Io { .. } => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        use leapfrog_core::Error as E;
        assert_eq!(SimError::Config("x".into()).exit_code(), 2);
        assert_eq!(SimError::Core(E::Config("x".into())).exit_code(), 2);
        let blow = E::BlowUp {
            step: 3,
            field: "velocity",
            magnitude: f64::INFINITY,
        };
        assert_eq!(SimError::Core(blow).exit_code(), 3);
        let est = E::Estimation {
            iterations: 5,
            bracket: (1.0, 2.0),
        };
        assert_eq!(SimError::Core(est).exit_code(), 4);
    }
}
