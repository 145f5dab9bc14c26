use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// A non-finite or oversized value appeared; almost always a CFL violation.
    #[error("numerical blow-up at step {step} in field `{field}` (|value| = {magnitude:e}); the time step probably violates the CFL bound")]
    BlowUp {
        step: u64,
        field: &'static str,
        magnitude: f64,
    },

    #[error("internal process failed at step {step}: {reason}")]
    Process { step: u64, reason: String },

    /// The eigenvalue iteration did not settle; `bracket` holds the last two estimates.
    #[error("CFL estimation did not converge after {iterations} iterations (last estimates {bracket:?})")]
    Estimation { iterations: usize, bracket: (f64, f64) },
}
