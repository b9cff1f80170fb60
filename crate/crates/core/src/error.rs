use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("photon-number cutoff {cutoff} exceeded: {detail}")]
    CutoffOverflow { cutoff: usize, detail: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("mode {mode} out of range for a {num_modes}-mode space")]
    ModeOutOfRange { mode: usize, num_modes: usize },

    #[error("invalid mode selection: {0}")]
    InvalidModes(String),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("state is not normalized (trace or norm² = {0})")]
    NotNormalized(f64),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pair ({i}, {j}) has vanishing coefficients; the reduced state is the vacuum")]
    DegeneratePair { i: usize, j: usize },

    #[error("no sign change of the target function on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
