//! Finite-alphabet probability tensors and exact information measures.
//!
//! Everything downstream (rate triples, feasibility, the simulator) is built
//! on the dense [`JointPMF`] tensor and the row-stochastic [`ConditionalPMF`].
//! All logarithms are base 2 and `0 * log 0 = 0`.

mod alphabet;
mod conditional;
mod pmf;
mod problem;

pub use alphabet::FiniteAlphabet;
pub use conditional::ConditionalPMF;
pub use pmf::JointPMF;
pub use problem::{DistortionTable, EmbeddingProblem};

use thiserror::Error;

/// Input probability masses may deviate from exact normalization by this much
/// before being rejected; accepted tensors are renormalized exactly.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Entries more negative than this are rejected; entries in `[-MASS_FLOOR, 0)`
/// are treated as floating-point dust and clamped to zero.
pub const MASS_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum ProbError {
    #[error("probability mass {value} at entry {index} is negative")]
    NegativeMass { index: usize, value: f64 },
    #[error("weights sum to {total}, outside 1 ± {NORMALIZATION_TOLERANCE}")]
    NotNormalized { total: f64 },
    #[error("shape mismatch: expected {expected} entries, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("axis {0} does not exist or is repeated")]
    UnknownAxis(usize),
    #[error("axis groups overlap at axis {0}")]
    OverlappingGroups(usize),
    #[error("alphabet {0:?} is empty or has duplicate symbols")]
    BadAlphabet(String),
    #[error("distortion entry ({row},{col}) = {value} must be finite and >= 0")]
    BadDistortionEntry { row: usize, col: usize, value: f64 },
    #[error("distortion level {0} must be finite and >= 0")]
    BadDistortionLevel(f64),
    #[error("alphabets of {0} are inconsistent with the problem")]
    InconsistentAlphabets(&'static str),
}

/// Row-major strides for a dense tensor with the given per-axis sizes.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Binary entropy in bits, used by tests as an independent oracle.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q > 0.0 { -q * q.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}
