//! Nonbinary LDPC codes: ensembles, matrices, construction and rate
//! adaptation.

pub mod dist;
pub mod matrix;
pub mod peg;
pub mod rate;

pub use dist::{designed_ensembles, DegreeDistribution};
pub use matrix::{syndrome, Entry, SparseParityMatrix};
pub use peg::{peg_construct, peg_with_degrees};
pub use rate::{code_rate, shorten_step_size, RateAdaptState, StepSize, DEFAULT_DELTA};

/// Number of check rows for a code of length `n` at `rate`.
pub fn check_count(n: usize, rate: f64) -> usize {
    ((n as f64) * (1.0 - rate)).round() as usize
}
