//! Error-rate bookkeeping and top-level block sizes.

use crate::scalar::Real;

/// Probability that `t` independent bits with error rate `p` contain an odd
/// number of errors.
pub fn p_odd<F: Real>(t: u32, p: F) -> F {
    let half = F::of(0.5);
    half * (F::one() - (F::one() - p - p).powi(t as i32))
}

pub fn p_even<F: Real>(t: u32, p: F) -> F {
    let half = F::of(0.5);
    half * (F::one() + (F::one() - p - p).powi(t as i32))
}

/// Bit error rate of the binary image of a q-ary symmetric channel.
pub fn qber_bin<F: Real>(q: usize, qber_sym: F) -> F {
    F::of_usize(q) / F::of_usize(2 * (q - 1)) * qber_sym
}

/// Error rate of a bit whose smallest block of size `t` had matching
/// parity: `p * p_odd(t-1) / p_even(t)`.
pub fn qber_second<F: Real>(t: u32, p: F) -> F {
    if t == 0 {
        return p;
    }
    p * p_odd(t - 1, p) / p_even(t, p)
}

/// `2^[log2 x]` with `[.]` rounding half up.
pub(crate) fn pow2_round(x: f64) -> usize {
    let e = (x.log2() + 0.5).floor();
    if e >= 62.0 {
        usize::MAX / 2
    } else if e <= 0.0 {
        1
    } else {
        1usize << e as u32
    }
}

/// First-iteration block size `min(2^[log2(1/p)], n/2)`, at least 2.
pub fn first_block_size(qber: f64, n: usize) -> usize {
    let cap = (n / 2).max(2);
    if qber <= 0.0 {
        return cap;
    }
    pow2_round(1.0 / qber).clamp(2, cap)
}

/// Second-iteration block size `min(2^[log2(2q/p)], n/2)`, at least 2.
pub fn second_block_size(qber: f64, q: usize, n: usize) -> usize {
    let cap = (n / 2).max(2);
    if qber <= 0.0 {
        return cap;
    }
    pow2_round(2.0 * q as f64 / qber).clamp(2, cap)
}

/// Top-level block sizes for a frame of `n` bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeSchedule {
    pub k1: usize,
    /// Iteration-2 size for bits without confidence grouping; grouped
    /// frames compute one size per group.
    pub k2: usize,
    /// Sizes for iterations 3 onwards: n/16, n/8, n/4, n/2, then n/2.
    pub later: Vec<usize>,
}

impl CascadeSchedule {
    pub fn iterations(&self) -> usize {
        2 + self.later.len()
    }

    /// Block size of iteration `i` (0-based) for iterations 1 and >= 3.
    pub fn size(&self, i: usize) -> usize {
        match i {
            0 => self.k1,
            1 => self.k2,
            _ => self.later[i - 2],
        }
    }
}

pub fn top_block_sizes(qber_bin: f64, q: usize, n: usize, iterations: usize) -> CascadeSchedule {
    let cap = (n / 2).max(2);
    let later = (0..iterations.saturating_sub(2)).map(|i| ((n / 16) << i).clamp(2, cap)).collect();
    CascadeSchedule { k1: first_block_size(qber_bin, n), k2: second_block_size(qber_bin, q, n), later }
}
