//! Rate adaptation by puncturing and shortening.

use std::collections::BTreeMap;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::galois::Gf;

/// Default fraction of code symbols reserved for rate adaptation.
pub const DEFAULT_DELTA: f64 = 0.10;

/// Effective rate `(n - m - s) / (n - p - s)` of a code with `p` punctured
/// and `s` shortened symbols, as an exact fraction.
pub fn code_rate(n: usize, m: usize, punctured: usize, shortened: usize) -> Result<Ratio<i64>> {
    let degenerate = Error::DegenerateRate { n, punctured, shortened };
    if punctured + shortened >= n {
        return Err(degenerate);
    }
    let num = n as i64 - m as i64 - shortened as i64;
    let den = (n - punctured - shortened) as i64;
    Ok(Ratio::new(num, den))
}

/// Result of [`shorten_step_size`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepSize {
    pub count: usize,
    /// The formula gave no positive demand and the count was clamped to 1.
    pub clamped: bool,
}

/// Number of punctured symbols converted to shortened ones after a failed
/// decoding attempt: `ceil(n (0.028 - 0.02 R))`, at least 1.
///
/// The product is snapped to the nearest integer when within 1e-9 of it so
/// that exact decimal inputs (n = 30000, R = 0.8 gives 360) are not bumped
/// up by binary rounding.
pub fn shorten_step_size(n: usize, rate: f64) -> StepSize {
    let x = n as f64 * (0.028 - 0.02 * rate);
    let snapped = if (x - x.round()).abs() < 1e-9 * x.abs().max(1.0) { x.round() } else { x.ceil() };
    if snapped >= 1.0 {
        StepSize { count: snapped as usize, clamped: false }
    } else {
        StepSize { count: 1, clamped: true }
    }
}

/// Which reserved positions are currently punctured and which shortened.
///
/// Positions are converted in a fixed order decided when the state is
/// created; `|punctured| + |shortened|` never changes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateAdaptState {
    order: Vec<usize>,
    converted: usize,
    shortened: BTreeMap<usize, Gf>,
}

impl RateAdaptState {
    /// All `reserved` positions start punctured; they will be shortened in
    /// the given order.
    pub fn new(reserved: Vec<usize>) -> Self {
        Self { order: reserved, converted: 0, shortened: BTreeMap::new() }
    }

    pub fn reserved(&self) -> usize {
        self.order.len()
    }

    pub fn punctured_count(&self) -> usize {
        self.order.len() - self.converted
    }

    pub fn shortened_count(&self) -> usize {
        self.converted
    }

    pub fn punctured(&self) -> &[usize] {
        &self.order[self.converted..]
    }

    pub fn shortened(&self) -> &BTreeMap<usize, Gf> {
        &self.shortened
    }

    pub fn is_punctured(&self, pos: usize) -> bool {
        self.punctured().contains(&pos)
    }

    /// Converts up to `k` punctured positions to shortened ones, taking their
    /// disclosed values from `value_of`. Returns the converted positions.
    pub fn shorten_next(&mut self, k: usize, value_of: impl Fn(usize) -> Gf) -> Vec<usize> {
        let end = (self.converted + k).min(self.order.len());
        let newly: Vec<usize> = self.order[self.converted..end].to_vec();
        for &pos in &newly {
            self.shortened.insert(pos, value_of(pos));
        }
        self.converted = end;
        newly
    }
}
