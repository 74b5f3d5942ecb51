//! The q-ary symmetric channel and the information measures built on it.

use rand::Rng;

use crate::error::{Error, Result};
use crate::galois::Gf;
use crate::rng::{self, stream};
use crate::scalar::{xlog2x, Real};

/// Channel description: symbol alphabet size `q` and transition
/// probability `p` (the symbol error rate, i.e. the QBER).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams<F = f64> {
    pub q: usize,
    pub p: F,
}

impl<F: Real> ChannelParams<F> {
    pub fn new(q: usize, p: F) -> Result<Self> {
        if !(2..=256).contains(&q) || !q.is_power_of_two() {
            return Err(Error::InvalidOrder(q));
        }
        if !(p >= F::zero() && p < F::one()) {
            return Err(Error::Config(format!("transition probability {p} outside [0, 1)")));
        }
        Ok(Self { q, p })
    }

    /// Bits per symbol.
    pub fn bits(&self) -> u32 {
        self.q.trailing_zeros()
    }

    /// `P(y | x)` for the symmetric channel.
    pub fn transition(&self, x: Gf, y: Gf) -> F {
        if x == y {
            F::one() - self.p
        } else {
            self.p / F::of_usize(self.q - 1)
        }
    }
}

/// Logarithm base for entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Base {
    /// bits
    Two,
    /// q-ary units, one unit per symbol
    Q,
}

/// Alice's and Bob's correlated symbol strings for one frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QaryFrame {
    pub q: usize,
    pub x: Vec<Gf>,
    pub y: Vec<Gf>,
    pub seed: u64,
}

impl QaryFrame {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Number of positions where `x` and `y` differ.
    pub fn symbol_errors(&self) -> usize {
        self.x.iter().zip(&self.y).filter(|(a, b)| a != b).count()
    }
}

/// Samples `n` uniform symbols for Alice and passes them through the channel.
///
/// A wrong symbol is `x XOR e` with `e` uniform over the nonzero elements,
/// which is uniform over the `q - 1` other values.
pub fn sample_frame<F: Real>(params: &ChannelParams<F>, n: usize, seed: u64) -> QaryFrame {
    let mut rng = rng::rng(seed, &[stream::CHANNEL]);
    let p = params.p.as_f64();
    let q = params.q;
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let a = rng.gen_range(0..q) as Gf;
        let b = if p > 0.0 && rng.gen::<f64>() < p {
            a ^ rng.gen_range(1..q) as Gf
        } else {
            a
        };
        x.push(a);
        y.push(b);
    }
    QaryFrame { q, x, y, seed }
}

/// `H(X|Y)` of the q-ary symmetric channel with uniform input.
pub fn conditional_entropy<F: Real>(params: &ChannelParams<F>, base: Base) -> F {
    let p = params.p;
    let q1 = F::of_usize(params.q - 1);
    let bits = -(xlog2x(F::one() - p) + xlog2x(p) - p * q1.log2());
    match base {
        Base::Two => bits,
        Base::Q => bits / F::of_usize(params.bits() as usize),
    }
}

/// Binary entropy function in bits.
pub fn binary_entropy<F: Real>(p: F) -> F {
    -(xlog2x(p) + xlog2x(F::one() - p))
}

/// Reconciliation efficiency `leak / (n H(X|Y))` with the entropy in bits.
///
/// Returns infinity when the channel is noiseless but bits were disclosed,
/// and 1 when neither happened.
pub fn efficiency<F: Real>(leak_bits: F, n: usize, params: &ChannelParams<F>) -> F {
    let bound = F::of_usize(n) * conditional_entropy(params, Base::Two);
    if bound <= F::zero() {
        if leak_bits > F::zero() {
            F::infinity()
        } else {
            F::one()
        }
    } else {
        leak_bits / bound
    }
}
