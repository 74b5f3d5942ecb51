//! Arithmetic in GF(2^v) for 1 <= v <= 8.
//!
//! Elements are integers in `[0, q)` whose bits are polynomial coefficients,
//! so addition is XOR and the binary image of a symbol is its bit pattern.
//! Multiplication goes through a full `q x q` table built from exp/log tables
//! over a fixed primitive polynomial per field size.

use crate::error::{Error, Result};

/// Field element. Every supported field fits in a byte.
pub type Gf = u8;

/// Primitive polynomial bitmasks (including the leading term), indexed by v.
///
/// | v | polynomial            |
/// |---|-----------------------|
/// | 1 | x + 1                 |
/// | 2 | x^2 + x + 1           |
/// | 3 | x^3 + x + 1           |
/// | 4 | x^4 + x + 1           |
/// | 5 | x^5 + x^2 + 1         |
/// | 6 | x^6 + x + 1           |
/// | 7 | x^7 + x + 1           |
/// | 8 | x^8 + x^4 + x^3 + x^2 + 1 |
pub const PRIMITIVE_POLYS: [u32; 9] = [0, 0b11, 0b111, 0b1011, 0b1_0011, 0b10_0101, 0b100_0011, 0b1000_0011, 0x11d];

/// Lookup tables for GF(q), q = 2^v. Immutable once built.
#[derive(Clone, PartialEq, Eq)]
pub struct GfContext {
    q: usize,
    bits: u32,
    poly: u32,
    exp: Vec<Gf>,
    log: Vec<u8>,
    mul: Vec<Gf>,
    inv: Vec<Gf>,
}

impl std::fmt::Debug for GfContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GF({}) mod {:#x}", self.q, self.poly)
    }
}

impl GfContext {
    pub fn new(q: usize) -> Result<Self> {
        if !(2..=256).contains(&q) || !q.is_power_of_two() {
            return Err(Error::InvalidOrder(q));
        }
        let bits = q.trailing_zeros();
        let poly = PRIMITIVE_POLYS[bits as usize];
        let order = q - 1;

        let mut exp = vec![0 as Gf; 2 * order];
        let mut log = vec![0u8; q];
        let mut x: u32 = 1;
        for (i, slot) in exp.iter_mut().take(order).enumerate() {
            *slot = x as Gf;
            log[x as usize] = i as u8;
            x <<= 1;
            if x & q as u32 != 0 {
                x ^= poly;
            }
        }
        debug_assert_eq!(x, 1, "polynomial for v={bits} is not primitive");
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }

        let mut mul = vec![0 as Gf; q * q];
        let mut inv = vec![0 as Gf; q];
        for a in 1..q {
            for b in 1..q {
                mul[a * q + b] = exp[log[a] as usize + log[b] as usize];
            }
            inv[a] = exp[(order - log[a] as usize) % order];
        }

        Ok(Self { q, bits, poly, exp, log, mul, inv })
    }

    /// Field order q.
    #[inline]
    pub fn order(&self) -> usize {
        self.q
    }

    /// Bits per symbol, v = log2(q).
    #[inline]
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn primitive_poly(&self) -> u32 {
        self.poly
    }

    /// `alpha^i` for the primitive element alpha = 2 (alpha = 1 in GF(2)).
    #[inline]
    pub fn exp(&self, i: usize) -> Gf {
        self.exp[i % (self.q - 1)]
    }

    /// Discrete log of a nonzero element.
    #[inline]
    pub fn log(&self, a: Gf) -> Option<usize> {
        (a != 0 && (a as usize) < self.q).then(|| self.log[a as usize] as usize)
    }

    #[inline]
    pub fn add(&self, a: Gf, b: Gf) -> Gf {
        a ^ b
    }

    #[inline]
    pub fn sub(&self, a: Gf, b: Gf) -> Gf {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Gf, b: Gf) -> Gf {
        self.mul[a as usize * self.q + b as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Gf) -> Option<Gf> {
        (a != 0).then(|| self.inv[a as usize])
    }

    pub fn div(&self, a: Gf, b: Gf) -> Result<Gf> {
        match self.inv(b) {
            Some(ib) => Ok(self.mul(a, ib)),
            None => Err(Error::DivisionByZero(self.q)),
        }
    }

    /// Row `k -> k * a` of the multiplication table.
    #[inline]
    pub fn mul_row(&self, a: Gf) -> &[Gf] {
        let a = a as usize;
        &self.mul[a * self.q..(a + 1) * self.q]
    }

    /// Checks that `a` is an element of the field.
    pub fn check(&self, a: usize) -> Result<Gf> {
        if a < self.q {
            Ok(a as Gf)
        } else {
            Err(Error::ElementOutOfRange { element: a, q: self.q })
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Gf> {
        (0..self.q).map(|a| a as Gf)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Gf> {
        (1..self.q).map(|a| a as Gf)
    }
}
