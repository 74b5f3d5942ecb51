//! Walsh-Hadamard transform: the Fourier transform of the additive group of
//! GF(2^v), which turns XOR-convolution of distributions into pointwise
//! products.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// In-place unnormalized transform. `data.len()` must be a power of two.
#[inline]
pub fn fwht_in_place<F: Real>(data: &mut [F]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// In-place inverse: forward transform followed by division by the length.
#[inline]
pub fn ifwht_in_place<F: Real>(data: &mut [F]) {
    fwht_in_place(data);
    let scale = F::one() / F::of_usize(data.len());
    for v in data.iter_mut() {
        *v *= scale;
    }
}

fn check_len(len: usize) -> Result<()> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::LengthMismatch { expected: len.next_power_of_two().max(1), actual: len });
    }
    Ok(())
}

/// Forward transform of a vector whose length is a power of two.
pub fn walsh_hadamard<F: Real>(p: &[F]) -> Result<Vec<F>> {
    check_len(p.len())?;
    let mut out = p.to_vec();
    fwht_in_place(&mut out);
    Ok(out)
}

pub fn inverse_walsh_hadamard<F: Real>(p: &[F]) -> Result<Vec<F>> {
    check_len(p.len())?;
    let mut out = p.to_vec();
    ifwht_in_place(&mut out);
    Ok(out)
}
