use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::galois::{Gf, GfContext};
use crate::scalar::Real;

/// Bound on LLR component magnitudes, in natural-log units.
pub const CLAMP: f64 = 30.0;
/// Probabilities are floored here before taking logarithms.
pub const PROB_FLOOR: f64 = 1e-30;

/// Length-q log-likelihood message, `m_k = ln(P(Z = 0) / P(Z = k))`.
///
/// Component 0 is zero after [`LlrVector::normalize`]; smaller components
/// are more likely values.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrVector<F> {
    values: Vec<F>,
}

impl<F: Real> LlrVector<F> {
    /// Uniform belief (all components zero).
    pub fn uniform(q: usize) -> Self {
        Self { values: vec![F::zero(); q] }
    }

    /// Wraps raw values and normalizes them.
    pub fn from_values(values: Vec<F>) -> Self {
        let mut v = Self { values };
        v.normalize();
        v
    }

    /// Belief pinned to `w`: the value the decoder can no longer move.
    pub fn pinned(q: usize, w: Gf) -> Self {
        let c = F::of(CLAMP);
        let values = if w == 0 {
            (0..q).map(|k| if k == 0 { F::zero() } else { c }).collect()
        } else {
            (0..q).map(|k| if k == w as usize { -c } else { F::zero() }).collect()
        };
        Self { values }
    }

    /// `m(p)`: probabilities to LLRs, with flooring and clamping.
    pub fn from_probs(p: &[F]) -> Self {
        let mut values = vec![F::zero(); p.len()];
        probs_to_llr(p, &mut values);
        Self { values }
    }

    /// `p(m)`: `p_k = exp(-m_k) / sum_j exp(-m_j)`.
    pub fn to_probs(&self) -> Vec<F> {
        let mut out = vec![F::zero(); self.values.len()];
        llr_to_probs(&self.values, &mut out);
        out
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Shifts so that component 0 is zero, with every component within
    /// `CLAMP` of the most likely one (hence all within `+-CLAMP`).
    pub fn normalize(&mut self) {
        normalize_in_place(&mut self.values);
    }

    /// Most likely value; ties go to the smallest index.
    pub fn argmin(&self) -> Gf {
        argmin(&self.values)
    }
}

/// Clamping is relative to the most likely value: components further than
/// `CLAMP` above the minimum are pulled down to it before shifting. A plain
/// `+-CLAMP` clip around component 0 would tie a confident value with
/// round-off noise whenever component 0 itself is negligible.
pub(crate) fn normalize_in_place<F: Real>(m: &mut [F]) {
    let ceiling = m.iter().copied().fold(F::infinity(), F::min) + F::of(CLAMP);
    let m0 = m[0].min(ceiling);
    for v in m.iter_mut() {
        *v = v.min(ceiling) - m0;
    }
}

pub(crate) fn argmin<F: Real>(m: &[F]) -> Gf {
    let mut best = 0;
    for k in 1..m.len() {
        if m[k] < m[best] {
            best = k;
        }
    }
    best as Gf
}

pub(crate) fn llr_to_probs<F: Real>(m: &[F], out: &mut [F]) {
    let lo = m.iter().copied().fold(F::infinity(), F::min);
    let mut total = F::zero();
    for (o, &v) in out.iter_mut().zip(m) {
        *o = (lo - v).exp();
        total += *o;
    }
    for o in out.iter_mut() {
        *o /= total;
    }
}

pub(crate) fn probs_to_llr<F: Real>(p: &[F], out: &mut [F]) {
    let floor = F::of(PROB_FLOOR);
    for (o, &v) in out.iter_mut().zip(p) {
        *o = -v.max(floor).ln();
    }
    normalize_in_place(out);
}

/// Direction of a GF index permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermuteMode {
    /// `out[k] = m[k * a]`
    Multiply,
    /// `out[k] = m[k / a]`
    Divide,
}

/// Reindexes a message by field multiplication or division with `a != 0`.
pub fn gf_permute<F: Real>(msg: &LlrVector<F>, a: Gf, mode: PermuteMode, ctx: &GfContext) -> Result<LlrVector<F>> {
    if msg.len() != ctx.order() {
        return Err(Error::LengthMismatch { expected: ctx.order(), actual: msg.len() });
    }
    let factor = match mode {
        PermuteMode::Multiply => {
            ctx.check(a as usize)?;
            if a == 0 {
                return Err(Error::DivisionByZero(ctx.order()));
            }
            a
        }
        PermuteMode::Divide => ctx.inv(a).ok_or(Error::DivisionByZero(ctx.order()))?,
    };
    let row = ctx.mul_row(factor);
    let values = (0..ctx.order()).map(|k| msg.values[row[k] as usize]).collect();
    Ok(LlrVector { values })
}

/// Prior belief about Alice's symbol given Bob's observation `y`.
///
/// With `p = 0` the belief is pinned to `y`.
pub fn llr_from_channel<F: Real>(observed: Gf, params: &ChannelParams<F>) -> LlrVector<F> {
    let q = params.q;
    if params.p <= F::zero() {
        return LlrVector::pinned(q, observed);
    }
    let hit = (F::one() - params.p).ln();
    let miss = (params.p / F::of_usize(q - 1)).ln();
    let at = |k: usize| if k == observed as usize { hit } else { miss };
    let l0 = at(0);
    LlrVector::from_values((0..q).map(|k| l0 - at(k)).collect())
}
