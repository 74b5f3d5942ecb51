//! Blind rate adaptation for syndrome-based reconciliation.
//!
//! A fraction δ of the code positions carries no key: Alice fills them with
//! random symbols. Initially all of them are punctured (Bob has no prior on
//! them) and Alice sends the syndrome once. After every failed decoding
//! attempt Alice discloses the values of some punctured positions, turning
//! them into shortened ones; once none are left she reveals key symbols in
//! the clear. The frame ends when Bob's decoder meets the syndrome or the
//! whole key is public.
//!
//! Leakage: the syndrome carries `m·v` bits but `p·v` of them are absorbed
//! by the undisclosed punctured values, so the net disclosure is
//! `(m - p + s + r)·v` bits for `s` shortened and `r` revealed symbols, over
//! a key of `n - d` symbols.

use std::collections::BTreeMap;

use log::warn;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::channel::{efficiency, ChannelParams};
use crate::decoder::{llr_from_channel, Decoder, LlrVector};
use crate::error::{Error, Result};
use crate::galois::{Gf, GfContext};
use crate::nbldpc::{code_rate, shorten_step_size, syndrome, RateAdaptState, SparseParityMatrix};
use crate::rng::{self, stream};
use crate::scalar::Real;
use crate::transcript::{Direction, EventKind, Transcript};

/// A parity-check matrix prepared for blind reconciliation.
#[derive(Debug, Clone)]
pub struct BlindCode<F> {
    pub h: SparseParityMatrix,
    pub decoder: Decoder<F>,
    pub ctx: GfContext,
    /// Positions set aside for puncturing/shortening: `ceil(δ n)`.
    pub reserved: usize,
}

impl<F: Real> BlindCode<F> {
    pub fn new(h: SparseParityMatrix, delta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::Config(format!("reserved fraction {delta} outside [0, 1)")));
        }
        let ctx = GfContext::new(h.q())?;
        let decoder = Decoder::new(&h, &ctx)?;
        let reserved = (delta * h.n() as f64 - 1e-9).ceil().max(0.0) as usize;
        if reserved >= h.n() {
            return Err(Error::Config("no key positions left after reservation".into()));
        }
        Ok(Self { h, decoder, ctx, reserved })
    }

    pub fn with_max_iterations(mut self, k: usize) -> Self {
        self.decoder = self.decoder.with_max_iterations(k);
        self
    }

    /// Key symbols reconciled per frame.
    pub fn key_len(&self) -> usize {
        self.h.n() - self.reserved
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionStatus {
    Running,
    Succeeded,
    AbortedFullReveal,
}

#[derive(Debug, Clone)]
pub struct FrameOutcome {
    pub status: SessionStatus,
    /// Decoding succeeded and Bob's key equals Alice's.
    pub success: bool,
    pub tries: usize,
    pub leak_bits: i64,
    pub efficiency: f64,
    pub key_len: usize,
    pub alice_key: Vec<Gf>,
    pub bob_key: Vec<Gf>,
    pub transcript: Transcript,
}

/// State of one frame's reconciliation, shared view of both parties.
///
/// Alice's side holds `codeword`; Bob's side holds `observed` and the
/// disclosed values. The transcript is the only channel between them.
#[derive(Debug)]
pub struct BlindSession<'a, F> {
    code: &'a BlindCode<F>,
    key_positions: Vec<usize>,
    codeword: Vec<Gf>,
    observed: Vec<Gf>,
    syndrome: Vec<Gf>,
    pub adapt: RateAdaptState,
    revealed: BTreeMap<usize, Gf>,
    reveal_order: Vec<usize>,
    pub tries: usize,
    pub status: SessionStatus,
    pub transcript: Transcript,
    last_decision: Vec<Gf>,
}

impl<'a, F: Real> BlindSession<'a, F> {
    /// Lays the key strings onto code positions, draws the punctured values
    /// and the shortening order from `seed`, and sends the syndrome.
    pub fn start(code: &'a BlindCode<F>, alice: &[Gf], bob: &[Gf], seed: u64) -> Result<Self> {
        let n = code.h.n();
        let k = code.key_len();
        for len in [alice.len(), bob.len()] {
            if len != k {
                return Err(Error::LengthMismatch { expected: k, actual: len });
            }
        }
        let mut r = rng::rng(seed, &[stream::BLIND]);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        let reserved: Vec<usize> = perm[..code.reserved].to_vec();
        let mut key_positions: Vec<usize> = perm[code.reserved..].to_vec();
        key_positions.sort_unstable();

        let q = code.ctx.order();
        let mut codeword = vec![0; n];
        let mut observed = vec![0; n];
        for (i, &pos) in key_positions.iter().enumerate() {
            codeword[pos] = code.ctx.check(alice[i] as usize)?;
            observed[pos] = code.ctx.check(bob[i] as usize)?;
        }
        for &pos in &reserved {
            codeword[pos] = r.gen_range(0..q) as Gf;
        }
        let syndrome = syndrome(&code.h, &codeword, &code.ctx)?;
        let mut reveal_order = key_positions.clone();
        reveal_order.shuffle(&mut r);

        let v = code.ctx.bits() as i64;
        let m = code.h.m();
        let mut transcript = Transcript::new();
        transcript.send(EventKind::Syndrome, m as i64 * v, m as u32);
        transcript.push(Direction::AliceToBob, EventKind::PunctureMask, -(reserved.len() as i64) * v, reserved.len() as u32);

        Ok(Self {
            code,
            key_positions,
            codeword,
            observed,
            syndrome,
            adapt: RateAdaptState::new(reserved),
            revealed: BTreeMap::new(),
            reveal_order,
            tries: 0,
            status: SessionStatus::Running,
            transcript,
            last_decision: Vec::new(),
        })
    }

    /// Current effective code rate.
    pub fn rate(&self) -> f64 {
        let h = &self.code.h;
        let s = self.adapt.shortened_count() + self.revealed.len();
        match code_rate(h.n(), h.m(), self.adapt.punctured_count(), s) {
            Ok(r) => r.to_f64().unwrap_or(0.0),
            Err(_) => 0.0,
        }
    }

    fn priors(&self, decode_params: &ChannelParams<F>) -> Vec<LlrVector<F>> {
        let q = self.code.ctx.order();
        let mut priors: Vec<LlrVector<F>> =
            self.observed.iter().map(|&y| llr_from_channel(y, decode_params)).collect();
        for &pos in self.adapt.punctured() {
            priors[pos] = LlrVector::uniform(q);
        }
        for (&pos, &w) in self.adapt.shortened().iter().chain(self.revealed.iter()) {
            priors[pos] = LlrVector::pinned(q, w);
        }
        priors
    }

    /// Bob's decoding attempt. Returns true when the syndrome is met.
    pub fn attempt(&mut self, decode_params: &ChannelParams<F>) -> Result<bool> {
        self.tries += 1;
        let out = self.code.decoder.decode(&self.syndrome, &self.priors(decode_params))?;
        self.last_decision = out.symbols;
        if out.success {
            self.status = SessionStatus::Succeeded;
        }
        Ok(out.success)
    }

    /// Bob asks for more; Alice shortens punctured positions or, when none
    /// are left, reveals key symbols. Returns the number of symbols sent.
    pub fn disclose_more(&mut self) -> usize {
        let v = self.code.ctx.bits() as i64;
        let step = shorten_step_size(self.code.h.n(), self.rate()).count;
        self.transcript.next_round();
        self.transcript.push(Direction::BobToAlice, EventKind::Request, 0, 1);
        let codeword = &self.codeword;
        if self.adapt.punctured_count() > 0 {
            let newly = self.adapt.shorten_next(step, |pos| codeword[pos]);
            self.transcript.send(EventKind::ShortenedValues, newly.len() as i64 * v, newly.len() as u32);
            return newly.len();
        }
        let done = self.revealed.len();
        let pending: Vec<usize> = self.reveal_order[done..(done + step).min(self.reveal_order.len())].to_vec();
        for &pos in &pending {
            self.revealed.insert(pos, codeword[pos]);
        }
        self.transcript.send(EventKind::PlainReveal, pending.len() as i64 * v, pending.len() as u32);
        if self.revealed.len() == self.key_positions.len() {
            self.status = SessionStatus::AbortedFullReveal;
        }
        pending.len()
    }

    fn finish(self, true_params: &ChannelParams<F>) -> FrameOutcome {
        let alice_key: Vec<Gf> = self.key_positions.iter().map(|&p| self.codeword[p]).collect();
        let bob_key: Vec<Gf> = match self.status {
            SessionStatus::AbortedFullReveal => alice_key.clone(),
            _ => self.key_positions.iter().map(|&p| self.last_decision.get(p).copied().unwrap_or(0)).collect(),
        };
        let leak_bits = self.transcript.leak_bits();
        let key_len = self.key_positions.len();
        let f = efficiency(F::of(leak_bits as f64), key_len, true_params).as_f64();
        FrameOutcome {
            success: self.status == SessionStatus::Succeeded && alice_key == bob_key,
            status: self.status,
            tries: self.tries,
            leak_bits,
            efficiency: f,
            key_len,
            alice_key,
            bob_key,
            transcript: self.transcript,
        }
    }
}

/// Reconciles one frame. `true_params` is the channel used to report the
/// efficiency; `decode_params` is what Bob believes (the QBER estimate).
pub fn run_blind<F: Real>(
    code: &BlindCode<F>,
    alice: &[Gf],
    bob: &[Gf],
    true_params: &ChannelParams<F>,
    decode_params: &ChannelParams<F>,
    seed: u64,
) -> Result<FrameOutcome> {
    let mut session = BlindSession::start(code, alice, bob, seed)?;
    loop {
        if session.attempt(decode_params)? {
            break;
        }
        session.disclose_more();
        if session.status == SessionStatus::AbortedFullReveal {
            break;
        }
    }
    Ok(session.finish(true_params))
}

/// Code picked by [`select_code`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeChoice {
    pub index: usize,
    pub rate: f64,
    pub det: f64,
    /// No code's threshold covers the estimate; the lowest rate was taken.
    pub unsupported: bool,
}

/// Highest-rate code whose threshold is at least `qber_estimate * margin`.
/// `catalog` holds `(rate, threshold)` pairs in any order.
pub fn select_code(catalog: &[(f64, f64)], qber_estimate: f64, margin: f64) -> Result<CodeChoice> {
    if catalog.is_empty() {
        return Err(Error::Config("empty code catalog".into()));
    }
    let need = qber_estimate * margin;
    let best = catalog
        .iter()
        .enumerate()
        .filter(|(_, &(_, det))| det >= need)
        .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0));
    if let Some((index, &(rate, det))) = best {
        return Ok(CodeChoice { index, rate, det, unsupported: false });
    }
    let (index, &(rate, det)) =
        catalog.iter().enumerate().min_by(|a, b| a.1 .0.total_cmp(&b.1 .0)).expect("catalog is nonempty");
    warn!("no code supports QBER {qber_estimate}; using rate {rate}");
    Ok(CodeChoice { index, rate, det, unsupported: true })
}
