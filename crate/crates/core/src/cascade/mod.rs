//! Cascade: binary baseline and the high-dimensional variants.
//!
//! Symbols are mapped to bits big-endian (bit `s*v + b` is plane `b` of
//! symbol `s`, plane 0 the most significant) and reconciled on the binary
//! string. The high-dimensional variants add partner-bit requests: when a
//! bit of a symbol is found wrong the symbol is wrong, and each other bit of
//! it is wrong with probability close to one half, so Alice simply reveals
//! them. The serial variant handles one block at a time and cascades every
//! error immediately; the parallel variant processes bit-plane groups with
//! batched parities and defers cascading to a list-driven step after each
//! iteration, trading a little leakage for far fewer message rounds.

mod engine;
mod schedule;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use crate::channel::{self, ChannelParams};
use crate::error::{Error, Result};
use crate::galois::Gf;
use crate::rng::{self, stream, SimRng};
use crate::transcript::{EventKind, Transcript};

pub use engine::{BlockRef, CascadeState, CascadeStats, SmallestBlock};
pub use schedule::{
    first_block_size, p_even, p_odd, qber_bin, qber_second, second_block_size, top_block_sizes, CascadeSchedule,
};

/// Frame size in bits used throughout the experiments, whatever q is.
pub const FRAME_BITS: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Binary,
    HdSerial,
    HdParallel,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Binary => "cascade-binary",
            Variant::HdSerial => "cascade-hd-serial",
            Variant::HdParallel => "cascade-hd-parallel",
        }
    }
}

/// How the parallel variant lowers the error-rate estimate of later
/// bit-plane groups in the first iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QberPolicy {
    /// `QBER_i = QBER_BIN - (1/2n) * sum_{j<i} PB_j / v` with `PB_j` the
    /// partner bits disclosed for errors of group `j` and `n` the group size.
    Adjusted,
    /// Every group uses `QBER_BIN`.
    Fixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeConfig {
    pub iterations: usize,
    /// Stop a Cascade step after this many rounds (`None`: run to the end).
    pub round_budget: Option<u32>,
    /// Second-iteration groups smaller than `merge_factor * k2` are merged.
    pub merge_factor: usize,
    pub qber_policy: QberPolicy,
}

impl Default for CascadeConfig {
    fn default() -> Self {
        Self { iterations: 6, round_budget: None, merge_factor: 4, qber_policy: QberPolicy::Adjusted }
    }
}

#[derive(Debug, Clone)]
pub struct CascadeOutcome {
    pub variant: Variant,
    pub q: usize,
    pub symbols: usize,
    pub success: bool,
    pub residual_bit_errors: usize,
    pub residual_symbol_errors: usize,
    pub leak_bits: i64,
    /// Leak over `n H(X|Y)` of the q-ary channel at the given QBER.
    pub efficiency: f64,
    pub message_rounds: usize,
    pub serial_messages: usize,
    pub bob_key: Vec<Gf>,
    pub stats: CascadeStats,
    pub transcript: Transcript,
}

/// Big-endian bit planes of each symbol.
pub fn to_bits(symbols: &[Gf], v: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(symbols.len() * v);
    for &s in symbols {
        for b in (0..v).rev() {
            out.push(((s as usize >> b) & 1) as u8);
        }
    }
    out
}

pub fn from_bits(bits: &[u8], v: usize) -> Vec<Gf> {
    bits.chunks_exact(v).map(|c| c.iter().fold(0usize, |acc, &b| acc << 1 | b as usize) as Gf).collect()
}

fn check_inputs(alice: &[Gf], bob: &[Gf], q: usize, qber: f64) -> Result<usize> {
    if !(2..=256).contains(&q) || !q.is_power_of_two() {
        return Err(Error::InvalidOrder(q));
    }
    if alice.len() != bob.len() {
        return Err(Error::LengthMismatch { expected: alice.len(), actual: bob.len() });
    }
    if let Some(&s) = alice.iter().chain(bob).find(|&&s| s as usize >= q) {
        return Err(Error::ElementOutOfRange { element: s as usize, q });
    }
    if !(0.0..1.0).contains(&qber) {
        return Err(Error::Config(format!("QBER estimate {qber} outside [0, 1)")));
    }
    let v = q.trailing_zeros() as usize;
    if alice.len() * v < 2 {
        return Err(Error::Config("a Cascade frame needs at least 2 bits".into()));
    }
    Ok(v)
}

/// Binary Cascade on the bit image of the symbols, no partner bits.
pub fn run_binary_cascade(
    alice: &[Gf],
    bob: &[Gf],
    q: usize,
    qber_estimate: f64,
    seed: u64,
    cfg: &CascadeConfig,
) -> Result<CascadeOutcome> {
    run(Variant::Binary, alice, bob, q, qber_estimate, seed, cfg)
}

/// Serial high-dimensional Cascade. For q = 2 there are no partner bits and
/// the run is binary Cascade, transcript included.
pub fn run_hd_cascade_serial(
    alice: &[Gf],
    bob: &[Gf],
    q: usize,
    qber_estimate: f64,
    seed: u64,
    cfg: &CascadeConfig,
) -> Result<CascadeOutcome> {
    run(Variant::HdSerial, alice, bob, q, qber_estimate, seed, cfg)
}

/// Parallel high-dimensional Cascade. For q = 2 this is binary Cascade.
pub fn run_hd_cascade_parallel(
    alice: &[Gf],
    bob: &[Gf],
    q: usize,
    qber_estimate: f64,
    seed: u64,
    cfg: &CascadeConfig,
) -> Result<CascadeOutcome> {
    run(Variant::HdParallel, alice, bob, q, qber_estimate, seed, cfg)
}

pub fn run_variant(
    variant: Variant,
    alice: &[Gf],
    bob: &[Gf],
    q: usize,
    qber_estimate: f64,
    seed: u64,
    cfg: &CascadeConfig,
) -> Result<CascadeOutcome> {
    run(variant, alice, bob, q, qber_estimate, seed, cfg)
}

fn run(
    variant: Variant,
    alice: &[Gf],
    bob: &[Gf],
    q: usize,
    qber: f64,
    seed: u64,
    cfg: &CascadeConfig,
) -> Result<CascadeOutcome> {
    let v = check_inputs(alice, bob, q, qber)?;
    if cfg.iterations == 0 || cfg.iterations > 16 {
        return Err(Error::Config(format!("{} Cascade iterations; expected 1..=16", cfg.iterations)));
    }
    // the parallel variant has nothing to parallelise over a single plane
    let mode = if q == 2 && variant == Variant::HdParallel { Variant::Binary } else { variant };
    let hd = mode != Variant::Binary;
    let batched = mode == Variant::HdParallel;
    let mut state = CascadeState::new(to_bits(alice, v), to_bits(bob, v), v, hd, batched)?
        .with_round_budget(cfg.round_budget);
    let mut rng = rng::rng(seed, &[stream::CASCADE]);
    // partner-aware bookkeeping is what lowers the working error rate to
    // the bit-level one; plain binary Cascade sizes blocks for the QBER it
    // is given
    let p_bin = if hd { qber_bin(q, qber) } else { qber };
    let q_formula = if hd { q } else { 2 };
    let n_bits = state.len();
    let sched = top_block_sizes(p_bin, q_formula, n_bits, cfg.iterations);

    for i in 0..cfg.iterations {
        match i {
            0 if batched => first_iteration_parallel(&mut state, &mut rng, p_bin, cfg)?,
            0 => {
                let j = global_layout(&mut state, &mut rng);
                let blocks = state.cut_blocks(j, 0, n_bits as u32, sched.k1);
                state.process_serial(&blocks)?;
            }
            _ => {
                let blocks = if i == 1 {
                    second_iteration_layout(&mut state, &mut rng, p_bin, q_formula, cfg.merge_factor)
                } else {
                    let j = global_layout(&mut state, &mut rng);
                    let end = state.block_len(j);
                    state.cut_blocks(j, 0, end, sched.size(i))
                };
                if batched {
                    let list = state.process_batch(&blocks)?;
                    state.cascade_step(list)?;
                } else {
                    state.process_serial(&blocks)?;
                }
            }
        }
        state.sweep()?;
    }

    let residual_bit_errors = state.residual_errors();
    let bob_key = from_bits(state.bob(), v);
    let residual_symbol_errors = alice.iter().zip(&bob_key).filter(|(a, b)| a != b).count();
    let stats = state.stats();
    let transcript = state.into_transcript();
    let leak_bits = transcript.leak_bits();
    let params = ChannelParams::new(q, qber)?;
    Ok(CascadeOutcome {
        variant,
        q,
        symbols: alice.len(),
        success: residual_bit_errors == 0,
        residual_bit_errors,
        residual_symbol_errors,
        leak_bits,
        efficiency: channel::efficiency(leak_bits as f64, alice.len(), &params),
        message_rounds: transcript.message_rounds(),
        serial_messages: transcript.serial_message_count(),
        bob_key,
        stats,
        transcript,
    })
}

fn unknown_bits(state: &CascadeState) -> Vec<u32> {
    (0..state.len() as u32).filter(|&b| !state.is_known(b)).collect()
}

/// All still-unknown bits in one random order.
fn global_layout(state: &mut CascadeState, rng: &mut SimRng) -> usize {
    let mut bits = unknown_bits(state);
    bits.shuffle(rng);
    state.add_layout(bits)
}

/// First parallel iteration: plane `g` of every symbol forms group `g`; the
/// groups are processed one after another, each with a single batch of
/// parities, and cascading waits until all groups are done.
fn first_iteration_parallel(state: &mut CascadeState, rng: &mut SimRng, p_bin: f64, cfg: &CascadeConfig) -> Result<()> {
    let v = state.bits_per_symbol();
    let n = state.len() / v;
    let mut slots = Vec::with_capacity(state.len());
    for g in 0..v {
        let mut group: Vec<u32> = (0..n).map(|s| (s * v + g) as u32).collect();
        group.shuffle(rng);
        slots.extend(group);
    }
    let j = state.add_layout(slots);
    let mut list = Vec::new();
    let mut partner_bits = 0.0;
    for g in 0..v {
        let p = match cfg.qber_policy {
            QberPolicy::Adjusted => (p_bin - partner_bits / (2.0 * n as f64 * v as f64)).max(0.0),
            QberPolicy::Fixed => p_bin,
        };
        let k = first_block_size(p, n);
        let blocks = state.cut_blocks(j, (g * n) as u32, ((g + 1) * n) as u32, k);
        let before = state.transcript().bits_of(EventKind::PartnerBits);
        list.extend(state.process_batch(&blocks)?);
        partner_bits += (state.transcript().bits_of(EventKind::PartnerBits) - before) as f64;
    }
    state.cascade_step(list)
}

/// Second iteration: unknown bits grouped by the size `t` of their smallest
/// first-iteration block, whose matching parity makes an error less likely
/// the smaller `t` is. Small groups are merged with their neighbours; each
/// group gets its own block size. Returns the top-level blocks.
fn second_iteration_layout(
    state: &mut CascadeState,
    rng: &mut SimRng,
    p_bin: f64,
    q: usize,
    merge_factor: usize,
) -> Vec<BlockRef> {
    let n_bits = state.len();
    let mut by_t: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for b in unknown_bits(state) {
        let t = state.smallest(0, b).map_or(0, |r| r.size);
        by_t.entry(t).or_default().push(b);
    }
    let rate = |t: u32| if t == 0 { p_bin } else { qber_second(t, p_bin) };

    // (bits, summed error rate)
    let mut groups: Vec<(Vec<u32>, f64)> = Vec::new();
    let mut cur: (Vec<u32>, f64) = (Vec::new(), 0.0);
    for (t, bits) in by_t {
        cur.1 += rate(t) * bits.len() as f64;
        cur.0.extend(bits);
        let k = second_block_size(cur.1 / cur.0.len() as f64, q, n_bits);
        if cur.0.len() >= merge_factor * k {
            groups.push(std::mem::take(&mut cur));
        }
    }
    if !cur.0.is_empty() {
        match groups.last_mut() {
            Some(last) => {
                last.0.extend(cur.0);
                last.1 += cur.1;
            }
            None => groups.push(cur),
        }
    }

    let mut slots = Vec::with_capacity(n_bits);
    let mut spans = Vec::with_capacity(groups.len());
    for (mut bits, total) in groups {
        let k = second_block_size(total / bits.len() as f64, q, bits.len());
        bits.shuffle(rng);
        let start = slots.len() as u32;
        slots.extend(bits);
        spans.push((start, slots.len() as u32, k));
    }
    let j = state.add_layout(slots);
    spans.into_iter().flat_map(|(s, e, k)| state.cut_blocks(j, s, e, k)).collect()
}
