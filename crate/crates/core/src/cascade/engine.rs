//! Shared state of a Cascade run: both working strings, the permutation
//! layout of every iteration, the smallest-block index and the transcript.
//!
//! Alice's side is static, so her block parities come from prefix XORs;
//! Bob's string changes as errors are corrected, so each layout keeps a
//! Fenwick tree over his bits. A bit that both parties know (a located
//! error or a disclosed partner bit) is "known": it is left out of later
//! layouts and skipped by binary search, because it can no longer differ.

use crate::error::{Error, Result};
use crate::transcript::{EventKind, Transcript};

const NONE: u32 = u32::MAX;

/// A contiguous slot range `[start, end)` of one iteration's layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockRef {
    pub iteration: usize,
    pub start: u32,
    pub end: u32,
}

/// Smallest block with known parity containing a bit; `size` counts the
/// bits that were unknown when the parity was learned (0 = no record).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SmallestBlock {
    pub start: u32,
    pub end: u32,
    pub size: u32,
}

/// XOR Fenwick tree over bits.
#[derive(Debug, Clone)]
struct Fenwick {
    tree: Vec<u8>,
}

impl Fenwick {
    fn new(bits: impl ExactSizeIterator<Item = u8>) -> Self {
        let n = bits.len();
        let mut tree = vec![0u8; n + 1];
        for (i, b) in bits.enumerate() {
            tree[i + 1] = b;
        }
        for i in 1..=n {
            let j = i + (i & i.wrapping_neg());
            if j <= n {
                tree[j] ^= tree[i];
            }
        }
        Self { tree }
    }

    fn toggle(&mut self, i: usize) {
        let mut i = i + 1;
        while i < self.tree.len() {
            self.tree[i] ^= 1;
            i += i & i.wrapping_neg();
        }
    }

    /// XOR of the first `i` entries.
    fn prefix(&self, mut i: usize) -> u8 {
        let mut s = 0;
        while i > 0 {
            s ^= self.tree[i];
            i &= i - 1;
        }
        s
    }
}

#[derive(Debug, Clone)]
struct Layout {
    slots: Vec<u32>,
    slot_of: Vec<u32>,
    alice_prefix: Vec<u8>,
    bob: Fenwick,
    /// Top-level blocks whose parity Alice has disclosed.
    tops: Vec<BlockRef>,
}

/// Counters beyond what the transcript records.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CascadeStats {
    pub searches: usize,
    pub corrected: usize,
    pub partner_requests: usize,
}

#[derive(Debug, Clone)]
pub struct CascadeState {
    v: usize,
    alice: Vec<u8>,
    bob: Vec<u8>,
    known: Vec<bool>,
    layouts: Vec<Layout>,
    smallest: Vec<Vec<SmallestBlock>>,
    flags: Vec<u16>,
    partners: bool,
    batched: bool,
    round_budget: Option<u32>,
    transcript: Transcript,
    stats: CascadeStats,
}

impl CascadeState {
    /// `v` bits per symbol; bit `s*v + b` is plane `b` of symbol `s`.
    /// `partners` enables partner-bit requests, `batched` switches the
    /// accounting from one message per parity to one round per batch.
    pub fn new(alice: Vec<u8>, bob: Vec<u8>, v: usize, partners: bool, batched: bool) -> Result<Self> {
        if alice.len() != bob.len() {
            return Err(Error::LengthMismatch { expected: alice.len(), actual: bob.len() });
        }
        if v == 0 || !alice.len().is_multiple_of(v) {
            return Err(Error::Config(format!("{} bits do not split into {v}-bit symbols", alice.len())));
        }
        if alice.iter().chain(&bob).any(|&b| b > 1) {
            return Err(Error::Config("working strings must hold 0/1 values".into()));
        }
        let n = alice.len();
        Ok(Self {
            v,
            alice,
            bob,
            known: vec![false; n],
            layouts: Vec::new(),
            smallest: Vec::new(),
            flags: vec![0; n],
            partners,
            batched,
            round_budget: None,
            transcript: Transcript::new(),
            stats: CascadeStats::default(),
        })
    }

    pub fn with_round_budget(mut self, budget: Option<u32>) -> Self {
        self.round_budget = budget;
        self
    }

    pub fn len(&self) -> usize {
        self.alice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alice.is_empty()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.v
    }

    pub fn bob(&self) -> &[u8] {
        &self.bob
    }

    pub fn alice(&self) -> &[u8] {
        &self.alice
    }

    pub fn is_known(&self, bit: u32) -> bool {
        self.known[bit as usize]
    }

    pub fn residual_errors(&self) -> usize {
        self.alice.iter().zip(&self.bob).filter(|(a, b)| a != b).count()
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }

    pub fn stats(&self) -> CascadeStats {
        self.stats
    }

    pub fn iterations(&self) -> usize {
        self.layouts.len()
    }

    pub fn smallest(&self, iteration: usize, bit: u32) -> Option<SmallestBlock> {
        let r = self.smallest[iteration][bit as usize];
        (r.size > 0).then_some(r)
    }

    pub fn is_flagged(&self, bit: u32, iteration: usize) -> bool {
        self.flags[bit as usize] & (1 << iteration) != 0
    }

    pub fn flag(&mut self, bit: u32, iteration: usize) {
        self.flags[bit as usize] |= 1 << iteration;
    }

    /// Bits currently in slots `[start, end)` of a layout.
    pub fn block_bits(&self, b: BlockRef) -> &[u32] {
        &self.layouts[b.iteration].slots[b.start as usize..b.end as usize]
    }

    /// Number of slots in an iteration's layout.
    pub fn block_len(&self, iteration: usize) -> u32 {
        self.layouts[iteration].slots.len() as u32
    }

    /// Slot of `bit` in an iteration, if the bit takes part in it.
    pub fn slot_of(&self, iteration: usize, bit: u32) -> Option<u32> {
        let s = self.layouts[iteration].slot_of[bit as usize];
        (s != NONE).then_some(s)
    }

    /// Partner bits of `bit`: the other planes of the same symbol.
    pub fn partners_of(&self, bit: u32) -> impl Iterator<Item = u32> {
        let v = self.v as u32;
        let base = bit - bit % v;
        (base..base + v).filter(move |&b| b != bit)
    }

    /// Installs the slot order of a new iteration and returns its index.
    /// Every listed bit must be distinct.
    pub fn add_layout(&mut self, slots: Vec<u32>) -> usize {
        assert!(self.layouts.len() < 16, "at most 16 iterations");
        let n = self.len();
        let mut slot_of = vec![NONE; n];
        let mut alice_prefix = Vec::with_capacity(slots.len() + 1);
        alice_prefix.push(0u8);
        for (s, &b) in slots.iter().enumerate() {
            debug_assert_eq!(slot_of[b as usize], NONE, "bit listed twice");
            slot_of[b as usize] = s as u32;
            alice_prefix.push(alice_prefix[s] ^ self.alice[b as usize]);
        }
        let bob = Fenwick::new(slots.iter().map(|&b| self.bob[b as usize]));
        self.layouts.push(Layout { slots, slot_of, alice_prefix, bob, tops: Vec::new() });
        self.smallest.push(vec![SmallestBlock::default(); n]);
        self.layouts.len() - 1
    }

    fn unknown_count(&self, b: BlockRef) -> u32 {
        self.block_bits(b).iter().filter(|&&x| !self.known[x as usize]).count() as u32
    }

    /// Splits slots `[start, end)` into consecutive blocks holding about `k`
    /// unknown bits each (counts differ by at most one). Known bits ride
    /// along in whichever block they fall into.
    pub fn cut_blocks(&self, iteration: usize, start: u32, end: u32, k: usize) -> Vec<BlockRef> {
        let slots = &self.layouts[iteration].slots[start as usize..end as usize];
        let unknown: Vec<u32> = slots
            .iter()
            .enumerate()
            .filter(|(_, &b)| !self.known[b as usize])
            .map(|(i, _)| start + i as u32)
            .collect();
        let u = unknown.len();
        if u == 0 {
            return Vec::new();
        }
        let count = u.div_ceil(k.max(1));
        let mut blocks = Vec::with_capacity(count);
        let mut first = start;
        for c in 0..count {
            let last_unknown = (c + 1) * u / count - 1;
            let stop = if c + 1 == count { end } else { unknown[last_unknown] + 1 };
            blocks.push(BlockRef { iteration, start: first, end: stop });
            first = stop;
        }
        blocks
    }

    fn parity_mismatch(&self, b: BlockRef) -> bool {
        let l = &self.layouts[b.iteration];
        let (s, e) = (b.start as usize, b.end as usize);
        let alice = l.alice_prefix[e] ^ l.alice_prefix[s];
        let bob = l.bob.prefix(e) ^ l.bob.prefix(s);
        alice != bob
    }

    /// Whether Bob's parity of `b` currently differs from Alice's. Only
    /// meaningful for blocks whose parity Alice has disclosed.
    pub fn mismatch(&self, b: BlockRef) -> bool {
        self.parity_mismatch(b)
    }

    fn emit_parities(&mut self, count: usize) {
        if count == 0 {
            return;
        }
        if self.batched {
            self.transcript.send(EventKind::ParityBatch, count as i64, count as u32);
        } else {
            for _ in 0..count {
                self.transcript.send(EventKind::Parity, 1, 1);
            }
        }
    }

    /// Notes that Alice's parity of `b` is known, for bits not yet covered
    /// by a smaller block of the same iteration.
    fn record(&mut self, b: BlockRef, size: u32) {
        let l = &self.layouts[b.iteration];
        let index = &mut self.smallest[b.iteration];
        for &x in &l.slots[b.start as usize..b.end as usize] {
            if self.known[x as usize] {
                continue;
            }
            let r = &mut index[x as usize];
            if r.size == 0 || size < r.size {
                *r = SmallestBlock { start: b.start, end: b.end, size };
            }
        }
    }

    /// Alice discloses the parities of top-level blocks (one message each,
    /// or one batch). Blocks without unknown bits are skipped. Returns the
    /// blocks whose parities disagree.
    pub fn disclose(&mut self, blocks: &[BlockRef]) -> Vec<BlockRef> {
        let sized: Vec<(BlockRef, u32)> =
            blocks.iter().map(|&b| (b, self.unknown_count(b))).filter(|&(_, u)| u > 0).collect();
        self.emit_parities(sized.len());
        let mut bad = Vec::new();
        for (b, u) in sized {
            self.layouts[b.iteration].tops.push(b);
            self.record(b, u);
            if self.parity_mismatch(b) {
                bad.push(b);
            }
        }
        bad
    }

    /// Binary searches on mismatching blocks, run level by level so that a
    /// batch costs one round per halving. Returns `(bit, iteration)` per
    /// search; nothing is corrected yet.
    pub fn search(&mut self, blocks: &[BlockRef]) -> Result<Vec<(u32, usize)>> {
        if let Some(b) = blocks.iter().find(|&&b| !self.parity_mismatch(b)) {
            return Err(Error::Protocol(format!("binary search on a matching block {b:?}")));
        }
        self.stats.searches += blocks.len();
        let mut active = blocks.to_vec();
        let mut found = Vec::new();
        while !active.is_empty() {
            let mut splits = Vec::with_capacity(active.len());
            for b in active.drain(..) {
                let l = &self.layouts[b.iteration];
                let unknown: Vec<u32> = (b.start..b.end).filter(|&s| !self.known[l.slots[s as usize] as usize]).collect();
                match unknown.len() {
                    0 => return Err(Error::Protocol("mismatching block without unknown bits".into())),
                    1 => found.push((l.slots[unknown[0] as usize], b.iteration)),
                    u => {
                        let h = u.div_ceil(2);
                        splits.push((b, unknown[h], h as u32, (u - h) as u32));
                    }
                }
            }
            self.emit_parities(splits.len());
            for (b, mid, lsize, rsize) in splits {
                let left = BlockRef { end: mid, ..b };
                let right = BlockRef { start: mid, ..b };
                // the sibling's parity follows from the parent's
                if self.parity_mismatch(left) {
                    self.record(right, rsize);
                    active.push(left);
                } else {
                    self.record(left, lsize);
                    active.push(right);
                }
            }
        }
        Ok(found)
    }

    /// Single binary search; the contract violation of searching a matching
    /// block is reported as an error.
    pub fn binary_search_block(&mut self, b: BlockRef) -> Result<u32> {
        Ok(self.search(&[b])?[0].0)
    }

    fn flip(&mut self, bit: u32) {
        self.bob[bit as usize] ^= 1;
        for l in &mut self.layouts {
            let s = l.slot_of[bit as usize];
            if s != NONE {
                l.bob.toggle(s as usize);
            }
        }
    }

    /// Corrects a bit located by a search in `iteration`: it becomes known,
    /// its block there shrinks to itself and that iteration is flagged.
    pub fn correct_located(&mut self, bit: u32, iteration: usize) {
        if !self.known[bit as usize] {
            self.flip(bit);
            self.known[bit as usize] = true;
            self.stats.corrected += 1;
        }
        let s = self.layouts[iteration].slot_of[bit as usize];
        self.smallest[iteration][bit as usize] = SmallestBlock { start: s, end: s + 1, size: 1 };
        self.flag(bit, iteration);
    }

    /// Alice reveals the still-unknown partner bits of each error; Bob fixes
    /// the wrong ones, which are returned.
    pub fn request_partners(&mut self, errors: &[u32]) -> Vec<u32> {
        if !self.partners || self.v == 1 {
            return Vec::new();
        }
        let mut wrong = Vec::new();
        let (mut bits, mut requests) = (0usize, 0usize);
        for &e in errors {
            let fresh: Vec<u32> = self.partners_of(e).filter(|&p| !self.known[p as usize]).collect();
            if fresh.is_empty() {
                continue;
            }
            requests += 1;
            bits += fresh.len();
            if !self.batched {
                self.transcript.send(EventKind::PartnerBits, fresh.len() as i64, 1);
            }
            for p in fresh {
                self.known[p as usize] = true;
                if self.alice[p as usize] != self.bob[p as usize] {
                    self.flip(p);
                    self.stats.corrected += 1;
                    wrong.push(p);
                }
            }
        }
        if self.batched && requests > 0 {
            self.transcript.send(EventKind::PartnerBits, bits as i64, requests as u32);
        }
        self.stats.partner_requests += requests;
        wrong
    }

    /// Corrects located errors and requests their partners; returns every
    /// newly corrected bit.
    fn settle(&mut self, found: Vec<(u32, usize)>) -> Vec<u32> {
        let mut fresh = Vec::with_capacity(found.len());
        for (bit, it) in found {
            if !self.known[bit as usize] {
                fresh.push(bit);
            }
            self.correct_located(bit, it);
        }
        let wrong = self.request_partners(&fresh);
        fresh.extend(wrong);
        fresh
    }

    /// Parities of a set of top-level blocks, searches on the mismatching
    /// ones, corrections and partner requests. Returns all corrected bits.
    pub fn process_batch(&mut self, blocks: &[BlockRef]) -> Result<Vec<u32>> {
        let bad = self.disclose(blocks);
        let found = self.search(&bad)?;
        Ok(self.settle(found))
    }

    /// Serial processing: block by block, each located error immediately
    /// cascaded through every iteration so far.
    pub fn process_serial(&mut self, blocks: &[BlockRef]) -> Result<()> {
        for &b in blocks {
            if self.disclose(&[b]).is_empty() {
                continue;
            }
            let found = self.search(&[b])?;
            let list = self.settle(found);
            self.cascade_step(list)?;
        }
        Ok(())
    }

    /// Re-checks every disclosed top-level block. Cascading only looks at
    /// the smallest block per iteration, so an odd count can hide in an
    /// enclosing block; the parities are already public, so finding such
    /// blocks is free and only their searches cost anything.
    pub fn sweep(&mut self) -> Result<()> {
        loop {
            let bad: Vec<BlockRef> = self
                .layouts
                .iter()
                .flat_map(|l| l.tops.iter().copied())
                .filter(|&b| self.parity_mismatch(b))
                .collect();
            if bad.is_empty() {
                return Ok(());
            }
            if self.batched {
                let found = self.search(&bad)?;
                let list = self.settle(found);
                self.cascade_step(list)?;
            } else {
                for b in bad {
                    if self.parity_mismatch(b) {
                        let found = self.search(&[b])?;
                        let list = self.settle(found);
                        self.cascade_step(list)?;
                    }
                }
            }
        }
    }

    fn all_flagged(&self, bit: u32) -> bool {
        let all = (1u32 << self.layouts.len()) - 1;
        u32::from(self.flags[bit as usize]) & all == all
    }

    /// One pass of the Cascade step: every listed error picks its smallest
    /// block among iterations not yet processed for it; mismatching blocks
    /// are searched, fresh errors and wrong partners join the list, and
    /// errors with every iteration processed leave it.
    pub fn cascade_pass(&mut self, list: &mut Vec<u32>) -> Result<()> {
        let mut chosen = Vec::new();
        for &e in list.iter() {
            let mut best: Option<(u32, usize)> = None;
            for j in 0..self.layouts.len() {
                if self.is_flagged(e, j) {
                    continue;
                }
                let r = self.smallest[j][e as usize];
                if r.size == 0 {
                    self.flag(e, j);
                } else if best.is_none_or(|(s, _)| r.size < s) {
                    best = Some((r.size, j));
                }
            }
            if let Some((_, j)) = best {
                self.flag(e, j);
                let r = self.smallest[j][e as usize];
                chosen.push(BlockRef { iteration: j, start: r.start, end: r.end });
            }
        }
        chosen.sort_unstable();
        chosen.dedup();
        if self.batched {
            let bad: Vec<BlockRef> = chosen.into_iter().filter(|&b| self.parity_mismatch(b)).collect();
            let found = self.search(&bad)?;
            let fresh = self.settle(found);
            list.extend(fresh);
        } else {
            for b in chosen {
                // earlier corrections in this pass may have fixed it
                if self.parity_mismatch(b) {
                    let found = self.search(&[b])?;
                    let fresh = self.settle(found);
                    list.extend(fresh);
                }
            }
        }
        list.retain(|&e| !self.all_flagged(e));
        Ok(())
    }

    /// Runs passes until the list empties or the round budget is spent.
    pub fn cascade_step(&mut self, mut list: Vec<u32>) -> Result<()> {
        let start = self.transcript.current_round();
        while !list.is_empty() {
            if let Some(budget) = self.round_budget {
                if self.transcript.current_round() - start >= budget {
                    break;
                }
            }
            self.cascade_pass(&mut list)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(alice: &[u8], bob: &[u8], v: usize) -> CascadeState {
        CascadeState::new(alice.to_vec(), bob.to_vec(), v, v > 1, false).unwrap()
    }

    #[test]
    fn fenwick_prefixes() {
        let bits = [1u8, 0, 1, 1, 0, 0, 1, 0, 1];
        let mut f = Fenwick::new(bits.iter().copied());
        let mut naive = bits.to_vec();
        for i in 0..=bits.len() {
            assert_eq!(f.prefix(i), naive[..i].iter().fold(0, |a, b| a ^ b));
        }
        f.toggle(3);
        naive[3] ^= 1;
        for i in 0..=bits.len() {
            assert_eq!(f.prefix(i), naive[..i].iter().fold(0, |a, b| a ^ b));
        }
    }

    #[test]
    fn length_one_block_costs_nothing() {
        let mut s = state(&[1, 0], &[0, 0], 1);
        s.add_layout(vec![0, 1]);
        let b = BlockRef { iteration: 0, start: 0, end: 1 };
        assert_eq!(s.binary_search_block(b).unwrap(), 0);
        assert_eq!(s.transcript().leak_bits(), 0);
    }

    #[test]
    fn single_error_in_eight_costs_three_parities() {
        for pos in 0..8 {
            let alice = vec![0u8; 8];
            let mut bob = alice.clone();
            bob[pos] = 1;
            let mut s = state(&alice, &bob, 1);
            s.add_layout((0..8).collect());
            let b = BlockRef { iteration: 0, start: 0, end: 8 };
            assert_eq!(s.binary_search_block(b).unwrap(), pos as u32);
            assert_eq!(s.transcript().leak_bits(), 3);
        }
    }

    #[test]
    fn three_errors_in_eight_follow_the_odd_half() {
        // every 3-error pattern: the search ends on an error and leaks 3
        for pattern in 0u32..256 {
            if pattern.count_ones() != 3 {
                continue;
            }
            let alice = vec![0u8; 8];
            let bob: Vec<u8> = (0..8).map(|i| (pattern >> i & 1) as u8).collect();
            let mut s = state(&alice, &bob, 1);
            s.add_layout((0..8).collect());
            let found = s.binary_search_block(BlockRef { iteration: 0, start: 0, end: 8 }).unwrap();
            assert_eq!(bob[found as usize], 1);
            // the path picks the first half whenever it holds an odd count
            let mut lo = 0;
            let mut len = 8;
            while len > 1 {
                let h = len / 2;
                let odd = (lo..lo + h).filter(|&i| bob[i] == 1).count() % 2 == 1;
                if !odd {
                    lo += h;
                }
                len -= if odd { len - h } else { h };
            }
            assert_eq!(found, lo as u32);
            assert_eq!(s.transcript().leak_bits(), 3);
        }
    }

    #[test]
    fn searching_a_matching_block_is_an_error() {
        let mut s = state(&[0, 0, 0, 0], &[1, 1, 0, 0], 1);
        s.add_layout((0..4).collect());
        assert!(s.binary_search_block(BlockRef { iteration: 0, start: 0, end: 4 }).is_err());
    }

    #[test]
    fn search_records_matching_halves() {
        let alice = vec![0u8; 8];
        let mut bob = alice.clone();
        bob[5] = 1;
        let mut s = state(&alice, &bob, 1);
        s.add_layout((0..8).collect());
        let top = BlockRef { iteration: 0, start: 0, end: 8 };
        assert_eq!(s.disclose(&[top]), vec![top]);
        let e = s.binary_search_block(top).unwrap();
        s.correct_located(e, 0);
        assert_eq!(s.smallest(0, 0).unwrap().size, 4);
        assert_eq!(s.smallest(0, 7).unwrap().size, 2);
        assert_eq!(s.smallest(0, 4).unwrap().size, 1);
        assert_eq!(s.smallest(0, 5).unwrap().size, 1);
        assert_eq!(s.residual_errors(), 0);
    }

    #[test]
    fn known_bits_are_skipped() {
        // bits 0..3 known: the search over 8 slots only halves the other 4
        let alice = vec![0u8; 8];
        let mut bob = alice.clone();
        bob[6] = 1;
        let mut s = state(&alice, &bob, 1);
        s.known[..4].fill(true);
        s.add_layout((0..8).collect());
        let b = BlockRef { iteration: 0, start: 0, end: 8 };
        assert_eq!(s.binary_search_block(b).unwrap(), 6);
        assert_eq!(s.transcript().leak_bits(), 2);
    }

    #[test]
    fn blocks_are_cut_by_unknown_count() {
        let mut s = state(&[0; 10], &[0; 10], 1);
        s.add_layout((0..10).collect());
        let b = s.cut_blocks(0, 0, 10, 4);
        let sizes: Vec<u32> = b.iter().map(|b| b.end - b.start).collect();
        assert_eq!(sizes, vec![3, 3, 4]);
        s.known[0] = true;
        s.known[1] = true;
        let b = s.cut_blocks(0, 0, 10, 4);
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].start, 0);
        assert_eq!(b.last().unwrap().end, 10);
        assert!(b.iter().all(|&b| s.unknown_count(b) == 4));
    }

    #[test]
    fn empty_list_is_a_no_op() {
        let mut s = state(&[0; 4], &[0; 4], 1);
        s.add_layout((0..4).collect());
        s.cascade_step(Vec::new()).unwrap();
        assert!(s.transcript().is_empty());
    }

    #[test]
    fn partner_request_corrects_wrong_partners() {
        // q = 8: symbol 1 occupies bits 3, 4, 5
        let alice = vec![0u8; 9];
        let mut bob = alice.clone();
        bob[3] = 1;
        bob[5] = 1;
        let mut s = state(&alice, &bob, 3);
        s.add_layout((0..9).collect());
        s.correct_located(3, 0);
        assert_eq!(s.request_partners(&[3]), vec![5]);
        assert_eq!(s.transcript().bits_of(EventKind::PartnerBits), 2);
        assert!(s.is_known(4) && s.is_known(5));
        assert_eq!(s.residual_errors(), 0);
        // nothing left to reveal for this symbol
        assert!(s.request_partners(&[3]).is_empty());
        assert_eq!(s.transcript().bits_of(EventKind::PartnerBits), 2);
    }
}
