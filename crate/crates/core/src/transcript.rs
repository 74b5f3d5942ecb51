//! Append-only record of what crossed the public channel.
//!
//! Every disclosure is one [`Event`]; leakage and round counts are derived
//! from the event list, never tracked separately, so a transcript can be
//! replayed and re-audited.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    AliceToBob,
    BobToAlice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    /// LDPC syndrome of the working frame.
    Syndrome,
    /// Values of reserved positions switched from punctured to shortened.
    ShortenedValues,
    /// Key symbols sent in the clear once rate adaptation is exhausted.
    PlainReveal,
    /// Credit for punctured positions: syndrome symbols spent on values that
    /// are not part of the key. Carries negative bits.
    PunctureMask,
    /// One Cascade block parity.
    Parity,
    /// Several parities sent together in one message.
    ParityBatch,
    /// Other bits of a symbol whose bit was just corrected.
    PartnerBits,
    /// Bob's feedback or query; discloses nothing about the key.
    Request,
}

impl EventKind {
    fn leaks(self) -> bool {
        !matches!(self, EventKind::Request)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub direction: Direction,
    pub kind: EventKind,
    /// Disclosed bits (negative only for [`EventKind::PunctureMask`]).
    pub bits: i64,
    /// Separate items carried, e.g. parities in a batch.
    pub count: u32,
    /// Communication round, 1-based; non-decreasing along the transcript.
    pub round: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    events: Vec<Event>,
    round: u32,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts a new communication round; subsequent events belong to it.
    pub fn next_round(&mut self) -> u32 {
        self.round += 1;
        self.round
    }

    pub fn current_round(&self) -> u32 {
        self.round
    }

    /// Appends an event to the current round (opening round 1 if none).
    pub fn push(&mut self, direction: Direction, kind: EventKind, bits: i64, count: u32) {
        if self.round == 0 {
            self.round = 1;
        }
        self.events.push(Event { direction, kind, bits, count, round: self.round });
    }

    /// Alice-to-Bob disclosure in its own new round.
    pub fn send(&mut self, kind: EventKind, bits: i64, count: u32) {
        self.next_round();
        self.push(Direction::AliceToBob, kind, bits, count);
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Net information disclosed about the key, in bits.
    pub fn leak_bits(&self) -> i64 {
        self.events.iter().filter(|e| e.kind.leaks()).map(|e| e.bits).sum()
    }

    pub fn bits_of(&self, kind: EventKind) -> i64 {
        self.events.iter().filter(|e| e.kind == kind).map(|e| e.bits).sum()
    }

    /// Number of distinct rounds in which Alice sent something.
    pub fn message_rounds(&self) -> usize {
        let mut rounds: Vec<u32> = self
            .events
            .iter()
            .filter(|e| e.direction == Direction::AliceToBob && e.count > 0)
            .map(|e| e.round)
            .collect();
        rounds.dedup();
        rounds.len()
    }

    /// Messages Alice would send if every item travelled on its own.
    pub fn serial_message_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| e.direction == Direction::AliceToBob && e.kind.leaks())
            .map(|e| match e.kind {
                // the mask is bookkeeping, and a syndrome or a block of
                // shortened values is a single message
                EventKind::PunctureMask => 0,
                EventKind::Syndrome | EventKind::ShortenedValues | EventKind::PlainReveal => 1,
                _ => e.count as usize,
            })
            .sum()
    }

    pub fn write_jsonl(&self, mut w: impl Write) -> Result<()> {
        for e in &self.events {
            serde_json::to_writer(&mut w, e).map_err(|err| Error::Protocol(err.to_string()))?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    pub fn read_jsonl(r: impl BufRead) -> Result<Self> {
        let mut t = Transcript::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let e: Event = serde_json::from_str(&line).map_err(|err| Error::Parse { line: i + 1, msg: err.to_string() })?;
            if e.round < t.round {
                return Err(Error::Parse { line: i + 1, msg: "rounds must not decrease".into() });
            }
            t.round = e.round;
            t.events.push(e);
        }
        Ok(t)
    }
}
