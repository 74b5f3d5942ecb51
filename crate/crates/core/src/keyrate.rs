//! Secret key length of a one-decoy protocol block and the relative gain
//! from a better reconciliation method.
//!
//! Vacuum and single-photon detection bounds and the phase-error bound are
//! inputs here, read from count scenarios; only the reconciliation leakage
//! varies between methods.

use std::path::Path;

use crate::channel::{conditional_entropy, Base, ChannelParams};
use crate::error::{Error, Result};
use crate::scalar::{xlog2x, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateInputs<F = f64> {
    pub q: usize,
    /// Lower bound on vacuum detections in the block.
    pub d0: F,
    /// Lower bound on single-photon detections in the block.
    pub d1: F,
    /// Upper bound on the phase error rate.
    pub phi_z: F,
    pub leak_ir: F,
    pub eps_sec: F,
    pub eps_cor: F,
}

impl<F: Real> KeyRateInputs<F> {
    pub fn validate(&self) -> Result<()> {
        if self.q < 2 {
            return Err(Error::Config(format!("dimension {} below 2", self.q)));
        }
        if !(self.phi_z >= F::zero() && self.phi_z <= F::one()) {
            return Err(Error::Config(format!("phase error bound {} outside [0, 1]", self.phi_z)));
        }
        for (name, e) in [("eps_sec", self.eps_sec), ("eps_cor", self.eps_cor)] {
            if !(e > F::zero() && e < F::one()) {
                return Err(Error::Config(format!("{name} = {e} outside (0, 1)")));
            }
        }
        if !(self.d0 >= F::zero() && self.d1 >= F::zero() && self.leak_ir >= F::zero()) {
            return Err(Error::Config("counts and leakage must be non-negative".into()));
        }
        Ok(())
    }
}

/// q-ary entropy of the phase errors, in bits.
pub fn h_hd<F: Real>(phi_z: F, q: usize) -> F {
    let q1 = F::of_usize(q - 1);
    let spread = if phi_z > F::zero() { -phi_z * (phi_z / q1).log2() } else { F::zero() };
    spread - xlog2x(F::one() - phi_z)
}

/// Finite-size penalty `6 log2(19/eps_sec) + log2(2/eps_cor)` in bits.
pub fn security_penalty<F: Real>(eps_sec: F, eps_cor: F) -> F {
    F::of(6.0) * (F::of(19.0) / eps_sec).log2() + (F::of(2.0) / eps_cor).log2()
}

/// Right-hand side of the key-length bound, before clamping.
pub fn key_length_bound<F: Real>(inp: &KeyRateInputs<F>) -> F {
    let v = F::of_usize(inp.q).log2();
    v * inp.d0 + inp.d1 * (v - h_hd(inp.phi_z, inp.q)) - inp.leak_ir - security_penalty(inp.eps_sec, inp.eps_cor)
}

/// Extractable key bits per block; 0 when the bound is negative.
pub fn secret_key_length<F: Real>(inp: &KeyRateInputs<F>) -> F {
    key_length_bound(inp).max(F::zero())
}

/// `a / b - 1`. A positive rate against a zero one is an infinite
/// improvement (range extension); two zero rates compare equal.
pub fn relative_improvement<F: Real>(skr_a: F, skr_b: F) -> F {
    if skr_b > F::zero() {
        skr_a / skr_b - F::one()
    } else if skr_a > F::zero() {
        F::infinity()
    } else {
        F::zero()
    }
}

/// Reconciliation leakage of a block of `n` symbols reconciled with
/// efficiency `f` at symbol error rate `qber`.
pub fn leak_for_efficiency(f: f64, n: f64, q: usize, qber: f64) -> Result<f64> {
    Ok(f * n * conditional_entropy(&ChannelParams::new(q, qber)?, Base::Two))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRow {
    pub loss_db: f64,
    pub d0: f64,
    pub d1: f64,
    pub phi_z: f64,
    /// Sifted key-basis symbols per block.
    pub n: f64,
    /// Key-basis symbol error rate; defaults to `phi_z` when absent.
    pub qber: f64,
}

/// Count scenarios of one setup: a dimension, security parameters and one
/// row per channel loss.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub q: usize,
    pub eps_sec: f64,
    pub eps_cor: f64,
    pub rows: Vec<ScenarioRow>,
}

impl Scenario {
    /// Parses lines of `q 32`, `eps_sec 1e-12`, `eps_cor 1e-12` and
    /// `row loss_db=.. d0=.. d1=.. phi_z=.. n=.. [qber=..]`; `#` starts a
    /// comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut q = None;
        let (mut eps_sec, mut eps_cor) = (1e-12, 1e-12);
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            let num = |s: &str| s.parse::<f64>().map_err(|_| err(format!("bad number {s:?}")));
            let mut words = line.split_whitespace();
            let key = words.next().unwrap_or_default();
            match key {
                "row" => {
                    let mut fields = std::collections::HashMap::new();
                    for kv in words {
                        let (k, v) = kv.split_once('=').ok_or_else(|| err(format!("expected key=value, got {kv:?}")))?;
                        fields.insert(k, num(v)?);
                    }
                    let get = |k: &str| fields.get(k).copied().ok_or_else(|| err(format!("row lacks {k}")));
                    let phi_z = get("phi_z")?;
                    rows.push(ScenarioRow {
                        loss_db: get("loss_db")?,
                        d0: get("d0")?,
                        d1: get("d1")?,
                        phi_z,
                        n: get("n")?,
                        qber: fields.get("qber").copied().unwrap_or(phi_z),
                    });
                }
                "q" | "eps_sec" | "eps_cor" => {
                    let val = words.next().ok_or_else(|| err(format!("{key} needs a value")))?;
                    match key {
                        "q" => q = Some(val.parse::<usize>().map_err(|_| err(format!("bad dimension {val:?}")))?),
                        "eps_sec" => eps_sec = num(val)?,
                        _ => eps_cor = num(val)?,
                    }
                }
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        let q = q.ok_or_else(|| Error::Config("scenario lacks q".into()))?;
        let s = Self { q, eps_sec, eps_cor, rows };
        for r in &s.rows {
            s.inputs(r, 0.0).validate()?;
            if !(r.qber >= 0.0 && r.qber < 1.0 && r.n > 0.0) {
                return Err(Error::Config(format!("row at {} dB: bad qber or n", r.loss_db)));
            }
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn inputs(&self, row: &ScenarioRow, leak_ir: f64) -> KeyRateInputs {
        KeyRateInputs {
            q: self.q,
            d0: row.d0,
            d1: row.d1,
            phi_z: row.phi_z,
            leak_ir,
            eps_sec: self.eps_sec,
            eps_cor: self.eps_cor,
        }
    }

    /// Key length of `row` when reconciled with efficiency `f`.
    pub fn key_length(&self, row: &ScenarioRow, f: f64) -> Result<f64> {
        let leak = leak_for_efficiency(f, row.n, self.q, row.qber)?;
        Ok(secret_key_length(&self.inputs(row, leak)))
    }
}
