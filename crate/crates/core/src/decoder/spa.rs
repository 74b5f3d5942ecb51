//! Flooding-schedule sum-product decoder for GF(2^v) syndromes.
//!
//! Messages live on the nonzero entries of `H`, stored row-major in one flat
//! buffer of `q` reals per edge. Check nodes work in the probability domain
//! through the Walsh-Hadamard transform; variable nodes add LLRs.

use std::marker::PhantomData;

use super::fwht::{fwht_in_place, ifwht_in_place};
use super::llr::{argmin, normalize_in_place, probs_to_llr, LlrVector};
use crate::error::{Error, Result};
use crate::galois::{Gf, GfContext};
use crate::nbldpc::SparseParityMatrix;
use crate::scalar::Real;

pub const DEFAULT_MAX_ITERATIONS: usize = 100;

/// Read-only decoding graph for one parity-check matrix; shareable between
/// threads, each frame owning its own [`DecoderState`].
#[derive(Debug, Clone)]
pub struct Decoder<F> {
    ctx: GfContext,
    q: usize,
    n: usize,
    row_start: Vec<usize>,
    edge_col: Vec<u32>,
    edge_weight: Vec<Gf>,
    col_start: Vec<usize>,
    col_edges: Vec<u32>,
    max_row_degree: usize,
    max_iterations: usize,
    _scalar: PhantomData<F>,
}

/// Per-frame message state.
#[derive(Debug, Clone)]
pub struct DecoderState<F> {
    q: usize,
    cv: Vec<F>,
    vc: Vec<F>,
    prior: Vec<F>,
    aposteriori: Vec<F>,
    hard: Vec<Gf>,
    iteration: usize,
    max_iterations: usize,
    scratch: Scratch<F>,
}

/// Work buffers of the check update, grown on demand.
#[derive(Debug, Clone, Default)]
pub(crate) struct Scratch<F> {
    spectra: Vec<F>,
    products: Vec<F>,
    running: Vec<F>,
    probs: Vec<F>,
}

impl<F: Real> Scratch<F> {
    pub(crate) fn new(q: usize, d: usize) -> Self {
        Self {
            spectra: vec![F::zero(); d * q],
            products: vec![F::zero(); d * q],
            running: vec![F::zero(); q],
            probs: vec![F::zero(); q],
        }
    }

    fn fit(&mut self, q: usize, d: usize) {
        if self.spectra.len() < d * q {
            self.spectra.resize(d * q, F::zero());
            self.products.resize(d * q, F::zero());
        }
        if self.running.len() != q {
            self.running.resize(q, F::zero());
            self.probs.resize(q, F::zero());
        }
    }
}

/// Check-node update for one check of degree `d = weights.len()`: `vc` holds
/// the `d` incoming variable-to-check LLR vectors back to back, `cv`
/// receives the `d` extrinsic outgoing ones, for the constraint
/// `sum_t weights[t] * x_t = s`.
pub(crate) fn check_update<F: Real>(
    ctx: &GfContext,
    weights: &[Gf],
    vc: &[F],
    s: Gf,
    cv: &mut [F],
    scratch: &mut Scratch<F>,
) {
    let q = ctx.order();
    let d = weights.len();
    scratch.fit(q, d);
    let Scratch { spectra, products, running, probs } = scratch;
    let spectra = &mut spectra[..d * q];
    let products = &mut products[..d * q];

    // Spectrum of u = h * x for every incoming edge.
    for ((m, spec), &w) in vc.chunks_exact(q).zip(spectra.chunks_exact_mut(q)).zip(weights) {
        // unnormalized: the scale cancels in the final log-ratios
        let lo = m.iter().copied().fold(F::infinity(), F::min);
        for (&v, &r) in m.iter().zip(ctx.mul_row(w)) {
            spec[r as usize] = (lo - v).exp();
        }
        fwht_in_place(spec);
    }

    // Leave-one-out products via prefix and suffix sweeps.
    running.fill(F::one());
    for (prod, spec) in products.chunks_exact_mut(q).zip(spectra.chunks_exact(q)) {
        for ((p, r), &x) in prod.iter_mut().zip(running.iter_mut()).zip(spec) {
            *p = *r;
            *r *= x;
        }
    }
    running.fill(F::one());
    for (prod, spec) in products.chunks_exact_mut(q).zip(spectra.chunks_exact(q)).rev() {
        for ((p, r), &x) in prod.iter_mut().zip(running.iter_mut()).zip(spec) {
            *p *= *r;
            *r *= x;
        }
    }

    // Back to distributions of the partial sum w; x_t must satisfy
    // h * x_t + w = s, so P(x_t = k) = P(w = h*k + s).
    for ((dist, out), &w) in products.chunks_exact_mut(q).zip(cv.chunks_exact_mut(q)).zip(weights) {
        ifwht_in_place(dist);
        for (p, &r) in probs.iter_mut().zip(ctx.mul_row(w)) {
            *p = dist[(r ^ s) as usize];
        }
        probs_to_llr(probs, out);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub success: bool,
    /// Final hard decision (best effort on failure).
    pub symbols: Vec<Gf>,
    /// Message-passing iterations performed; 0 when the prior decision
    /// already satisfied the syndrome.
    pub iterations: usize,
}

impl<F: Real> Decoder<F> {
    pub fn new(h: &SparseParityMatrix, ctx: &GfContext) -> Result<Self> {
        if h.q() != ctx.order() {
            return Err(Error::LengthMismatch { expected: ctx.order(), actual: h.q() });
        }
        let mut row_start = Vec::with_capacity(h.m() + 1);
        let mut edge_col = Vec::with_capacity(h.edge_count());
        let mut edge_weight = Vec::with_capacity(h.edge_count());
        row_start.push(0);
        for row in h.rows() {
            for e in row {
                edge_col.push(e.col);
                edge_weight.push(e.weight);
            }
            row_start.push(edge_col.len());
        }
        let mut col_start = vec![0usize; h.n() + 1];
        for &c in &edge_col {
            col_start[c as usize + 1] += 1;
        }
        for j in 0..h.n() {
            col_start[j + 1] += col_start[j];
        }
        let mut fill = col_start.clone();
        let mut col_edges = vec![0u32; edge_col.len()];
        for (e, &c) in edge_col.iter().enumerate() {
            col_edges[fill[c as usize]] = e as u32;
            fill[c as usize] += 1;
        }
        Ok(Self {
            ctx: ctx.clone(),
            q: ctx.order(),
            n: h.n(),
            max_row_degree: h.rows().iter().map(Vec::len).max().unwrap_or(0),
            row_start,
            edge_col,
            edge_weight,
            col_start,
            col_edges,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            _scalar: PhantomData,
        })
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.row_start.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_col.len()
    }

    /// Edge index of entry `k` of row `i`.
    pub fn edge(&self, row: usize, k: usize) -> usize {
        self.row_start[row] + k
    }

    /// Fresh state: every variable sends its prior, check messages are
    /// uniform, and the hard decision is the prior's argmin.
    pub fn init(&self, priors: &[LlrVector<F>]) -> Result<DecoderState<F>> {
        if priors.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, actual: priors.len() });
        }
        let q = self.q;
        let mut prior = Vec::with_capacity(self.n * q);
        for p in priors {
            if p.len() != q {
                return Err(Error::LengthMismatch { expected: q, actual: p.len() });
            }
            prior.extend_from_slice(p.values());
        }
        let mut vc = vec![F::zero(); self.edge_count() * q];
        for (e, &c) in self.edge_col.iter().enumerate() {
            let c = c as usize;
            vc[e * q..(e + 1) * q].copy_from_slice(&prior[c * q..(c + 1) * q]);
        }
        let hard = prior.chunks_exact(q).map(argmin).collect();
        let d = self.max_row_degree.max(1);
        Ok(DecoderState {
            q,
            cv: vec![F::zero(); self.edge_count() * q],
            vc,
            aposteriori: prior.clone(),
            prior,
            hard,
            iteration: 0,
            max_iterations: self.max_iterations,
            scratch: Scratch::new(q, d),
        })
    }

    /// Recomputes every check-to-variable message of row `i` from the
    /// current variable-to-check messages.
    fn update_row(&self, st: &mut DecoderState<F>, i: usize, s: Gf) {
        let q = self.q;
        let (lo, hi) = (self.row_start[i], self.row_start[i + 1]);
        check_update(
            &self.ctx,
            &self.edge_weight[lo..hi],
            &st.vc[lo * q..hi * q],
            s,
            &mut st.cv[lo * q..hi * q],
            &mut st.scratch,
        );
    }

    /// Check-to-variable message on entry `k` of row `i` given the state's
    /// current variable-to-check messages (the state is not modified).
    pub fn check_to_variable(&self, st: &DecoderState<F>, row: usize, k: usize, s: Gf) -> LlrVector<F> {
        let mut tmp = st.clone();
        self.update_row(&mut tmp, row, s);
        let e = self.edge(row, k);
        LlrVector::from_values(tmp.cv[e * self.q..(e + 1) * self.q].to_vec())
    }

    /// Updates column `j` from the current check messages: a-posteriori sum,
    /// extrinsic outgoing messages and hard decision.
    fn update_column(&self, st: &mut DecoderState<F>, j: usize) {
        let q = self.q;
        let post = &mut st.aposteriori[j * q..(j + 1) * q];
        post.copy_from_slice(&st.prior[j * q..(j + 1) * q]);
        let edges = &self.col_edges[self.col_start[j]..self.col_start[j + 1]];
        for &e in edges {
            let e = e as usize;
            for (p, &c) in post.iter_mut().zip(&st.cv[e * q..(e + 1) * q]) {
                *p += c;
            }
        }
        for &e in edges {
            let e = e as usize;
            let out = &mut st.vc[e * q..(e + 1) * q];
            for ((o, &p), &c) in out.iter_mut().zip(post.iter()).zip(&st.cv[e * q..(e + 1) * q]) {
                *o = p - c;
            }
            normalize_in_place(out);
        }
        st.hard[j] = argmin(post);
    }

    /// Variable update of column `j`, returning the outgoing messages (in the
    /// column's edge order), the a-posteriori vector and the hard symbol.
    pub fn variable_update_and_decision(
        &self,
        st: &mut DecoderState<F>,
        j: usize,
    ) -> (Vec<LlrVector<F>>, Vec<F>, Gf) {
        self.update_column(st, j);
        let q = self.q;
        let out = self.col_edges[self.col_start[j]..self.col_start[j + 1]]
            .iter()
            .map(|&e| LlrVector::from_values(st.vc[e as usize * q..(e as usize + 1) * q].to_vec()))
            .collect();
        (out, st.aposteriori[j * q..(j + 1) * q].to_vec(), st.hard[j])
    }

    /// One flooding iteration: all checks, then all variables.
    pub fn iterate(&self, st: &mut DecoderState<F>, syndrome: &[Gf]) {
        for (i, &s) in syndrome.iter().enumerate() {
            self.update_row(st, i, s);
        }
        for j in 0..self.n {
            self.update_column(st, j);
        }
        st.iteration += 1;
    }

    /// Whether the current hard decision reproduces `syndrome`.
    pub fn satisfied(&self, st: &DecoderState<F>, syndrome: &[Gf]) -> bool {
        syndrome.iter().enumerate().all(|(i, &s)| {
            let acc = (self.row_start[i]..self.row_start[i + 1]).fold(0, |acc, e| {
                acc ^ self.ctx.mul(self.edge_weight[e], st.hard[self.edge_col[e] as usize])
            });
            acc == s
        })
    }

    /// Runs until the hard decision satisfies `syndrome` or the iteration
    /// budget is spent.
    pub fn decode(&self, syndrome: &[Gf], priors: &[LlrVector<F>]) -> Result<DecodeOutcome> {
        if syndrome.len() != self.m() {
            return Err(Error::LengthMismatch { expected: self.m(), actual: syndrome.len() });
        }
        let mut st = self.init(priors)?;
        let mut success = self.satisfied(&st, syndrome);
        while !success && st.iteration < st.max_iterations {
            self.iterate(&mut st, syndrome);
            success = self.satisfied(&st, syndrome);
        }
        Ok(DecodeOutcome { success, iterations: st.iteration, symbols: st.hard })
    }
}

impl<F: Real> DecoderState<F> {
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    pub fn hard_decision(&self) -> &[Gf] {
        &self.hard
    }

    pub fn cv_message(&self, edge: usize) -> &[F] {
        &self.cv[edge * self.q..(edge + 1) * self.q]
    }

    pub fn vc_message(&self, edge: usize) -> &[F] {
        &self.vc[edge * self.q..(edge + 1) * self.q]
    }

    pub fn prior(&self, col: usize) -> &[F] {
        &self.prior[col * self.q..(col + 1) * self.q]
    }

    pub fn aposteriori(&self, col: usize) -> &[F] {
        &self.aposteriori[col * self.q..(col + 1) * self.q]
    }

    /// Overwrites one variable-to-check message (for exercising single
    /// check updates).
    pub fn set_vc_message(&mut self, edge: usize, msg: &LlrVector<F>) {
        self.vc[edge * self.q..(edge + 1) * self.q].copy_from_slice(msg.values());
    }

    pub fn set_cv_message(&mut self, edge: usize, msg: &LlrVector<F>) {
        self.cv[edge * self.q..(edge + 1) * self.q].copy_from_slice(msg.values());
    }
}
