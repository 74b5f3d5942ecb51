//! Monte-Carlo density evolution over sampled node populations.
//!
//! A population of `node_count` variable nodes with degrees drawn from
//! `lambda` keeps one channel prior per node and one message per edge socket.
//! Every iteration the sockets are dealt at random into checks whose degrees
//! follow `rho`, each check gets fresh random nonzero weights, and the
//! decoder's own check and variable updates are applied. Because fresh
//! connections are drawn each time the simulated graph has no cycles, which
//! is the density-evolution idealisation. Under the symmetric channel the
//! all-zero codeword is representative; decoding has converged when the mean
//! entropy of the variable-to-check messages falls below a small value.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{conditional_entropy, Base, ChannelParams};
use crate::decoder::{check_update, llr_from_channel, llr_to_probs, normalize_in_place, CheckScratch};
use crate::error::{Error, Result};
use crate::galois::{Gf, GfContext};
use crate::nbldpc::dist::largest_remainder;
use crate::nbldpc::DegreeDistribution;
use crate::rng::{self, stream, SimRng};
use crate::scalar::{xlog2x, Real};

pub const DEFAULT_NODE_COUNT: usize = 10_000;
pub const DEFAULT_MAX_ITERATIONS: usize = 150;
pub const DEFAULT_ENTROPY_THRESHOLD: f64 = 1e-4;
const MIN_NODE_COUNT: usize = 1000;

#[derive(Debug, Clone)]
pub struct EnsembleSim<F = f64> {
    pub dist: DegreeDistribution,
    pub node_count: usize,
    pub max_iterations: usize,
    /// Mean message entropy (bits) below which decoding counts as converged.
    pub entropy_threshold: F,
    pub qber_grid: Vec<F>,
}

impl<F: Real> EnsembleSim<F> {
    /// Desk-scale defaults: 10^4 nodes, 150 iterations, 1e-4 bits.
    pub fn new(dist: DegreeDistribution, qber_grid: Vec<F>) -> Self {
        Self {
            dist,
            node_count: DEFAULT_NODE_COUNT,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            entropy_threshold: F::of(DEFAULT_ENTROPY_THRESHOLD),
            qber_grid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count < MIN_NODE_COUNT {
            return Err(Error::Config(format!("node_count {} below {MIN_NODE_COUNT}", self.node_count)));
        }
        if !(self.entropy_threshold > F::zero()) {
            return Err(Error::Config("entropy threshold must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be positive".into()));
        }
        if self.qber_grid.is_empty() {
            return Err(Error::Config("empty QBER grid".into()));
        }
        if self.qber_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("QBER grid must be strictly ascending".into()));
        }
        if let Some(p) = self.qber_grid.iter().find(|p| !(**p >= F::zero() && **p < F::one())) {
            return Err(Error::Config(format!("QBER {p} outside [0, 1)")));
        }
        self.dist.validate()
    }
}

/// Outcome of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRecord {
    pub p: f64,
    pub success: bool,
    /// Iterations run (the converging one included).
    pub iterations: usize,
    /// Mean variable-to-check message entropy after each iteration, in bits.
    pub entropy: Vec<f64>,
}

/// Estimates the threshold as the largest grid QBER that converges; `None`
/// when none does. Grid points run concurrently, each from its own seed.
pub fn mcde_threshold<F: Real>(
    sim: &EnsembleSim<F>,
    ctx: &GfContext,
    seed: u64,
) -> Result<(Option<f64>, Vec<PointRecord>)> {
    sim.validate()?;
    if ctx.order() != sim.dist.q {
        return Err(Error::Config(format!("field GF({}) does not match ensemble q = {}", ctx.order(), sim.dist.q)));
    }
    let records: Vec<PointRecord> = sim
        .qber_grid
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            let mut rng = rng::rng(seed, &[stream::MCDE, i as u64]);
            simulate_point(sim, ctx, p, &mut rng)
        })
        .collect::<Result<_>>()?;
    let threshold = records.iter().rev().find(|r| r.success).map(|r| r.p);
    Ok((threshold, records))
}

/// Runs the population at a single QBER.
pub fn simulate_point<F: Real>(sim: &EnsembleSim<F>, ctx: &GfContext, p: F, rng: &mut SimRng) -> Result<PointRecord> {
    let q = ctx.order();
    let params = ChannelParams::new(q, p)?;
    let pop = Population::new(&sim.dist, sim.node_count, &params, rng);
    let mut record = pop.run(ctx, sim.max_iterations, sim.entropy_threshold, rng);
    record.p = p.as_f64();
    Ok(record)
}

struct Population<F> {
    q: usize,
    /// `node_start[i]..node_start[i+1]` are the sockets of variable node `i`.
    node_start: Vec<usize>,
    priors: Vec<F>,
    check_degrees: Vec<usize>,
    vc: Vec<F>,
    cv: Vec<F>,
}

impl<F: Real> Population<F> {
    fn new(dist: &DegreeDistribution, n: usize, params: &ChannelParams<F>, rng: &mut SimRng) -> Self {
        let q = params.q;
        let mut degrees: Vec<usize> =
            dist.variable_degree_counts(n).into_iter().flat_map(|(d, c)| std::iter::repeat_n(d, c)).collect();
        degrees.shuffle(rng);
        let mut node_start = Vec::with_capacity(n + 1);
        node_start.push(0);
        for d in &degrees {
            node_start.push(node_start.last().unwrap() + d);
        }
        let edges = *node_start.last().unwrap();
        let check_degrees = check_degrees(dist, edges, rng);

        // all-zero codeword: Bob sees 0 or a uniform other symbol
        let zero = llr_from_channel::<F>(0, params);
        let mut priors = Vec::with_capacity(n * q);
        for _ in 0..n {
            if params.p > F::zero() && rng.gen::<f64>() < params.p.as_f64() {
                let y = rng.gen_range(1..q) as Gf;
                priors.extend_from_slice(llr_from_channel(y, params).values());
            } else {
                priors.extend_from_slice(zero.values());
            }
        }
        let mut vc = vec![F::zero(); edges * q];
        for i in 0..n {
            for e in node_start[i]..node_start[i + 1] {
                vc[e * q..(e + 1) * q].copy_from_slice(&priors[i * q..(i + 1) * q]);
            }
        }
        Self { q, node_start, priors, check_degrees, cv: vec![F::zero(); edges * q], vc }
    }

    fn edges(&self) -> usize {
        self.vc.len() / self.q
    }

    fn run(mut self, ctx: &GfContext, max_iterations: usize, threshold: F, rng: &mut SimRng) -> PointRecord {
        let mut entropy = Vec::new();
        let mut success = false;
        for _ in 0..max_iterations {
            self.check_half(ctx, rng);
            self.variable_half();
            let h = self.mean_entropy();
            entropy.push(h.as_f64());
            if h < threshold {
                success = true;
                break;
            }
        }
        PointRecord { p: f64::NAN, success, iterations: entropy.len(), entropy }
    }

    /// Deals all sockets into random checks and writes each socket's
    /// check-to-variable message.
    fn check_half(&mut self, ctx: &GfContext, rng: &mut SimRng) {
        let q = self.q;
        let mut order: Vec<usize> = (0..self.edges()).collect();
        order.shuffle(rng);
        let d_max = self.check_degrees.iter().copied().max().unwrap_or(0);
        let mut scratch = CheckScratch::new(q, d_max);
        let mut weights: Vec<Gf> = Vec::with_capacity(d_max);
        let mut vc_in = vec![F::zero(); d_max * q];
        let mut cv_out = vec![F::zero(); d_max * q];
        let mut at = 0;
        for &d in &self.check_degrees {
            let sockets = &order[at..at + d];
            at += d;
            weights.clear();
            weights.extend((0..d).map(|_| rng.gen_range(1..q) as Gf));
            for (t, &e) in sockets.iter().enumerate() {
                vc_in[t * q..(t + 1) * q].copy_from_slice(&self.vc[e * q..(e + 1) * q]);
            }
            check_update(ctx, &weights, &vc_in[..d * q], 0, &mut cv_out[..d * q], &mut scratch);
            for (t, &e) in sockets.iter().enumerate() {
                self.cv[e * q..(e + 1) * q].copy_from_slice(&cv_out[t * q..(t + 1) * q]);
            }
        }
    }

    fn variable_half(&mut self) {
        let q = self.q;
        let mut total = vec![F::zero(); q];
        for i in 0..self.node_start.len() - 1 {
            let (lo, hi) = (self.node_start[i], self.node_start[i + 1]);
            total.copy_from_slice(&self.priors[i * q..(i + 1) * q]);
            for e in lo..hi {
                for (t, &c) in total.iter_mut().zip(&self.cv[e * q..(e + 1) * q]) {
                    *t += c;
                }
            }
            for e in lo..hi {
                let out = &mut self.vc[e * q..(e + 1) * q];
                for k in 0..q {
                    out[k] = total[k] - self.cv[e * q + k];
                }
                normalize_in_place(out);
            }
        }
    }

    fn mean_entropy(&self) -> F {
        let q = self.q;
        let mut probs = vec![F::zero(); q];
        let mut sum = F::zero();
        for m in self.vc.chunks_exact(q) {
            llr_to_probs(m, &mut probs);
            sum -= probs.iter().fold(F::zero(), |acc, &x| acc + xlog2x(x));
        }
        sum / F::of_usize(self.edges())
    }
}

/// Check degrees whose sum is exactly `edges`: node-perspective counts by
/// largest remainder, then single-step adjustments on random checks.
fn check_degrees(dist: &DegreeDistribution, edges: usize, rng: &mut SimRng) -> Vec<usize> {
    let checks = ((edges as f64 / dist.mean_check_degree()).round() as usize).max(1);
    let mut degrees: Vec<usize> = largest_remainder(&dist.check_node_fractions(), checks)
        .into_iter()
        .flat_map(|(d, c)| std::iter::repeat_n(d, c))
        .collect();
    let mut sum: usize = degrees.iter().sum();
    while sum != edges {
        let i = rng.gen_range(0..degrees.len());
        if sum < edges {
            degrees[i] += 1;
            sum += 1;
        } else if degrees[i] > 2 {
            degrees[i] -= 1;
            sum -= 1;
        }
    }
    degrees
}

/// `(1 - R) / H(X|Y)` with the entropy in q-ary units at `p_t`: how far the
/// threshold sits from the Slepian–Wolf limit.
pub fn ensemble_efficiency(dist: &DegreeDistribution, p_t: f64, q: usize) -> Result<f64> {
    if !(p_t > 0.0 && p_t < 1.0) {
        return Err(Error::Config(format!("threshold {p_t} outside (0, 1)")));
    }
    let h = conditional_entropy(&ChannelParams::new(q, p_t)?, Base::Q);
    Ok((1.0 - dist.design_rate) / h)
}
