#![allow(dead_code)]

use hdir::decoder::{Decoder, LlrVector};
use hdir::galois::{Gf, GfContext};
use hdir::nbldpc::{peg_with_degrees, SparseParityMatrix};
use hdir::rng;
use rand::Rng;

/// Literal probability-domain sum-product: check messages by enumerating
/// every assignment of the other neighbours.
pub struct NaiveSpa {
    pub q: usize,
    rows: Vec<Vec<(usize, Gf)>>,
    /// per edge (row-major): (row, column)
    edges: Vec<(usize, usize)>,
    prior: Vec<Vec<f64>>,
    pub vc: Vec<Vec<f64>>,
    pub cv: Vec<Vec<f64>>,
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let t: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= t);
    v
}

impl NaiveSpa {
    pub fn new(h: &SparseParityMatrix, prior: Vec<Vec<f64>>) -> Self {
        let rows: Vec<Vec<(usize, Gf)>> =
            h.rows().iter().map(|r| r.iter().map(|e| (e.col as usize, e.weight)).collect()).collect();
        let mut edges = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            for &(c, _) in r {
                edges.push((i, c));
            }
        }
        let vc = edges.iter().map(|&(_, c)| prior[c].clone()).collect();
        let cv = vec![vec![1.0 / h.q() as f64; h.q()]; edges.len()];
        Self { q: h.q(), rows, edges, prior, vc, cv }
    }

    pub fn iterate(&mut self, ctx: &GfContext, syndrome: &[Gf]) {
        let q = self.q;
        let mut base = 0;
        for (i, row) in self.rows.iter().enumerate() {
            let d = row.len();
            for t in 0..d {
                let mut out = vec![0.0; q];
                let others: Vec<usize> = (0..d).filter(|&u| u != t).collect();
                let total = q.pow(others.len() as u32);
                for code in 0..total {
                    let mut rest = code;
                    let mut acc: Gf = 0;
                    let mut weight = 1.0;
                    for &u in &others {
                        let b = (rest % q) as Gf;
                        rest /= q;
                        acc ^= ctx.mul(row[u].1, b);
                        weight *= self.vc[base + u][b as usize];
                    }
                    for a in 0..q as Gf {
                        if ctx.mul(row[t].1, a) ^ acc == syndrome[i] {
                            out[a as usize] += weight;
                        }
                    }
                }
                self.cv[base + t] = normalized(out);
            }
            base += d;
        }
        for e in 0..self.edges.len() {
            let col = self.edges[e].1;
            let mut out = self.prior[col].clone();
            for e2 in 0..self.edges.len() {
                if e2 != e && self.edges[e2].1 == col {
                    for a in 0..q {
                        out[a] *= self.cv[e2][a];
                    }
                }
            }
            self.vc[e] = normalized(out);
        }
    }
}

pub fn llr(p: &[f64]) -> Vec<f64> {
    p.iter().map(|&x| (p[0] / x).ln()).collect()
}

/// Random small code: `n` columns of degree 1..=3, `m` rows, random weights.
pub fn random_small_code(q: usize, n: usize, m: usize, seed: u64) -> SparseParityMatrix {
    let ctx = GfContext::new(q).unwrap();
    let mut r = rng::rng(seed, &[99]);
    loop {
        let degrees: Vec<usize> = (0..n).map(|_| r.gen_range(1..=3.min(m))).collect();
        if degrees.iter().sum::<usize>() >= m {
            if let Ok(h) = peg_with_degrees(&degrees, m, &ctx, seed) {
                return h;
            }
        }
    }
}

pub fn random_probs(q: usize, r: &mut impl Rng) -> Vec<f64> {
    normalized((0..q).map(|_| r.gen_range(0.05..1.0)).collect())
}

/// Largest componentwise LLR difference after three iterations.
pub fn three_iteration_gap(q: usize, n: usize, m: usize, seed: u64) -> f64 {
    let ctx = GfContext::new(q).unwrap();
    let h = random_small_code(q, n, m, seed);
    let mut r = rng::rng(seed, &[7]);
    let prior: Vec<Vec<f64>> = (0..n).map(|_| random_probs(q, &mut r)).collect();
    let s: Vec<Gf> = (0..m).map(|_| r.gen_range(0..q) as Gf).collect();

    let dec = Decoder::<f64>::new(&h, &ctx).unwrap();
    let priors: Vec<LlrVector<f64>> = prior.iter().map(|p| LlrVector::from_probs(p)).collect();
    let mut st = dec.init(&priors).unwrap();
    let mut naive = NaiveSpa::new(&h, prior);
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        dec.iterate(&mut st, &s);
        naive.iterate(&ctx, &s);
        for e in 0..dec.edge_count() {
            for (a, b) in st.cv_message(e).iter().zip(llr(&naive.cv[e])) {
                worst = worst.max((a - b).abs());
            }
            for (a, b) in st.vc_message(e).iter().zip(llr(&naive.vc[e])) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    worst
}
