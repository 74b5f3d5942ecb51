//! Progressive edge growth over a weighted Tanner graph.

use rand::Rng;

use super::dist::DegreeDistribution;
use super::matrix::{Entry, SparseParityMatrix};
use crate::error::{Error, Result};
use crate::galois::{Gf, GfContext};
use crate::rng::{self, stream, SimRng};

/// Builds an `m x n` parity-check matrix whose column degrees follow the
/// node-perspective version of `dist.lambda`; row degrees come out
/// concentrated because ties go to the least-loaded check.
///
/// Variable nodes are placed in order of increasing degree. Each edge goes to
/// a check farthest from the node in the current graph (unreachable counts as
/// farthest), least-loaded among those, which greedily maximizes local girth. Ties
/// are broken uniformly at random and weights are uniform over the nonzero
/// field elements, both drawn from the `seed` stream.
pub fn peg_construct(
    dist: &DegreeDistribution,
    n: usize,
    m: usize,
    ctx: &GfContext,
    seed: u64,
) -> Result<SparseParityMatrix> {
    let degrees: Vec<usize> = dist
        .variable_degree_counts(n)
        .into_iter()
        .flat_map(|(d, c)| std::iter::repeat(d).take(c))
        .collect();
    peg_with_degrees(&degrees, m, ctx, seed)
}

/// PEG with an explicit per-column degree sequence.
pub fn peg_with_degrees(degrees: &[usize], m: usize, ctx: &GfContext, seed: u64) -> Result<SparseParityMatrix> {
    let n = degrees.len();
    if n == 0 || m == 0 {
        return Err(Error::Construction("empty code dimensions".into()));
    }
    if let Some(&d) = degrees.iter().find(|&&d| d == 0 || d > m) {
        return Err(Error::Construction(format!("variable degree {d} infeasible with {m} checks")));
    }
    let edges: usize = degrees.iter().sum();
    if edges < m {
        return Err(Error::Construction(format!("{edges} edges cannot reach all {m} checks")));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| degrees[j]);

    let mut rng = rng::rng(seed, &[stream::PEG]);
    let mut g = Graph::new(n, m);
    for &j in &order {
        for _ in 0..degrees[j] {
            let c = g.pick(&mut rng, j);
            g.connect(j, c);
        }
    }

    let mut rows: Vec<Vec<Entry>> = vec![Vec::new(); m];
    for (j, checks) in g.var_adj.iter().enumerate() {
        for &c in checks {
            let weight = rng.gen_range(1..ctx.order()) as Gf;
            rows[c as usize].push(Entry { col: j as u32, weight });
        }
    }
    for row in &mut rows {
        row.sort_by_key(|e| e.col);
    }
    SparseParityMatrix::new(ctx.order(), n, rows)
}

struct Graph {
    var_adj: Vec<Vec<u32>>,
    chk_adj: Vec<Vec<u32>>,
    chk_mark: Vec<u32>,
    level: Vec<u32>,
    var_mark: Vec<u32>,
    stamp: u32,
}

impl Graph {
    fn new(n: usize, m: usize) -> Self {
        Self {
            var_adj: vec![Vec::new(); n],
            chk_adj: vec![Vec::new(); m],
            chk_mark: vec![0; m],
            level: vec![u32::MAX; m],
            var_mark: vec![0; n],
            stamp: 0,
        }
    }

    fn connect(&mut self, j: usize, c: u32) {
        self.var_adj[j].push(c);
        self.chk_adj[c as usize].push(j as u32);
    }

    /// Breadth-first distance (in check levels) from `j` to every check;
    /// unreachable checks get `u32::MAX`.
    fn check_levels(&mut self, j: usize) {
        self.stamp += 1;
        let s = self.stamp;
        self.var_mark[j] = s;
        let mut frontier: Vec<u32> = Vec::new();
        for &c in &self.var_adj[j] {
            if self.chk_mark[c as usize] != s {
                self.chk_mark[c as usize] = s;
                self.level[c as usize] = 0;
                frontier.push(c);
            }
        }
        let m = self.chk_adj.len();
        let mut reached = frontier.len();
        let mut depth = 0;
        while !frontier.is_empty() && reached < m {
            depth += 1;
            let mut next = Vec::new();
            for &c in &frontier {
                for &u in &self.chk_adj[c as usize] {
                    if self.var_mark[u as usize] == s {
                        continue;
                    }
                    self.var_mark[u as usize] = s;
                    for &c2 in &self.var_adj[u as usize] {
                        if self.chk_mark[c2 as usize] != s {
                            self.chk_mark[c2 as usize] = s;
                            self.level[c2 as usize] = depth;
                            next.push(c2);
                            reached += 1;
                        }
                    }
                }
            }
            frontier = next;
        }
        for c in 0..self.level.len() {
            if self.chk_mark[c] != s {
                self.level[c] = u32::MAX;
            }
        }
    }

    /// A check farthest from `j`, least loaded among those.
    fn pick(&mut self, rng: &mut SimRng, j: usize) -> u32 {
        self.check_levels(j);
        let m = self.chk_adj.len() as u32;
        let adjacent = |g: &Self, c: u32| g.var_adj[j].contains(&c);
        let load = |g: &Self, c: u32| g.chk_adj[c as usize].len();
        let pool: Vec<u32> = (0..m).filter(|&c| !adjacent(self, c)).collect();
        let key = |g: &Self, c: u32| (std::cmp::Reverse(g.level[c as usize]), load(g, c));
        let best = pool.iter().map(|&c| key(self, c)).min().expect("degree <= m guarantees a free check");
        let ties: Vec<u32> = pool.into_iter().filter(|&c| key(self, c) == best).collect();
        ties[rng.gen_range(0..ties.len())]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nbldpc::dist::designed_ensembles;

    /// Exhaustive search for two columns sharing two rows.
    fn has_four_cycle(h: &SparseParityMatrix) -> bool {
        let cols = h.column_entries();
        for a in 0..h.n() {
            for b in a + 1..h.n() {
                let shared = cols[a].iter().filter(|(r, _)| cols[b].iter().any(|(r2, _)| r2 == r)).count();
                if shared >= 2 {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn regular_bookkeeping() {
        let ctx = GfContext::new(4).unwrap();
        let d = DegreeDistribution::new(4, 0.5, vec![(3, 1.0)]).unwrap();
        let h = peg_construct(&d, 8, 4, &ctx, 1).unwrap();
        assert!(h.column_degrees().iter().all(|&c| c == 3));
        assert!(h.row_degrees().iter().all(|&r| r == 6));
    }

    #[test]
    fn small_graphs_avoid_four_cycles() {
        let ctx = GfContext::new(4).unwrap();
        let d = DegreeDistribution::new(4, 0.5, vec![(2, 1.0)]).unwrap();
        for seed in 0..20 {
            let h = peg_construct(&d, 12, 6, &ctx, seed).unwrap();
            assert!(!has_four_cycle(&h), "seed {seed}");
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let ctx = GfContext::new(8).unwrap();
        let d = &designed_ensembles(8)[4];
        let a = peg_construct(d, 600, 180, &ctx, 3).unwrap();
        let b = peg_construct(d, 600, 180, &ctx, 3).unwrap();
        let c = peg_construct(d, 600, 180, &ctx, 4).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        assert_ne!(a.to_text(), c.to_text());
    }

    #[test]
    fn realized_lambda_tracks_design() {
        let ctx = GfContext::new(4).unwrap();
        let d = &designed_ensembles(4)[8];
        let n = 3000;
        let m = (n as f64 * (1.0 - d.design_rate)).round() as usize;
        let h = peg_construct(d, n, m, &ctx, 7).unwrap();
        let deg = h.column_degrees();
        let edges = h.edge_count() as f64;
        for &(dv, frac) in &d.lambda {
            let realized = deg.iter().filter(|&&x| x == dv).count() as f64 * dv as f64 / edges;
            assert!((realized - frac).abs() < 0.01, "degree {dv}: {realized} vs {frac}");
        }
        let rows = h.row_degrees();
        let (lo, hi) = (rows.iter().min().unwrap(), rows.iter().max().unwrap());
        assert!(hi - lo <= 1);
        assert!(deg.iter().all(|&x| x > 0));
    }

    #[test]
    fn infeasible_demands_error() {
        let ctx = GfContext::new(4).unwrap();
        assert!(peg_with_degrees(&[5, 2], 3, &ctx, 0).is_err());
        assert!(peg_with_degrees(&[1, 1], 3, &ctx, 0).is_err());
    }
}
