//! Edge-perspective degree distributions and the designed code catalog.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Largest variable-node degree accepted.
pub const MAX_VARIABLE_DEGREE: usize = 40;

const SUM_TOLERANCE: f64 = 1e-6;
/// Printed rows whose coefficients miss 1 by more than this are flagged.
pub const SUM_FLAG_THRESHOLD: f64 = 0.01;

/// Degree distribution pair `(lambda, rho)` in edge perspective.
///
/// `lambda[i] = (d, f)` means a fraction `f` of edges attach to variable nodes
/// of degree `d`. The check side is concentrated on the two degrees that
/// balance the edge count at the design rate.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    pub q: usize,
    pub design_rate: f64,
    pub lambda: Vec<(usize, f64)>,
    pub rho: Vec<(usize, f64)>,
    /// Density-evolution threshold reported for the ensemble, if known.
    pub det: Option<f64>,
    /// Ensemble efficiency at `det`, if known.
    pub eeff: Option<f64>,
    /// Raw coefficient sum before renormalization.
    pub raw_lambda_sum: f64,
}

impl DegreeDistribution {
    /// Builds a distribution from variable-side edge fractions, renormalizing
    /// them and deriving a concentrated check side.
    pub fn new(q: usize, design_rate: f64, lambda: Vec<(usize, f64)>) -> Result<Self> {
        if !(design_rate > 0.0 && design_rate < 1.0) {
            return Err(Error::Distribution(format!("design rate {design_rate} outside (0, 1)")));
        }
        if lambda.is_empty() {
            return Err(Error::Distribution("empty lambda".into()));
        }
        let mut merged: Vec<(usize, f64)> = Vec::new();
        for &(d, f) in &lambda {
            if d == 0 || d > MAX_VARIABLE_DEGREE {
                return Err(Error::Distribution(format!("variable degree {d} outside [1, {MAX_VARIABLE_DEGREE}]")));
            }
            if !(f >= 0.0) {
                return Err(Error::Distribution(format!("negative fraction {f} for degree {d}")));
            }
            match merged.iter_mut().find(|(e, _)| *e == d) {
                Some(slot) => slot.1 += f,
                None => merged.push((d, f)),
            }
        }
        merged.retain(|&(_, f)| f > 0.0);
        merged.sort_by_key(|&(d, _)| d);
        let raw: f64 = merged.iter().map(|(_, f)| f).sum();
        if raw <= 0.0 {
            return Err(Error::Distribution("lambda sums to zero".into()));
        }
        for slot in &mut merged {
            slot.1 /= raw;
        }
        let mut dist = Self {
            q,
            design_rate,
            lambda: merged,
            rho: Vec::new(),
            det: None,
            eeff: None,
            raw_lambda_sum: raw,
        };
        dist.rho = concentrated_rho(dist.mean_check_degree());
        Ok(dist)
    }

    /// True when the raw coefficients missed 1 by more than
    /// [`SUM_FLAG_THRESHOLD`].
    pub fn flagged(&self) -> bool {
        (self.raw_lambda_sum - 1.0).abs() > SUM_FLAG_THRESHOLD
    }

    pub fn d_v_max(&self) -> usize {
        self.lambda.iter().map(|&(d, _)| d).max().unwrap_or(0)
    }

    pub fn d_c_max(&self) -> usize {
        self.rho.iter().map(|&(d, _)| d).max().unwrap_or(0)
    }

    /// Average variable-node degree, `1 / sum(lambda_i / i)`.
    pub fn mean_variable_degree(&self) -> f64 {
        1.0 / self.lambda.iter().map(|&(d, f)| f / d as f64).sum::<f64>()
    }

    pub fn mean_check_degree(&self) -> f64 {
        self.mean_variable_degree() / (1.0 - self.design_rate)
    }

    /// Node-perspective fractions of variable degrees.
    pub fn variable_node_fractions(&self) -> Vec<(usize, f64)> {
        node_fractions(&self.lambda)
    }

    pub fn check_node_fractions(&self) -> Vec<(usize, f64)> {
        node_fractions(&self.rho)
    }

    /// Number of variable nodes of each degree for a code of length `n`,
    /// rounded by largest remainder so the counts sum to `n`.
    pub fn variable_degree_counts(&self, n: usize) -> Vec<(usize, usize)> {
        largest_remainder(&self.variable_node_fractions(), n)
    }

    /// Checks that both sides sum to one.
    pub fn validate(&self) -> Result<()> {
        for (side, coeffs) in [("lambda", &self.lambda), ("rho", &self.rho)] {
            let s: f64 = coeffs.iter().map(|(_, f)| f).sum();
            if (s - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::Distribution(format!("{side} sums to {s}")));
            }
        }
        Ok(())
    }

    /// Parses the key-value text format:
    ///
    /// ```text
    /// # comment
    /// rate 0.5
    /// q 8
    /// det 0.239        (optional)
    /// eeff 1.024       (optional)
    /// lambda 2 0.215   (node degree, edge fraction; repeated)
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut rate = None;
        let mut q = None;
        let mut det = None;
        let mut eeff = None;
        let mut lambda = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            let bad = |msg: &str| Error::Parse { line, msg: msg.to_string() };
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad number `{s}`")));
            match (toks[0], toks.len()) {
                ("rate", 2) => rate = Some(num(toks[1])?),
                ("q", 2) => q = Some(toks[1].parse::<usize>().map_err(|_| bad("bad q"))?),
                ("det", 2) => det = Some(num(toks[1])?),
                ("eeff", 2) => eeff = Some(num(toks[1])?),
                ("lambda", 3) => {
                    let d = toks[1].parse::<usize>().map_err(|_| bad("bad degree"))?;
                    lambda.push((d, num(toks[2])?));
                }
                _ => return Err(bad(&format!("unrecognized line `{content}`"))),
            }
        }
        let rate = rate.ok_or(Error::Parse { line: 0, msg: "missing `rate`".into() })?;
        let q = q.ok_or(Error::Parse { line: 0, msg: "missing `q`".into() })?;
        let mut dist = Self::new(q, rate, lambda)?;
        dist.det = det;
        dist.eeff = eeff;
        Ok(dist)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Serializes to the text format. Coefficients are written renormalized.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "rate {}", self.design_rate);
        let _ = writeln!(s, "q {}", self.q);
        if let Some(det) = self.det {
            let _ = writeln!(s, "det {det}");
        }
        if let Some(eeff) = self.eeff {
            let _ = writeln!(s, "eeff {eeff}");
        }
        for &(d, f) in &self.lambda {
            let _ = writeln!(s, "lambda {d} {f}");
        }
        s
    }
}

fn node_fractions(edge: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let norm: f64 = edge.iter().map(|&(d, f)| f / d as f64).sum();
    edge.iter().map(|&(d, f)| (d, f / d as f64 / norm)).collect()
}

/// Edge-perspective check distribution on `floor(mean)` and `floor(mean) + 1`.
fn concentrated_rho(mean: f64) -> Vec<(usize, f64)> {
    let lo = mean.floor().max(1.0) as usize;
    let frac_lo_nodes = (lo as f64 + 1.0 - mean).clamp(0.0, 1.0);
    let mut rho = Vec::new();
    let e_lo = frac_lo_nodes * lo as f64 / mean;
    if e_lo > 1e-12 {
        rho.push((lo, e_lo));
    }
    if 1.0 - e_lo > 1e-12 {
        rho.push((lo + 1, 1.0 - e_lo));
    }
    rho
}

pub(crate) fn largest_remainder(fracs: &[(usize, f64)], total: usize) -> Vec<(usize, usize)> {
    let mut counts: Vec<(usize, usize, f64)> = fracs
        .iter()
        .map(|&(d, f)| {
            let exact = f * total as f64;
            (d, exact.floor() as usize, exact - exact.floor())
        })
        .collect();
    let assigned: usize = counts.iter().map(|c| c.1).sum();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| counts[b].2.total_cmp(&counts[a].2).then(a.cmp(&b)));
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        counts[i].1 += 1;
    }
    counts.into_iter().filter(|c| c.1 > 0).map(|(d, c, _)| (d, c)).collect()
}

/// One row of the designed-code table: rate, threshold, ensemble
/// efficiency and `lambda` as `(exponent, coefficient)` pairs as printed,
/// where exponent `i - 1` belongs to node degree `i`.
struct TableRow {
    q: usize,
    rate: f64,
    det: f64,
    eeff: f64,
    terms: &'static [(usize, f64)],
}

const TABLE: &[TableRow] = &[
    TableRow { q: 4, rate: 0.90, det: 0.022, eeff: 1.067, terms: &[(1, 0.069), (2, 0.207), (5, 0.051), (6, 0.235), (14, 0.070), (17, 0.225), (28, 0.139)] },
    TableRow { q: 4, rate: 0.85, det: 0.037, eeff: 1.045, terms: &[(1, 0.094), (2, 0.210), (6, 0.217), (9, 0.088), (10, 0.040), (22, 0.118), (24, 0.159), (28, 0.071)] },
    TableRow { q: 4, rate: 0.80, det: 0.053, eeff: 1.044, terms: &[(1, 0.102), (2, 0.204), (5, 0.116), (7, 0.088), (14, 0.174), (26, 0.107), (27, 0.205)] },
    TableRow { q: 4, rate: 0.75, det: 0.069, eeff: 1.053, terms: &[(1, 0.107), (3, 0.245), (6, 0.192), (9, 0.034), (18, 0.207), (25, 0.161), (27, 0.049)] },
    TableRow { q: 4, rate: 0.70, det: 0.08, eeff: 1.054, terms: &[(1, 0.113), (2, 0.245), (4, 0.143), (10, 0.081), (14, 0.066), (16, 0.147), (23, 0.034), (24, 0.168)] },
    TableRow { q: 4, rate: 0.65, det: 0.11, eeff: 1.045, terms: &[(1, 0.133), (2, 0.213), (5, 0.207), (8, 0.014), (17, 0.022), (19, 0.171), (27, 0.237)] },
    TableRow { q: 4, rate: 0.60, det: 0.13, eeff: 1.047, terms: &[(1, 0.172), (2, 0.252), (6, 0.216), (11, 0.022), (12, 0.075), (18, 0.077), (20, 0.183)] },
    TableRow { q: 4, rate: 0.55, det: 0.15, eeff: 1.041, terms: &[(1, 0.177), (2, 0.279), (7, 0.147), (8, 0.035), (10, 0.088), (14, 0.129), (25, 0.143)] },
    TableRow { q: 4, rate: 0.50, det: 0.18, eeff: 1.037, terms: &[(1, 0.184), (2, 0.245), (6, 0.087), (7, 0.156), (17, 0.067), (21, 0.020), (25, 0.196), (28, 0.041)] },
    TableRow { q: 8, rate: 0.90, det: 0.031, eeff: 1.060, terms: &[(1, 0.112), (2, 0.103), (3, 0.194), (9, 0.146), (10, 0.163), (17, 0.003), (19, 0.173), (26, 0.049), (28, 0.006), (29, 0.052)] },
    TableRow { q: 8, rate: 0.85, det: 0.052, eeff: 1.080, terms: &[(1, 0.125), (2, 0.165), (5, 0.163), (7, 0.11), (12, 0.073), (18, 0.089), (27, 0.122), (32, 0.154)] },
    TableRow { q: 8, rate: 0.80, det: 0.072, eeff: 1.038, terms: &[(1, 0.146), (2, 0.177), (4, 0.130), (7, 0.084), (10, 0.149), (19, 0.035), (22, 0.029), (25, 0.087), (26, 0.163)] },
    TableRow { q: 8, rate: 0.75, det: 0.096, eeff: 1.030, terms: &[(1, 0.165), (2, 0.192), (5, 0.092), (7, 0.176), (10, 0.019), (17, 0.086), (19, 0.129), (30, 0.103), (31, 0.038)] },
    TableRow { q: 8, rate: 0.70, det: 0.121, eeff: 1.032, terms: &[(1, 0.160), (2, 0.208), (5, 0.140), (8, 0.096), (10, 0.028), (11, 0.013), (18, 0.113), (21, 0.032), (27, 0.211)] },
    TableRow { q: 8, rate: 0.65, det: 0.147, eeff: 1.032, terms: &[(1, 0.173), (2, 0.228), (4, 0.092), (8, 0.169), (14, 0.112), (23, 0.019), (24, 0.012), (28, 0.195)] },
    TableRow { q: 8, rate: 0.60, det: 0.177, eeff: 1.026, terms: &[(1, 0.192), (2, 0.196), (5, 0.222), (13, 0.104), (23, 0.114), (25, 0.055), (27, 0.117)] },
    TableRow { q: 8, rate: 0.55, det: 0.207, eeff: 1.024, terms: &[(1, 0.183), (2, 0.269), (6, 0.124), (8, 0.036), (10, 0.097), (21, 0.004), (25, 0.116), (26, 0.171)] },
    TableRow { q: 8, rate: 0.50, det: 0.239, eeff: 1.024, terms: &[(1, 0.215), (2, 0.256), (4, 0.030), (7, 0.154), (11, 0.065), (13, 0.050), (21, 0.072), (27, 0.128)] },
];

/// The designed ensembles for GF(`q`) (q = 4 or 8), highest rate first.
/// Empty for other orders.
pub fn designed_ensembles(q: usize) -> Vec<DegreeDistribution> {
    TABLE
        .iter()
        .filter(|row| row.q == q)
        .map(|row| {
            let lambda = row.terms.iter().map(|&(e, f)| (e + 1, f)).collect();
            let mut d = DegreeDistribution::new(row.q, row.rate, lambda).expect("table rows are well-formed");
            d.det = Some(row.det);
            d.eeff = Some(row.eeff);
            d
        })
        .collect()
}
