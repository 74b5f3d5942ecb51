//! Experiment orchestration: configuration, QBER sweeps over frames, result
//! tables and key-rate evaluation from measured efficiencies.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blind::{run_blind, select_code, BlindCode};
use crate::cascade::{self, CascadeConfig, Variant, FRAME_BITS};
use crate::channel::{efficiency, sample_frame, ChannelParams};
use crate::error::{Error, Result};
use crate::galois::{Gf, GfContext};
use crate::keyrate::{leak_for_efficiency, relative_improvement, Scenario};
use crate::nbldpc::{check_count, peg_construct, DegreeDistribution, SparseParityMatrix, DEFAULT_DELTA};
use crate::rng::{derive, stream};
use crate::transcript::Transcript;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    LdpcBlind,
    Cascade(Variant),
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::LdpcBlind => "ldpc-blind",
            Method::Cascade(v) => v.name(),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ldpc-blind" => Method::LdpcBlind,
            "cascade-binary" => Method::Cascade(Variant::Binary),
            "cascade-hd-serial" => Method::Cascade(Variant::HdSerial),
            "cascade-hd-parallel" => Method::Cascade(Variant::HdParallel),
            other => return Err(Error::Config(format!("unknown method {other:?}"))),
        })
    }
}

/// Parses a QBER grid: `a:b:step` (inclusive), a comma list, or one value.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("bad grid {spec:?}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = spec.split(':').collect();
    let grid = match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || b < a {
                return Err(bad());
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            // rounded so 0.01 * 7 prints as 0.07
            (0..count).map(|i| ((a + step * i as f64) * 1e12).round() / 1e12).collect()
        }
        [list] => list.split(',').map(num).collect::<Result<Vec<_>>>()?,
        _ => return Err(bad()),
    };
    if grid.is_empty() {
        return Err(bad());
    }
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub method: Method,
    pub q: usize,
    pub qber_grid: Vec<f64>,
    pub frames: usize,
    /// Symbols per frame (Cascade) or code length (LDPC). Cascade defaults
    /// to `frame_bits / log2 q`, LDPC to 10000.
    pub n: Option<usize>,
    pub frame_bits: usize,
    pub seed: u64,
    /// Directory of `.dist` files; required for `ldpc-blind`.
    pub catalog: Option<PathBuf>,
    /// Where constructed parity-check matrices are stored and reused.
    pub matrix_cache: Option<PathBuf>,
    pub code_seed: u64,
    pub code_margin: f64,
    pub out: Option<PathBuf>,
    /// Directory for one JSON-lines transcript per frame.
    pub transcripts: Option<PathBuf>,
    /// Cascade-step round budget of the parallel variant.
    pub round_budget: Option<u32>,
    pub cascade_iterations: usize,
    pub delta_fraction: f64,
    pub decoder_iterations: usize,
}

pub const DEFAULT_LDPC_N: usize = 10_000;

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            method: Method::Cascade(Variant::HdSerial),
            q: 4,
            qber_grid: Vec::new(),
            frames: 100,
            n: None,
            frame_bits: FRAME_BITS,
            seed: 1,
            catalog: None,
            matrix_cache: None,
            code_seed: 1,
            code_margin: 1.0,
            out: None,
            transcripts: None,
            round_budget: None,
            cascade_iterations: CascadeConfig::default().iterations,
            delta_fraction: DEFAULT_DELTA,
            decoder_iterations: crate::decoder::DEFAULT_MAX_ITERATIONS,
        }
    }
}

impl ExperimentConfig {
    /// Reads `key = value` lines (`#` comments) over the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("expected key = value, got {line:?}") })?;
            cfg.set(k.trim(), v.trim()).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value.parse().map_err(|_| Error::Config(format!("bad value {value:?} for {key}")))
        }
        let opt_path = |v: &str| if v.is_empty() { None } else { Some(PathBuf::from(v)) };
        match key {
            "method" => self.method = value.parse()?,
            "q" => self.q = num(key, value)?,
            "qber" => self.qber_grid = parse_grid(value)?,
            "frames" => self.frames = num(key, value)?,
            "n" => self.n = Some(num(key, value)?),
            "frame_bits" => self.frame_bits = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "catalog" => self.catalog = opt_path(value),
            "matrix_cache" => self.matrix_cache = opt_path(value),
            "code_seed" => self.code_seed = num(key, value)?,
            "code_margin" => self.code_margin = num(key, value)?,
            "out" => self.out = opt_path(value),
            "transcripts" => self.transcripts = opt_path(value),
            "round_budget" => self.round_budget = if value == "none" { None } else { Some(num(key, value)?) },
            "cascade_iterations" => self.cascade_iterations = num(key, value)?,
            "delta_fraction" => self.delta_fraction = num(key, value)?,
            "decoder_iterations" => self.decoder_iterations = num(key, value)?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        GfContext::new(self.q)?;
        if self.qber_grid.is_empty() {
            return Err(Error::Config("empty QBER grid".into()));
        }
        if let Some(p) = self.qber_grid.iter().find(|p| !(0.0..1.0).contains(*p)) {
            return Err(Error::Config(format!("QBER {p} outside [0, 1)")));
        }
        if self.frames == 0 {
            return Err(Error::Config("frames must be at least 1".into()));
        }
        if self.n == Some(0) {
            return Err(Error::Config("n must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.delta_fraction) {
            return Err(Error::Config(format!("delta_fraction {} outside [0, 1)", self.delta_fraction)));
        }
        Ok(())
    }

    fn symbols(&self) -> usize {
        let v = self.q.trailing_zeros() as usize;
        match self.method {
            Method::LdpcBlind => self.n.unwrap_or(DEFAULT_LDPC_N),
            Method::Cascade(_) => self.n.unwrap_or(self.frame_bits / v),
        }
    }
}

/// One CSV row: the mean over the frames of a grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub method: String,
    pub q: usize,
    pub qber: f64,
    pub frames: usize,
    /// Mean efficiency over successful frames.
    pub mean_f: f64,
    pub fer: f64,
    pub mean_rounds: f64,
    pub mean_serial_messages: f64,
    pub mean_tries: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    pub success: bool,
    pub efficiency: f64,
    pub leak_bits: i64,
    pub key_len: usize,
    pub message_rounds: usize,
    pub serial_messages: usize,
    pub tries: usize,
    pub symbol_errors: usize,
}

/// Exact comparison of the reconciled keys: (equal, differing symbols).
pub fn verify_keys(alice: &[Gf], bob: &[Gf]) -> Result<(bool, usize)> {
    if alice.len() != bob.len() {
        return Err(Error::LengthMismatch { expected: alice.len(), actual: bob.len() });
    }
    let diff = alice.iter().zip(bob).filter(|(a, b)| a != b).count();
    Ok((diff == 0, diff))
}

/// Catalog entries for GF(`q`): every `.dist` file of `dir` with that order.
pub fn load_catalog(dir: &Path, q: usize) -> Result<Vec<DegreeDistribution>> {
    if !dir.is_dir() {
        return Err(Error::Config(format!("code catalog {} not found", dir.display())));
    }
    let mut files: Vec<PathBuf> = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            for inner in fs::read_dir(&path)? {
                files.push(inner?.path());
            }
        } else {
            files.push(path);
        }
    }
    files.retain(|p| p.extension().is_some_and(|e| e == "dist"));
    files.sort();
    let mut out = Vec::new();
    for f in files {
        let d = DegreeDistribution::load(&f)
            .map_err(|e| Error::Config(format!("catalog entry {}: {e}", f.display())))?;
        if d.q == q {
            if d.det.is_none() {
                return Err(Error::Config(format!("catalog entry {} lacks det", f.display())));
            }
            out.push(d);
        }
    }
    if out.is_empty() {
        return Err(Error::Config(format!("catalog {} has no GF({q}) codes", dir.display())));
    }
    Ok(out)
}

/// PEG matrix for `dist` at length `n`, read from or written to `cache`.
pub fn cached_matrix(
    dist: &DegreeDistribution,
    n: usize,
    code_seed: u64,
    cache: Option<&Path>,
) -> Result<SparseParityMatrix> {
    let m = check_count(n, dist.design_rate);
    let file = cache.map(|dir| {
        dir.join(format!("q{}_rate{:.3}_n{n}_m{m}_seed{code_seed}.pcm", dist.q, dist.design_rate))
    });
    if let Some(f) = file.as_ref().filter(|f| f.is_file()) {
        let h = SparseParityMatrix::load(f)?;
        if h.q() == dist.q && h.n() == n && h.m() == m {
            return Ok(h);
        }
        return Err(Error::Config(format!("cached matrix {} has the wrong shape", f.display())));
    }
    let ctx = GfContext::new(dist.q)?;
    let h = peg_construct(dist, n, m, &ctx, derive(code_seed, &[stream::PEG]))?;
    if let Some(f) = file {
        fs::create_dir_all(f.parent().expect("cache file has a parent"))?;
        h.save(&f)?;
    }
    Ok(h)
}

/// Runs every grid point and, when `out` is set, writes the CSV.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<PointSummary>> {
    let records = run_frames(cfg)?;
    let rows: Vec<PointSummary> =
        cfg.qber_grid.iter().zip(&records).map(|(&p, recs)| summarize(cfg.method, cfg.q, p, recs)).collect();
    if let Some(out) = &cfg.out {
        write_csv(out, &rows)?;
    }
    Ok(rows)
}

/// Per-frame records for every grid point, in grid order.
pub fn run_frames(cfg: &ExperimentConfig) -> Result<Vec<Vec<FrameRecord>>> {
    cfg.validate()?;
    let catalog = match cfg.method {
        Method::LdpcBlind => {
            let dir = cfg
                .catalog
                .as_deref()
                .ok_or_else(|| Error::Config("ldpc-blind needs a code catalog".into()))?;
            load_catalog(dir, cfg.q)?
        }
        Method::Cascade(_) => Vec::new(),
    };
    if let Some(dir) = &cfg.transcripts {
        fs::create_dir_all(dir)?;
    }
    let n = cfg.symbols();
    let mut codes: BTreeMap<usize, BlindCode<f64>> = BTreeMap::new();
    let mut all = Vec::with_capacity(cfg.qber_grid.len());
    for (i, &p) in cfg.qber_grid.iter().enumerate() {
        let params = ChannelParams::new(cfg.q, p)?;
        let code = match cfg.method {
            Method::LdpcBlind => {
                let table: Vec<(f64, f64)> =
                    catalog.iter().map(|d| (d.design_rate, d.det.expect("checked on load"))).collect();
                let choice = select_code(&table, p, cfg.code_margin)?;
                if !codes.contains_key(&choice.index) {
                    info!("building rate {} code, n = {n}", choice.rate);
                    let h = cached_matrix(&catalog[choice.index], n, cfg.code_seed, cfg.matrix_cache.as_deref())?;
                    let code = BlindCode::new(h, cfg.delta_fraction)?.with_max_iterations(cfg.decoder_iterations);
                    codes.insert(choice.index, code);
                }
                Some(&codes[&choice.index])
            }
            Method::Cascade(_) => None,
        };
        let recs = (0..cfg.frames)
            .into_par_iter()
            .map(|j| {
                let frame_seed = derive(cfg.seed, &[stream::FRAME, i as u64, j as u64]);
                let (rec, transcript) = run_frame(cfg, &params, n, code, frame_seed)?;
                if let Some(dir) = &cfg.transcripts {
                    let name = format!("{}_q{}_p{}_frame{j}.jsonl", cfg.method, cfg.q, p);
                    transcript.write_jsonl(fs::File::create(dir.join(name))?)?;
                }
                Ok(rec)
            })
            .collect::<Result<Vec<_>>>()?;
        info!("{} q={} p={p}: {} frames", cfg.method, cfg.q, recs.len());
        all.push(recs);
    }
    Ok(all)
}

fn run_frame(
    cfg: &ExperimentConfig,
    params: &ChannelParams,
    n: usize,
    code: Option<&BlindCode<f64>>,
    seed: u64,
) -> Result<(FrameRecord, Transcript)> {
    let protocol_seed = derive(seed, &[stream::ESTIMATE]);
    match (cfg.method, code) {
        (Method::Cascade(variant), _) => {
            let frame = sample_frame(params, n, seed);
            let ccfg = CascadeConfig {
                iterations: cfg.cascade_iterations,
                round_budget: cfg.round_budget,
                ..CascadeConfig::default()
            };
            let out = cascade::run_variant(variant, &frame.x, &frame.y, cfg.q, params.p, protocol_seed, &ccfg)?;
            let (equal, diff) = verify_keys(&frame.x, &out.bob_key)?;
            let leak = out.transcript.leak_bits();
            let rec = FrameRecord {
                success: equal,
                efficiency: efficiency(leak as f64, n, params),
                leak_bits: leak,
                key_len: n,
                message_rounds: out.transcript.message_rounds(),
                serial_messages: out.transcript.serial_message_count(),
                tries: 1,
                symbol_errors: diff,
            };
            Ok((rec, out.transcript))
        }
        (Method::LdpcBlind, Some(code)) => {
            let k = code.key_len();
            let frame = sample_frame(params, k, seed);
            let out = run_blind(code, &frame.x, &frame.y, params, params, protocol_seed)?;
            let (equal, diff) = verify_keys(&frame.x, &out.bob_key)?;
            let leak = out.transcript.leak_bits();
            let rec = FrameRecord {
                success: equal,
                efficiency: efficiency(leak as f64, k, params),
                leak_bits: leak,
                key_len: k,
                message_rounds: out.transcript.message_rounds(),
                serial_messages: out.transcript.serial_message_count(),
                tries: out.tries,
                symbol_errors: diff,
            };
            Ok((rec, out.transcript))
        }
        (Method::LdpcBlind, None) => unreachable!("LDPC frames always get a code"),
    }
}

pub fn summarize(method: Method, q: usize, qber: f64, recs: &[FrameRecord]) -> PointSummary {
    let frames = recs.len();
    let mean = |f: &dyn Fn(&FrameRecord) -> f64| recs.iter().map(f).sum::<f64>() / frames as f64;
    let ok: Vec<f64> = recs.iter().filter(|r| r.success).map(|r| r.efficiency).collect();
    PointSummary {
        method: method.name().to_string(),
        q,
        qber,
        frames,
        mean_f: if ok.is_empty() { f64::NAN } else { ok.iter().sum::<f64>() / ok.len() as f64 },
        fer: (frames - ok.len()) as f64 / frames as f64,
        mean_rounds: mean(&|r| r.message_rounds as f64),
        mean_serial_messages: mean(&|r| r.serial_messages as f64),
        mean_tries: mean(&|r| r.tries as f64),
    }
}

pub fn write_csv(path: &Path, rows: &[PointSummary]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<PointSummary>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}

fn csv_error(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!(),
        }
    } else {
        Error::Config(format!("CSV: {e}"))
    }
}

/// Efficiency at `qber` by linear interpolation between measured points,
/// held constant beyond the ends.
pub fn interpolate_f(points: &[(f64, f64)], qber: f64) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = points.iter().copied().filter(|(_, f)| f.is_finite()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (first, last) = (*pts.first()?, *pts.last()?);
    if qber <= first.0 {
        return Some(first.1);
    }
    if qber >= last.0 {
        return Some(last.1);
    }
    let k = pts.windows(2).position(|w| qber <= w[1].0).expect("inside the range");
    let ((x0, y0), (x1, y1)) = (pts[k], pts[k + 1]);
    Some(y0 + (y1 - y0) * (qber - x0) / (x1 - x0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeyRateRow {
    pub loss_db: f64,
    pub method: String,
    pub qber: f64,
    pub f: f64,
    pub leak_bits: f64,
    pub key_length: f64,
    /// Against `cascade-binary` when the table has it.
    pub improvement: f64,
}

/// Key length per scenario row for every method measured at the scenario's
/// dimension.
pub fn keyrate_table(scenario: &Scenario, results: &[PointSummary]) -> Result<Vec<KeyRateRow>> {
    let mut by_method: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for r in results.iter().filter(|r| r.q == scenario.q) {
        by_method.entry(r.method.as_str()).or_default().push((r.qber, r.mean_f));
    }
    if by_method.is_empty() {
        return Err(Error::Config(format!("no results for q = {}", scenario.q)));
    }
    let baseline = Method::Cascade(Variant::Binary).name();
    let mut out = Vec::new();
    for row in &scenario.rows {
        let base_key = match by_method.get(baseline).and_then(|pts| interpolate_f(pts, row.qber)) {
            Some(f) => Some(scenario.key_length(row, f)?),
            None => None,
        };
        for (method, pts) in &by_method {
            let Some(f) = interpolate_f(pts, row.qber) else { continue };
            let key = scenario.key_length(row, f)?;
            out.push(KeyRateRow {
                loss_db: row.loss_db,
                method: method.to_string(),
                qber: row.qber,
                f,
                leak_bits: leak_for_efficiency(f, row.n, scenario.q, row.qber)?,
                key_length: key,
                improvement: base_key.map_or(f64::NAN, |b| relative_improvement(key, b)),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.01:0.05:0.01").unwrap(), vec![0.01, 0.02, 0.03, 0.04, 0.05]);
        assert_eq!(parse_grid("0.1").unwrap(), vec![0.1]);
        assert_eq!(parse_grid("0.1,0.2").unwrap(), vec![0.1, 0.2]);
        assert_eq!(parse_grid("0.01:0.20:0.01").unwrap().len(), 20);
        assert!(parse_grid("0.2:0.1:0.01").is_err());
        assert!(parse_grid("a").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn methods_roundtrip() {
        for name in ["ldpc-blind", "cascade-binary", "cascade-hd-serial", "cascade-hd-parallel"] {
            assert_eq!(name.parse::<Method>().unwrap().name(), name);
        }
        assert!("winnow".parse::<Method>().is_err());
    }

    #[test]
    fn config_file() {
        let cfg = ExperimentConfig::parse(
            "# sweep\nmethod = cascade-hd-parallel\nq = 16\nqber = 0.05\nframes = 3 # few\nround_budget = 40\n",
        )
        .unwrap();
        assert_eq!(cfg.method, Method::Cascade(Variant::HdParallel));
        assert_eq!((cfg.q, cfg.frames, cfg.round_budget), (16, 3, Some(40)));
        assert_eq!(cfg.qber_grid, vec![0.05]);
        assert!(cfg.validate().is_ok());
        assert!(matches!(ExperimentConfig::parse("q = 4\nbogus = 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(ExperimentConfig::parse("q 4\n").is_err());
        assert!(ExperimentConfig::parse("q = 6\nqber = 0.1\n").unwrap().validate().is_err());
        assert!(ExperimentConfig::parse("q = 4\n").unwrap().validate().is_err());
    }

    #[test]
    fn key_verification() {
        assert_eq!(verify_keys(&[1, 2, 3], &[1, 2, 3]).unwrap(), (true, 0));
        assert_eq!(verify_keys(&[1, 2, 3], &[1, 0, 3]).unwrap(), (false, 1));
        assert!(verify_keys(&[1], &[1, 2]).is_err());
    }

    #[test]
    fn interpolation() {
        let pts = [(0.02, 1.2), (0.04, 1.1), (0.03, f64::NAN)];
        assert_eq!(interpolate_f(&pts, 0.01), Some(1.2));
        assert_eq!(interpolate_f(&pts, 0.05), Some(1.1));
        assert!((interpolate_f(&pts, 0.03).unwrap() - 1.15).abs() < 1e-12);
        assert_eq!(interpolate_f(&[], 0.03), None);
    }

    #[test]
    fn frame_records_summarize() {
        let rec = |success, efficiency| FrameRecord {
            success,
            efficiency,
            leak_bits: 0,
            key_len: 1,
            message_rounds: 4,
            serial_messages: 6,
            tries: 2,
            symbol_errors: 0,
        };
        let s = summarize(Method::LdpcBlind, 8, 0.1, &[rec(true, 1.1), rec(true, 1.3), rec(false, 9.0), rec(true, 1.2)]);
        assert!((s.mean_f - 1.2).abs() < 1e-12);
        assert_eq!((s.fer, s.mean_rounds, s.mean_serial_messages, s.mean_tries), (0.25, 4.0, 6.0, 2.0));
    }
}
