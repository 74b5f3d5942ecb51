//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! `cargo test --release --test acceptance -- 1 7` runs a subset; with no
//! arguments every criterion runs (the LDPC sweep dominates: a couple of
//! hours on one core). A FAIL line does not fail the target unless
//! `ACCEPTANCE_STRICT=1` is set.

mod common;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use hdir::blind::{run_blind, BlindCode};
use hdir::cascade::{self, p_even, p_odd, CascadeConfig, Variant};
use hdir::channel::{conditional_entropy, efficiency, sample_frame, Base, ChannelParams};
use hdir::decoder::{fwht_in_place, ifwht_in_place};
use hdir::galois::{Gf, GfContext};
use hdir::harness::{run_experiment, ExperimentConfig, Method, PointSummary};
use hdir::keyrate::{key_length_bound, leak_for_efficiency, relative_improvement, Scenario};
use hdir::mcde::{mcde_threshold, EnsembleSim};
use hdir::nbldpc::{check_count, designed_ensembles, peg_construct};
use hdir::transcript::EventKind;
use rand::Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn grid(a: f64, b: f64, step: f64) -> Vec<f64> {
    let k = ((b - a) / step).round() as usize;
    (0..=k).map(|i| ((a + i as f64 * step) * 1e9).round() / 1e9).collect()
}

fn sweep(method: Method, q: usize, qber_grid: Vec<f64>, frames: usize) -> Vec<PointSummary> {
    let cfg = ExperimentConfig { method, q, qber_grid, frames, ..Default::default() };
    run_experiment(&cfg).expect("sweep runs")
}

fn grand_mean(rows: &[PointSummary]) -> f64 {
    rows.iter().map(|r| r.mean_f).sum::<f64>() / rows.len() as f64
}

fn show(rows: &[PointSummary]) {
    for r in rows {
        println!(
            "    {} q={} p={:.2} f={:.4} fer={:.3} rounds={:.1} tries={:.2}",
            r.method, r.q, r.qber, r.mean_f, r.fer, r.mean_rounds, r.mean_tries
        );
    }
}

const CASCADE_FRAMES: usize = 200;

// HD serial and binary Cascade share the sweeps of criteria 1 and 2.
struct CascadeSweeps {
    hd: Vec<(usize, Vec<PointSummary>)>,
    binary: Vec<(usize, Vec<PointSummary>)>,
}

fn cascade_sweeps() -> CascadeSweeps {
    let mut out = CascadeSweeps { hd: Vec::new(), binary: Vec::new() };
    for q in [4, 8, 32] {
        let g = grid(0.01, 0.20, 0.01);
        let hd = sweep(Method::Cascade(Variant::HdSerial), q, g.clone(), CASCADE_FRAMES);
        show(&hd);
        out.hd.push((q, hd));
        let bin = sweep(Method::Cascade(Variant::Binary), q, g, CASCADE_FRAMES);
        show(&bin);
        out.binary.push((q, bin));
    }
    out
}

fn criterion_1(s: &CascadeSweeps) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for ((q, rows), (target, tol)) in s.hd.iter().zip([(1.06, 0.03), (1.07, 0.03), (1.12, 0.04)]) {
        let f = grand_mean(rows);
        let worst_fer = rows.iter().map(|r| r.fer).fold(0.0, f64::max);
        let bad: Vec<String> = rows.iter().filter(|r| r.fer >= 0.01).map(|r| format!("{:.2}", r.qber)).collect();
        pass &= (f - target).abs() <= tol && bad.is_empty();
        parts.push(format!("q={q} f={f:.4} (want {target}±{tol}) max FER={worst_fer:.3} FER>=1% at [{}]", bad.join(" ")));
    }
    verdict(pass, parts.join("; "))
}

fn criterion_2(s: &CascadeSweeps) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (((q, bin), (_, hd)), target) in s.binary.iter().zip(&s.hd).zip([1.22, 1.36, 1.65]) {
        let (fb, fh) = (grand_mean(bin), grand_mean(hd));
        pass &= (fb - target).abs() <= 0.06 && fb - fh >= 0.10;
        parts.push(format!("q={q} binary f={fb:.4} (want {target}±0.06) gap={:.4}", fb - fh));
    }
    verdict(pass, parts.join("; "))
}

fn criterion_3() -> Verdict {
    let q = 16;
    let rows = sweep(Method::Cascade(Variant::HdParallel), q, vec![0.05], 500);
    show(&rows);
    let r = &rows[0];
    let n = (hdir::cascade::FRAME_BITS / 4) as f64;
    let ideal = n * conditional_entropy(&ChannelParams::new(q, 0.05).unwrap(), Base::Two);
    let ratio = r.mean_serial_messages / ideal;
    let pass = r.mean_rounds <= 300.0 && r.mean_f <= 1.10 && (1.0 / 1.5..=1.5).contains(&ratio);
    verdict(
        pass,
        format!(
            "rounds={:.1} (<=300) f={:.4} (<=1.10) serial messages={:.0} vs n*H={ideal:.0} ratio={ratio:.3}",
            r.mean_rounds, r.mean_f, r.mean_serial_messages
        ),
    )
}

fn criterion_4() -> Verdict {
    let cfg = CascadeConfig::default();
    let params_of = |j: u64| ChannelParams::new(2, 0.01 + 0.002 * j as f64).unwrap();
    let mut identical = 0;
    for j in 0..50u64 {
        let params = params_of(j);
        let frame = sample_frame(&params, 4096, 1000 + j);
        let p = params.p;
        let b = cascade::run_binary_cascade(&frame.x, &frame.y, 2, p, j, &cfg).unwrap();
        let s = cascade::run_hd_cascade_serial(&frame.x, &frame.y, 2, p, j, &cfg).unwrap();
        let par = cascade::run_hd_cascade_parallel(&frame.x, &frame.y, 2, p, j, &cfg).unwrap();
        let reference = b.transcript.to_jsonl();
        if reference == s.transcript.to_jsonl() && reference == par.transcript.to_jsonl() {
            identical += 1;
        }
    }
    let rows = sweep(Method::Cascade(Variant::Binary), 2, grid(0.03, 0.10, 0.01), CASCADE_FRAMES);
    show(&rows);
    let f = grand_mean(&rows);
    verdict(identical == 50 && f <= 1.06, format!("identical transcripts {identical}/50; binary q=2 mean f={f:.4} (<=1.06)"))
}

fn criterion_5() -> Verdict {
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let q = if seed % 2 == 0 { 2 } else { 4 };
        let n = 6 + (seed as usize % 7);
        let m = 3 + (seed as usize % 4);
        worst = worst.max(common::three_iteration_gap(q, n, m, seed));
    }
    verdict(worst < 1e-6, format!("20 codes, worst LLR gap after 3 iterations {worst:.2e} (<1e-6)"))
}

fn criterion_6() -> Verdict {
    let cfg = ExperimentConfig {
        method: Method::LdpcBlind,
        q: 8,
        qber_grid: grid(0.03, 0.15, 0.03),
        frames: 100,
        n: Some(10_000),
        catalog: Some(data("codes")),
        matrix_cache: Some(PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("matrix_cache")),
        ..Default::default()
    };
    let rows = run_experiment(&cfg).expect("LDPC sweep runs");
    show(&rows);
    let mut pass = true;
    let mut parts = Vec::new();
    for r in &rows {
        let bound = if r.qber >= 0.06 - 1e-9 { 1.18 } else { 1.25 };
        let ok = r.mean_f <= bound && r.mean_tries <= 10.0;
        pass &= ok;
        parts.push(format!("p={:.2} f={:.4}(<={bound}) tries={:.2}", r.qber, r.mean_f, r.mean_tries));
    }
    verdict(pass, parts.join("; "))
}

fn criterion_7() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for q in [4, 8] {
        let dist = designed_ensembles(q).into_iter().find(|d| d.design_rate == 0.5).expect("rate-0.5 ensemble");
        let det = dist.det.expect("tabulated threshold");
        let ctx = GfContext::new(q).unwrap();
        let sim = EnsembleSim::new(dist, vec![det - 0.01, det + 0.02]);
        let (_, recs) = mcde_threshold(&sim, &ctx, 1).unwrap();
        let ok = recs[0].success && !recs[1].success;
        pass &= ok;
        parts.push(format!(
            "q={q} DET={det}: {:.3} {} after {} it, {:.3} {}",
            recs[0].p,
            if recs[0].success { "converges" } else { "stalls" },
            recs[0].iterations,
            recs[1].p,
            if recs[1].success { "converges" } else { "stalls" },
        ));
    }
    verdict(pass, parts.join("; "))
}

fn criterion_8() -> Verdict {
    let mut failures = Vec::new();

    // Ledger: every method, a few frames each.
    let cfg = CascadeConfig::default();
    for q in [2, 4, 8, 32] {
        for variant in [Variant::Binary, Variant::HdSerial, Variant::HdParallel] {
            for j in 0..4u64 {
                let params = ChannelParams::new(q, 0.02 + 0.03 * j as f64).unwrap();
                let frame = sample_frame(&params, 3000, j);
                let out = cascade::run_variant(variant, &frame.x, &frame.y, q, params.p, j, &cfg).unwrap();
                let t = &out.transcript;
                let ok = out.leak_bits == t.leak_bits()
                    && out.efficiency == efficiency(t.leak_bits() as f64, frame.len(), &params)
                    && (!out.success || out.bob_key == frame.x);
                if !ok {
                    failures.push(format!("{} q={q} frame {j}", variant.name()));
                }
            }
        }
    }
    for q in [4, 8] {
        let ctx = GfContext::new(q).unwrap();
        let dist = &designed_ensembles(q)[4];
        let h = peg_construct(dist, 600, check_count(600, dist.design_rate), &ctx, 3).unwrap();
        let m = h.m() as i64;
        let code = BlindCode::<f64>::new(h, 0.1).unwrap().with_max_iterations(30);
        let v = q.trailing_zeros() as i64;
        for j in 0..4u64 {
            let params = ChannelParams::new(q, 0.02 + 0.02 * j as f64).unwrap();
            let frame = sample_frame(&params, code.key_len(), j);
            let out = run_blind(&code, &frame.x, &frame.y, &params, &params, j).unwrap();
            let t = &out.transcript;
            let disclosed = t.bits_of(EventKind::ShortenedValues) + t.bits_of(EventKind::PlainReveal);
            let ok = out.leak_bits == t.leak_bits()
                && out.leak_bits == (m - code.reserved as i64) * v + disclosed
                && (!out.success || out.bob_key == frame.x);
            if !ok {
                failures.push(format!("ldpc-blind q={q} frame {j}"));
            }
        }
    }

    // Parity probabilities against enumeration of all error patterns.
    for t in 1..=10u32 {
        for p in [0.0f64, 0.01, 0.1, 0.27, 0.5] {
            let odd: f64 = (0u32..1 << t)
                .filter(|w| w.count_ones() % 2 == 1)
                .map(|w| p.powi(w.count_ones() as i32) * (1.0 - p).powi((t - w.count_ones()) as i32))
                .sum();
            if (p_odd(t, p) - odd).abs() > 1e-12 || (p_even(t, p) - (1.0 - odd)).abs() > 1e-12 {
                failures.push(format!("p_odd t={t} p={p}"));
            }
        }
    }

    // Convolution theorem of the Walsh-Hadamard transform.
    let mut r = hdir::rng::rng(8, &[]);
    for q in [2usize, 4, 8, 16] {
        for _ in 0..50 {
            let x: Vec<f64> = (0..q).map(|_| r.gen()).collect();
            let y: Vec<f64> = (0..q).map(|_| r.gen()).collect();
            let mut direct = vec![0.0; q];
            for a in 0..q {
                for b in 0..q {
                    direct[a ^ b] += x[a] * y[b];
                }
            }
            let (mut fx, mut fy) = (x, y);
            fwht_in_place(&mut fx);
            fwht_in_place(&mut fy);
            let mut prod: Vec<f64> = fx.iter().zip(&fy).map(|(a, b)| a * b).collect();
            ifwht_in_place(&mut prod);
            if prod.iter().zip(&direct).any(|(a, b)| (a - b).abs() > 1e-10) {
                failures.push(format!("WHT convolution q={q}"));
            }
        }
    }

    // Field axioms, every triple.
    for q in [2usize, 4, 8, 16] {
        let f = GfContext::new(q).unwrap();
        let els = 0..q as Gf;
        let mut ok = true;
        for a in els.clone() {
            ok &= f.add(a, 0) == a && f.mul(a, 1) == a && f.add(a, a) == 0;
            ok &= a == 0 || f.mul(a, f.inv(a).unwrap()) == 1;
            for b in els.clone() {
                ok &= f.mul(a, b) == f.mul(b, a) && f.add(a, b) == f.add(b, a);
                for c in els.clone() {
                    ok &= f.mul(a, f.mul(b, c)) == f.mul(f.mul(a, b), c);
                    ok &= f.add(a, f.add(b, c)) == f.add(f.add(a, b), c);
                    ok &= f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c));
                }
            }
        }
        if !ok {
            failures.push(format!("field axioms q={q}"));
        }
    }

    if failures.is_empty() {
        verdict(true, "leak ledgers, parity enumeration, WHT convolution, field axioms")
    } else {
        verdict(false, format!("failed: {}", failures.join(", ")))
    }
}

fn criterion_9() -> Verdict {
    let s = Scenario::load(&data("keyrate_q32.scenario")).unwrap();
    let mut monotone = true;
    let mut pass = true;
    let mut below = Vec::new();
    let mut counted = 0;
    for row in &s.rows {
        let leaks: Vec<f64> = (0..=40).map(|k| k as f64 * 0.05 * row.n).collect();
        let bounds: Vec<f64> = leaks.iter().map(|&l| key_length_bound(&s.inputs(row, l))).collect();
        monotone &= bounds.windows(2).all(|w| w[1] < w[0]);

        let hd = s.key_length(row, 1.12).unwrap();
        let bin = s.key_length(row, 1.65).unwrap();
        if bin > 0.0 {
            counted += 1;
            let gain = relative_improvement(hd, bin);
            println!(
                "    loss {:>4.1} dB: leak {:.3e} -> {:.3e}, l_q {:.4e} -> {:.4e}, gain {:+.1}%",
                row.loss_db,
                leak_for_efficiency(1.65, row.n, s.q, row.qber).unwrap(),
                leak_for_efficiency(1.12, row.n, s.q, row.qber).unwrap(),
                bin,
                hd,
                100.0 * gain
            );
            if gain <= 0.10 {
                pass = false;
                below.push(format!("{} dB ({:+.1}%)", row.loss_db, 100.0 * gain));
            }
        }
    }
    let detail = format!(
        "bound strictly decreasing in leak: {monotone}; {counted} rows with positive binary l_q, gain <=10% at [{}]",
        below.join(", ")
    );
    verdict(monotone && pass, detail)
}

fn main() -> ExitCode {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let run = |k: u32| wanted.is_empty() || wanted.contains(&k);
    let mut results = Vec::new();
    let mut record = |k: u32, v: Verdict, t: Instant| {
        println!("criterion {k}: {} — {} [{:.0?}]", if v.pass { "PASS" } else { "FAIL" }, v.detail, t.elapsed());
        results.push(v.pass);
    };

    if run(1) || run(2) {
        let t = Instant::now();
        let sweeps = cascade_sweeps();
        if run(1) {
            record(1, criterion_1(&sweeps), t);
        }
        if run(2) {
            record(2, criterion_2(&sweeps), t);
        }
    }
    let singles: [(u32, fn() -> Verdict); 7] = [
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    for (k, f) in singles {
        if run(k) {
            let t = Instant::now();
            record(k, f(), t);
        }
    }
    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 || std::env::var_os("ACCEPTANCE_STRICT").is_none() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
