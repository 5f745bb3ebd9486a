//! Acceptance suite. Runs as a plain binary so every criterion prints one
//! PASS/FAIL line; exits nonzero if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;
use tubelab::cli_report::document::CertificateDocument;
use tubelab::geometry::{ObstacleParams, QueryLimits, Strip, ValidationOptions, VerticalSlit};
use tubelab::kobayashi::{
    strip_metric, strip_metric_pullback, tube_lower_bound, upper_bound_from_disc, AnalyticDisc, HyperbolicityReport,
    ObstructionVerdict, TangentSample,
};
use tubelab::predicates::{
    check_property_jpaff, check_property_l, verify_jp_witness, AnalyticWitness, Outcome, SearchLimits, ToleranceSchedule,
    Verdict, Witness,
};
use tubelab::witness_maps::{eval_f, eval_g, jac_f, sech, ContainmentOutcome};
use tubelab::{build_figure1, build_figure2, figure2_default_teeth, DomainSpec, Interval, Matrix2, Point2, WitnessFamily};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn out_dir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn run_cli(args: &[&str]) -> Result<(std::process::Output, Duration), String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_tubelab")).args(args).output().map_err(|e| e.to_string())?;
    Ok((out, start.elapsed()))
}

fn analyze(preset: &str, dir: &Path) -> Result<(CertificateDocument, Duration), String> {
    let dir_s = dir.to_str().unwrap();
    let (out, elapsed) = run_cli(&["analyze", "--preset", preset, "--point", "0,2", "--K", "20", "--N", "50", "--out", dir_s])?;
    ensure!(out.status.code() == Some(0), "analyze exited with {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.join("certificate.json")).map_err(|e| e.to_string())?;
    Ok((CertificateDocument::parse(&text).map_err(|e| e.to_string())?, elapsed))
}

/// The verdict pattern shared by both figures.
fn figure_pattern(d: &DomainSpec, rep: &HyperbolicityReport) -> Check {
    let aff = &rep.property_jpaff;
    ensure!(aff.verdict == Verdict::HoldsUpToK, "(J-P)_aff verdict {:?}", aff.verdict);
    ensure!(aff.witness_ks() == (1..=4).collect::<Vec<_>>(), "(J-P)_aff witnesses at {:?}", aff.witness_ks());
    ensure!(aff.refuted_ks() == (5..=20).collect::<Vec<_>>(), "(J-P)_aff refuted at {:?}", aff.refuted_ks());
    ensure!(rep.property_l.verdict == Verdict::HoldsUpToK, "(L) verdict {:?}", rep.property_l.verdict);
    ensure!(rep.property_jp.verdict == Verdict::FailsUpToK, "(J-P) verdict {:?}", rep.property_jp.verdict);
    for k in 1..=20 {
        let expected = AnalyticWitness::scaled_sine(k, 2.0);
        match rep.property_jp.record(k).map(|r| &r.outcome) {
            Some(Outcome::WitnessFound { witness: Witness::Analytic(w) }) if *w == expected => {}
            other => return Err(format!("(J-P) record at k = {k} is {other:?}")),
        }
        let check = verify_jp_witness(d, Point2::new(0.0, 2.0), &expected, &QueryLimits::default());
        ensure!(check.is_verified(), "sin(t)/{k} + 2 does not verify: {check:?}");
    }
    let cert = rep.obstruction.as_ref().ok_or("no obstruction certificate")?;
    ensure!(cert.verdict == ObstructionVerdict::NonHyperbolicityWitness, "obstruction verdict {:?}", cert.verdict);
    ensure!(cert.rows.len() == 50, "{} rows", cert.rows.len());
    let contained = cert.rows.iter().filter(|r| r.containment.outcome == ContainmentOutcome::Contained).count();
    ensure!(contained == 50, "{contained}/50 containments");
    ensure!(rep.diagram_consistent(), "diagram checks failed");
    Ok(format!(
        "L {:?}, JPaff {:?} (witness k<=4, refuted 5..20), JP sin(t)/k+2 for k<=20, {:?} with 50/50 Contained",
        rep.property_l.verdict, aff.verdict, cert.verdict
    ))
}

fn criterion_1() -> Check {
    let (doc, elapsed) = analyze("fig1", &out_dir("fig1"))?;
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    let detail = figure_pattern(&build_figure1(), &doc.report)?;
    Ok(format!("{detail}; {:.2}s", elapsed.as_secs_f64()))
}

fn criterion_2() -> Check {
    let mut worst_closed: f64 = 0.0;
    let mut worst_fd: f64 = 0.0;
    for n in 1..=50u32 {
        let nf = n as f64;
        let j = jac_f(n, c(0.0, 0.0));
        let closed = nf * (1.0 + sech(nf).powi(2)).sqrt();
        let rel = (j.op_norm() - closed).abs() / closed;
        worst_closed = worst_closed.max(rel);
        ensure!(rel <= 1e-10, "n = {n}: relative error {rel:e} against the closed form");
        let h = 1e-5 / nf;
        let col = |dz: Complex64| {
            let (p, q) = (eval_f(n, dz), eval_f(n, -dz));
            ((p.x1 - q.x1) / (2.0 * h), (p.x2 - q.x2) / (2.0 * h))
        };
        let ((a11, a21), (a12, a22)) = (col(c(h, 0.0)), col(c(0.0, h)));
        let fd = Matrix2::new(a11, a12, a21, a22).op_norm();
        let rel = (fd - j.op_norm()).abs() / j.op_norm();
        worst_fd = worst_fd.max(rel);
        ensure!(rel <= 1e-6, "n = {n}: finite-difference relative error {rel:e}");
    }
    let at50 = jac_f(50, c(0.0, 0.0)).op_norm();
    ensure!(at50 > 49.9, "norm at n = 50 is {at50}");
    Ok(format!("closed-form error {worst_closed:.1e}, finite-difference error {worst_fd:.1e}, norm(50) = {at50}"))
}

fn criterion_3() -> Check {
    let fig1 = build_figure1();
    for n in 1..=50 {
        let cert = WitnessFamily::new(n, 2.0).unwrap().verify_containment(&fig1);
        ensure!(cert.outcome == ContainmentOutcome::Contained, "fig1, n = {n}: {:?}", cert.outcome);
    }
    let slits: Vec<ObstacleParams> = [(-3.0, 0.0, 2.0), (-1.0, 2.0, 4.0), (1.0, 0.0, 2.6), (3.0, 2.0, 4.0)]
        .iter()
        .map(|&(m, lo, hi)| ObstacleParams::Slit(VerticalSlit { x: m * FRAC_PI_2, span: Interval::new(lo, hi) }))
        .collect();
    let tall = DomainSpec::new("fig1-tall", Strip::default(), &slits, &ValidationOptions::default()).map_err(|e| e.to_string())?;
    let first_n = (1..=50u32).find(|&n| sech(n as f64) <= 0.6).unwrap();
    for n in 1..=first_n {
        let cert = WitnessFamily::new(n, 2.0).unwrap().verify_containment(&tall);
        match (&cert.outcome, n < first_n) {
            (ContainmentOutcome::Contained, true) => {}
            (ContainmentOutcome::NotContained { witness, preimage }, false) => {
                ensure!(!tall.contains(*witness), "witness {witness:?} lies in D");
                if let Some([x, y]) = preimage {
                    let image = WitnessFamily::new(n, 2.0).unwrap().eval_f(c(*x, *y));
                    ensure!(
                        (image.x1 - witness.x1).abs() < 1e-6 && (image.x2 - witness.x2).abs() < 1e-6,
                        "preimage maps to {image:?}, not {witness:?}"
                    );
                }
                return Ok(format!("fig1 Contained for n = 1..50; tall slit flips at n = {n} with witness ({}, {})", witness.x1, witness.x2));
            }
            (o, _) => return Err(format!("tall slit, n = {n}: {o:?}")),
        }
    }
    Err("tall slit never flipped".into())
}

fn criterion_4() -> Check {
    let mut worst: f64 = 0.0;
    for n in [1, 5, 20] {
        for i in 0..100 {
            for j in 0..100 {
                let z = c(-1.0 + 2.0 * i as f64 / 99.0, -1.0 + 2.0 * j as f64 / 99.0);
                let (g1, g2) = eval_g(n, z);
                let f = eval_f(n, z);
                worst = worst.max((g1.re - f.x1).abs()).max((g2.re - f.x2).abs());
            }
        }
    }
    ensure!(worst <= 1e-12, "max |Re g - f| = {worst:e}");
    let mut ratios = Vec::new();
    for n in [1, 5, 20] {
        let fam = WitnessFamily::new(n, 2.0).unwrap();
        // the O(h²) term dominates only once n·h is small
        let h = 0.05 / n as f64;
        let coarse = fam.cr_residual(h).map_err(|e| e.to_string())?.max;
        let fine = fam.cr_residual(h / 2.0).map_err(|e| e.to_string())?.max;
        let ratio = coarse / fine;
        ensure!((ratio - 4.0).abs() <= 0.4, "n = {n}: CR residual ratio {ratio}");
        ratios.push(ratio);
    }
    Ok(format!("max |Re g - f| = {worst:.1e}; CR halving ratios {ratios:.3?}"))
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let h = rng.random_range(0.1..10.0);
        let w = c(h * rng.random_range(0.001..0.999), rng.random_range(-5.0..5.0));
        let v = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let closed = strip_metric(h, w, v).map_err(|e| e.to_string())?;
        let oracle = strip_metric_pullback(h, w, v).map_err(|e| e.to_string())?;
        worst = worst.max((closed - oracle).abs() / oracle);
    }
    ensure!(worst <= 1e-9, "closed form vs pullback relative error {worst:e}");
    let strip = DomainSpec::bare_strip(Strip::default()).unwrap();
    let lb = tube_lower_bound(&strip, &TangentSample::at(Point2::new(0.0, 2.0), [c(0.0, 0.0), c(1.0, 0.0)]))
        .map_err(|e| e.to_string())?
        .value;
    ensure!((lb - PI / 8.0).abs() <= 1e-9, "lower bound {lb}, expected pi/8");
    let fig1 = build_figure1();
    let mut worst_ratio: f64 = 0.0;
    for n in 10..=50u32 {
        let fam = WitnessFamily::new(n, 2.0).unwrap();
        let (d1, d2) = fam.g_derivative(c(0.0, 0.0));
        let norm = d1.norm().hypot(d2.norm());
        let s = TangentSample::at(fam.base(), [d1 / norm, d2 / norm]);
        let ub = upper_bound_from_disc(&fig1, &AnalyticDisc::Family { n }, &s, &QueryLimits::default())
            .map_err(|e| format!("n = {n}: {e}"))?
            .value;
        let nf = n as f64;
        let target = 1.0 / (nf * (1.0 + sech(nf).powi(2)).sqrt());
        let dev = (ub / target - 1.0).abs();
        worst_ratio = worst_ratio.max(dev);
        ensure!(dev <= 0.05, "n = {n}: upper bound {ub} vs {target}");
    }
    Ok(format!("strip oracle error {worst:.1e}; lower bound pi/8 to {:.1e}; g_n bounds within {:.1e} of 1/(n sqrt(1+sech^2 n))", (lb - PI / 8.0).abs(), worst_ratio))
}

fn criterion_6() -> Check {
    let limits = SearchLimits::default();
    let max_k = 10;
    let (mut fails, mut holds, mut other, mut literal) = (0, 0, 0, 0);
    for seed in 0..50u64 {
        let d = common::random_slit_spec(1000 + seed);
        let a = Point2::new(0.0, 2.0);
        let a = if d.contains(a) { a } else { Point2::new(0.25, 2.0) };
        ensure!(d.contains(a), "{}: no base point on the mid-line", d.name);
        let l = check_property_l(&d, a, max_k, ToleranceSchedule::Reciprocal, &limits).map_err(|e| e.to_string())?;
        let aff = check_property_jpaff(&d, a, max_k, &limits).map_err(|e| e.to_string())?;
        match l.verdict {
            Verdict::FailsUpToK => {
                fails += 1;
                ensure!(aff.verdict == Verdict::FailsUpToK, "{}: L fails but JPaff {:?}", d.name, aff.verdict);
            }
            Verdict::HoldsUpToK => {
                holds += 1;
                if aff.verdict == Verdict::FailsUpToK {
                    literal += 1;
                }
                ensure!(aff.verdict != Verdict::FailsUpToK, "{}: JPaff fails while L holds", d.name);
            }
            Verdict::Inconclusive => other += 1,
        }
        ensure!(
            !(l.verdict == Verdict::FailsUpToK && aff.verdict == Verdict::HoldsUpToK),
            "{}: L fails while JPaff holds",
            d.name
        );
    }
    Ok(format!("50 specs: L fails {fails} (all with JPaff failing), L holds {holds}, inconclusive {other}; JPaff fails with L holding on {literal}"))
}

fn criterion_7() -> Check {
    let d = build_figure2(&figure2_default_teeth()).map_err(|e| e.to_string())?;
    d.validate(&ValidationOptions::default()).map_err(|e| format!("tooth/sine disjointness: {e}"))?;
    let (doc, elapsed) = analyze("fig2", &out_dir("fig2"))?;
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    let detail = figure_pattern(&d, &doc.report)?;
    Ok(format!("teeth avoid sin x1 + 2 (interval-verified); {detail}; {:.2}s", elapsed.as_secs_f64()))
}

/// Paths to every scalar in `v`.
fn leaf_paths(v: &Value, prefix: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                prefix.push(k.clone());
                leaf_paths(child, prefix, out);
                prefix.pop();
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                prefix.push(i.to_string());
                leaf_paths(child, prefix, out);
                prefix.pop();
            }
        }
        _ => out.push(prefix.clone()),
    }
}

fn at_path<'a>(v: &'a mut Value, path: &[String]) -> Option<&'a mut Value> {
    path.iter().try_fold(v, |cur, p| match cur {
        Value::Object(m) => m.get_mut(p),
        Value::Array(a) => a.get_mut(p.parse::<usize>().ok()?),
        _ => None,
    })
}

fn tamper(leaf: &Value) -> Value {
    match leaf {
        Value::Bool(b) => Value::Bool(!b),
        Value::Number(n) if n.is_u64() => Value::from(n.as_u64().unwrap() + 1),
        Value::Number(n) if n.is_i64() => Value::from(n.as_i64().unwrap() - 1),
        Value::Number(n) => {
            let x = n.as_f64().unwrap();
            Value::from(if x == 0.0 { 1e-3 } else { x * (1.0 + 1e-9) })
        }
        Value::String(s) => Value::String(format!("{s}x")),
        Value::Null => Value::from(0),
        _ => unreachable!(),
    }
}

fn detects(text: &str) -> bool {
    match CertificateDocument::parse(text) {
        Err(_) => true,
        Ok(doc) => doc.verify(Some(text)).is_err(),
    }
}

/// Canonical text of `root` with the leaf at `path` replaced, optionally
/// resealed with a fresh checksum. `Err` carries the schema error when the
/// tamper no longer deserializes.
fn tampered(root: &Value, path: &[String], new: Value, reseal: bool) -> Result<String, String> {
    let mut v = root.clone();
    *at_path(&mut v, path).ok_or("no such path")? = new;
    let mut doc: CertificateDocument = serde_json::from_value(v).map_err(|e| e.to_string())?;
    if reseal {
        doc.checksum = doc.compute_checksum();
    }
    Ok(doc.to_canonical_json())
}

fn criterion_8() -> Check {
    let mut summary = Vec::new();
    for preset in ["fig1", "fig2"] {
        let dir = out_dir(&format!("verify-{preset}"));
        analyze(preset, &dir)?;
        let path = dir.join("certificate.json");
        let (out, _) = run_cli(&["verify", path.to_str().unwrap()])?;
        ensure!(out.status.code() == Some(0), "{preset}: verify exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));

        let text = std::fs::read_to_string(&path).unwrap();
        let root: Value = serde_json::from_str(&text).unwrap();
        let mut paths = Vec::new();
        leaf_paths(&root, &mut Vec::new(), &mut paths);
        // Some(true): rejected by verify; Some(false): accepted; None: no longer parses
        let results: Vec<Option<bool>> = paths
            .par_iter()
            .map(|path| {
                let leaf = at_path(&mut root.clone(), path).unwrap().clone();
                tampered(&root, path, tamper(&leaf), false).ok().map(|text| detects(&text))
            })
            .collect();
        let missed: Vec<String> =
            paths.iter().zip(&results).filter(|(_, r)| **r == Some(false)).map(|(p, _)| p.join(".")).collect();
        let schema = results.iter().filter(|r| r.is_none()).count();
        ensure!(missed.is_empty(), "{preset}: {} of {} single-field tampers undetected, first at {}", missed.len(), paths.len(), missed[0]);

        let rep = &root["report"];
        let mut targets: Vec<(Vec<String>, Value)> = Vec::new();
        let op = rep["obstruction"]["rows"][9]["op_norm_df"].as_f64().unwrap();
        targets.push((path_of(&["report", "obstruction", "rows", "9", "op_norm_df"]), Value::from(op * 1.001)));
        targets.push((path_of(&["report", "obstruction", "verdict"]), Value::from("NoObstructionFound")));
        targets.push((path_of(&["report", "property_l", "verdict"]), Value::from("FailsUpToK")));
        targets.push((path_of(&["report", "property_jpaff", "verdict"]), Value::from("FailsUpToK")));
        targets.push((path_of(&["report", "affine_gap"]), Value::from(false)));
        targets.push((path_of(&["report", "diagram", "0", "holds"]), Value::from(false)));
        let d = rep["property_jpaff"]["per_k"][3]["outcome"]["witness"]["d"].as_f64().unwrap();
        targets.push((path_of(&["report", "property_jpaff", "per_k", "3", "outcome", "witness", "d"]), Value::from(d + 0.3)));
        let abscissa = rep["property_jpaff"]["per_k"][6]["outcome"]["refutation"]["cells"][0]["exclusion"]["abscissa"].as_f64().unwrap();
        targets.push((
            path_of(&["report", "property_jpaff", "per_k", "6", "outcome", "refutation", "cells", "0", "exclusion", "abscissa"]),
            Value::from(abscissa + 0.5),
        ));
        targets.push((path_of(&["report", "property_jpaff", "per_k", "6", "outcome", "refutation", "cells", "0", "area"]), Value::from(0.0)));
        targets.push((path_of(&["report", "property_l", "per_k", "0", "outcome", "witness", "b"]), Value::from(3.5)));
        targets.push((path_of(&["report", "property_jp", "per_k", "5", "outcome", "witness", "center"]), Value::from(2.5)));
        let ub = rep["metric_samples"][2]["upper"]["value"].as_f64().unwrap();
        targets.push((path_of(&["report", "metric_samples", "2", "upper", "value"]), Value::from(ub * 0.5)));
        let lb = rep["metric_samples"][0]["lower"]["value"].as_f64().unwrap();
        targets.push((path_of(&["report", "metric_samples", "0", "lower", "value"]), Value::from(lb * 2.0)));
        targets.push((path_of(&["domain", "obstacles", "0", "x"]), Value::from(0.0)));
        targets.push((path_of(&["base_point", "x2"]), Value::from(2.5)));
        let mut sealed = 0;
        for (p, new) in &targets {
            if let Ok(text) = tampered(&root, p, new.clone(), true) {
                sealed += 1;
                ensure!(detects(&text), "{preset}: resealed tamper at {} accepted", p.join("."));
            }
        }
        summary.push(format!("{preset}: verify ok, {} leaf tampers all rejected ({schema} by schema, rest by checksum), {sealed} resealed semantic tampers rejected", paths.len()));
    }
    Ok(summary.join("; "))
}

fn path_of(p: &[&str]) -> Vec<String> {
    p.iter().map(|s| s.to_string()).collect()
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("Fig. 1 reproduction", criterion_1),
        ("derivative growth", criterion_2),
        ("containment rigor", criterion_3),
        ("holomorphic lift", criterion_4),
        ("metric bracket", criterion_5),
        ("implication diagram", criterion_6),
        ("Fig. 2 pipeline", criterion_7),
        ("certificate integrity", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
