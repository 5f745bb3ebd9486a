mod common;

use std::sync::LazyLock;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tubelab::geometry::{
    graph_in_domain, horizontal_segment_in, ObstacleParams, QueryLimits, Strip, ValidationOptions, VerticalSlit,
};
use tubelab::predicates::{
    check_property_jp, check_property_jpaff, check_property_l, Outcome, PropertyReport, Refutation, SearchLimits,
    ToleranceSchedule, Verdict, Witness,
};
use tubelab::{build_figure1, build_figure2, figure2_default_teeth, Containment, DomainSpec, Interval, Point2};

static FIG1: LazyLock<DomainSpec> = LazyLock::new(build_figure1);
static FIG2: LazyLock<DomainSpec> = LazyLock::new(|| build_figure2(&figure2_default_teeth()).unwrap());

const A: Point2 = Point2 { x1: 0.0, x2: 2.0 };

/// Re-checks every witness through the geometry queries alone.
fn witnesses_hold(d: &DomainSpec, r: &PropertyReport) {
    let a2 = r.base_point.x2;
    let limits = QueryLimits::default();
    for rec in &r.per_k {
        let k = rec.k as f64;
        let Outcome::WitnessFound { witness } = &rec.outcome else { continue };
        match witness {
            Witness::Segment { b } => {
                assert!((b - a2).abs() <= 1.0 / k, "k = {k}: height {b} too far");
                assert!(horizontal_segment_in(d, *b, k));
            }
            Witness::Affine(w) => {
                assert!(k * w.c.abs() + (w.d - a2).abs() <= 1.0 / k + 1e-15);
                let (c, dd) = (w.c, w.d);
                let g = move |t: Interval| t * c + dd;
                assert_eq!(graph_in_domain(d, &g, Interval::new(-k, k), &limits), Containment::Inside);
            }
            Witness::Analytic(w) => {
                let w2 = w.clone();
                let g = move |t: Interval| w2.enclose(t);
                assert_eq!(graph_in_domain(d, &g, Interval::new(-k, k), &limits), Containment::Inside);
                for i in 0..=2000 {
                    let t = -k + 2.0 * k * i as f64 / 2000.0;
                    assert!((w.value(t) - a2).abs() <= 1.0 / k + 1e-12, "k = {k}, t = {t}");
                }
            }
        }
    }
}

/// Refuted k: sampled parameters all hit the complement at the recorded
/// abscissa, and the cells cover the diamond exactly once.
fn refutations_hold(d: &DomainSpec, r: &PropertyReport, seed: u64) {
    let a2 = r.base_point.x2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for rec in &r.per_k {
        let k = rec.k as f64;
        let Outcome::RefutedAtResolution { refutation } = &rec.outcome else { continue };
        match refutation {
            Refutation::Heights { range, pieces, .. } => {
                for _ in 0..2000 {
                    let b = rng.random_range(range.lo..=range.hi);
                    let p = pieces.iter().find(|p| p.b.contains(b)).expect("height range is covered");
                    assert!(p.exclusion.abscissa.abs() <= k);
                    assert!(!d.contains(Point2::new(p.exclusion.abscissa, b)));
                }
            }
            Refutation::Cells { cells, measure } => {
                let total: f64 = cells.iter().map(|c| c.area).sum();
                assert!((total - 2.0).abs() <= 1e-12 && (measure - 2.0).abs() <= 1e-12, "k = {k}: area {total}");
                for _ in 0..5000 {
                    let (u, v) = loop {
                        let (u, v): (f64, f64) = (rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
                        if u.abs() + v.abs() < 1.0 {
                            break (u, v);
                        }
                    };
                    let owners: Vec<_> = cells.iter().filter(|c| c.u.contains(u) && c.v.contains(v)).collect();
                    assert!(!owners.is_empty(), "k = {k}: ({u}, {v}) uncovered");
                    let interior = owners.iter().filter(|c| c.u.lo < u && u < c.u.hi && c.v.lo < v && v < c.v.hi).count();
                    assert!(interior <= 1, "k = {k}: overlapping cells at ({u}, {v})");
                    let cell = owners[0];
                    let t = cell.exclusion.abscissa;
                    assert!(t.abs() <= k);
                    let y = u / (k * k) * t + a2 + v / k;
                    assert!(!d.contains(Point2::new(t, y)), "k = {k}: ({t}, {y}) is in the domain");
                }
            }
        }
    }
}

#[test]
fn figure_reports_recheck_independently() {
    let limits = SearchLimits::default();
    for (i, d) in [&*FIG1, &*FIG2].into_iter().enumerate() {
        let l = check_property_l(d, A, 12, ToleranceSchedule::Reciprocal, &limits).unwrap();
        let aff = check_property_jpaff(d, A, 12, &limits).unwrap();
        let jp = check_property_jp(d, A, 12, &limits).unwrap();
        for r in [&l, &aff, &jp] {
            witnesses_hold(d, r);
            refutations_hold(d, r, i as u64);
        }
        assert_eq!(jp.witness_ks().len(), 12);
        assert!(!aff.refuted_ks().is_empty());
    }
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let limits = SearchLimits::default();
            (
                check_property_l(&FIG1, A, 10, ToleranceSchedule::Reciprocal, &limits).unwrap(),
                check_property_jpaff(&FIG1, A, 10, &limits).unwrap(),
                check_property_jp(&FIG1, A, 10, &limits).unwrap(),
            )
        })
    };
    assert_eq!(run(1), run(4));
}

/// Overlapping slits block every horizontal segment but not a slightly
/// tilted line, so the implication only runs from (L) to (J-P)_aff.
#[test]
fn jpaff_can_fail_while_l_holds() {
    let eps = 0.005;
    let obstacles = [
        ObstacleParams::Slit(VerticalSlit { x: -1.0, span: Interval::new(0.0, 2.0 + eps) }),
        ObstacleParams::Slit(VerticalSlit { x: 1.0, span: Interval::new(2.0 - eps, 4.0) }),
    ];
    let d = DomainSpec::new("overlap", Strip::default(), &obstacles, &ValidationOptions::default()).unwrap();
    let limits = SearchLimits::default();
    let l = check_property_l(&d, A, 10, ToleranceSchedule::Reciprocal, &limits).unwrap();
    let aff = check_property_jpaff(&d, A, 10, &limits).unwrap();
    assert_eq!(l.verdict, Verdict::HoldsUpToK);
    assert_eq!(aff.verdict, Verdict::FailsUpToK);
    witnesses_hold(&d, &aff);
    refutations_hold(&d, &l, 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn implications_on_random_slit_specs(seed in 0u64..10_000, x in -2.0..2.0f64, y in 0.5..3.5f64) {
        let d = common::random_slit_spec(seed);
        let a = if d.contains(Point2::new(x, y)) { Point2::new(x, y) } else { Point2::new(x, 2.0) };
        prop_assume!(d.contains(a));
        let limits = SearchLimits::default();
        let max_k = 8;
        let l = check_property_l(&d, a, max_k, ToleranceSchedule::Reciprocal, &limits).unwrap();
        let aff = check_property_jpaff(&d, a, max_k, &limits).unwrap();
        witnesses_hold(&d, &l);
        witnesses_hold(&d, &aff);
        refutations_hold(&d, &aff, seed);
        for rec in &l.per_k {
            if rec.outcome.is_witness() {
                prop_assert!(aff.record(rec.k).unwrap().outcome.is_witness(), "{}: L witness at k = {} not lifted", d.name, rec.k);
            }
        }
        for rec in &aff.per_k {
            if let Outcome::WitnessFound { witness: Witness::Affine(w) } = &rec.outcome {
                if w.c == 0.0 {
                    prop_assert!(l.record(rec.k).unwrap().outcome.is_witness(), "constant affine witness without an L witness");
                }
            }
        }
        if l.verdict == Verdict::FailsUpToK {
            prop_assert_eq!(aff.verdict, Verdict::FailsUpToK);
        }
        prop_assert!(!(l.verdict == Verdict::FailsUpToK && aff.verdict == Verdict::HoldsUpToK));
    }
}
