use std::sync::LazyLock;

use nalgebra::Matrix2 as NaMatrix2;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tubelab::witness_maps::{eval_f, eval_g, jac_f, sech};
use tubelab::{build_figure1, DomainSpec, Matrix2, WitnessFamily};

static FIG1: LazyLock<DomainSpec> = LazyLock::new(build_figure1);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn svd_norm(m: &Matrix2) -> f64 {
    NaMatrix2::new(m.a11, m.a12, m.a21, m.a22).svd(false, false).singular_values.max()
}

#[test]
fn centre_value_is_exact() {
    for n in (1..=10_000).step_by(37).chain([10_000]) {
        let fam = WitnessFamily::with_cap(n, 2.0, 10_000).unwrap();
        let p = fam.eval_f(c(0.0, 0.0));
        assert_eq!((p.x1, p.x2), (0.0, 2.0));
        let (g1, g2) = fam.eval_g(c(0.0, 0.0));
        assert_eq!((g1, g2), (c(0.0, 0.0), c(2.0, 0.0)));
    }
}

#[test]
fn jacobian_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [1, 5, 20] {
        for _ in 0..100 {
            let z = c(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
            let h = 1e-5 / n as f64;
            let dx = |p: Complex64, q: Complex64| {
                let (a, b) = (eval_f(n, p), eval_f(n, q));
                ((a.x1 - b.x1) / (2.0 * h), (a.x2 - b.x2) / (2.0 * h))
            };
            let (a11, a21) = dx(z + h, z - h);
            let (a12, a22) = dx(z + c(0.0, h), z - c(0.0, h));
            let j = jac_f(n, z);
            let err = (j.a11 - a11).hypot(j.a12 - a12).hypot((j.a21 - a21).hypot(j.a22 - a22));
            assert!(err <= 1e-6 * j.frobenius(), "n = {n}, z = {z}: error {err}");
        }
    }
}

#[test]
fn derivative_norm_grows_strictly() {
    let mut prev = 0.0;
    for n in 1..=1000 {
        let norm = jac_f(n, c(0.0, 0.0)).op_norm();
        assert!(norm >= n as f64);
        assert!(norm > prev, "n = {n}");
        prev = norm;
    }
}

#[test]
fn band_contains_image_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in [1, 2, 5, 20, 300] {
        let fam = WitnessFamily::new(n, 2.0).unwrap();
        for _ in 0..10_000 {
            let (x, y) = (rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
            let p = fam.eval_f(c(x, y));
            let band = fam.image_band(n as f64 * x).unwrap();
            let slack = 1e-14;
            assert!(band.lo - slack <= p.x2 && p.x2 <= band.hi + slack, "n = {n}, ({x}, {y}) -> {} not in {band}", p.x2);
        }
    }
}

#[test]
fn contained_maps_send_the_disc_into_figure1() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in [1, 2, 3, 7, 50] {
        let fam = WitnessFamily::new(n, 2.0).unwrap();
        assert!(fam.verify_containment(&FIG1).is_contained());
        let mut hits = 0;
        while hits < 10_000 {
            let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if z.norm_sqr() >= 1.0 {
                continue;
            }
            hits += 1;
            assert!(FIG1.contains(fam.eval_f(z)), "n = {n}, z = {z}");
        }
    }
}

#[test]
fn real_part_of_lift_is_f() {
    for n in [1, 5, 20] {
        for i in 0..100 {
            for j in 0..100 {
                let z = c(-1.0 + 2.0 * i as f64 / 99.0, -1.0 + 2.0 * j as f64 / 99.0);
                let (g1, g2) = eval_g(n, z);
                let f = eval_f(n, z);
                assert!((g1.re - f.x1).abs() <= 1e-12 && (g2.re - f.x2).abs() <= 1e-12, "n = {n}, z = {z}");
            }
        }
    }
}

#[test]
fn closed_form_op_norm_at_origin() {
    for n in 1..=50u32 {
        let nf = n as f64;
        let expected = nf * (1.0 + sech(nf).powi(2)).sqrt();
        let got = jac_f(n, c(0.0, 0.0)).op_norm();
        assert!((got - expected).abs() <= 1e-10 * expected);
        assert!((svd_norm(&jac_f(n, c(0.0, 0.0))) - expected).abs() <= 1e-10 * expected);
    }
}

proptest! {
    #[test]
    fn op_norm_matches_svd(a in -1e3..1e3f64, b in -1e3..1e3f64, cc in -1e3..1e3f64, d in -1e3..1e3f64) {
        let m = Matrix2::new(a, b, cc, d);
        let oracle = svd_norm(&m);
        prop_assert!((m.op_norm() - oracle).abs() <= 1e-12 * oracle.max(1e-300), "{} vs {}", m.op_norm(), oracle);
        prop_assert!(m.op_norm() <= m.frobenius() * (1.0 + 1e-15));
    }

    #[test]
    fn band_endpoints_come_from_the_curves(n in 1u32..=1000, t in -1.0..=1.0f64) {
        let fam = WitnessFamily::new(n, 2.0).unwrap();
        let x1 = t * n as f64;
        let band = fam.image_band(x1).unwrap();
        let top = fam.image_curve(1.0).unwrap().eval(x1).x2;
        let bottom = fam.image_curve(0.0).unwrap().eval(x1).x2;
        prop_assert!((band.lo - top.min(bottom)).abs() <= 1e-12 && (band.hi - top.max(bottom)).abs() <= 1e-12);
    }
}
