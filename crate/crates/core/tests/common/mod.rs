#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tubelab::geometry::{ObstacleParams, Strip, ValidationOptions, VerticalSlit};
use tubelab::{DomainSpec, Interval};

/// Coarser flood-fill than the default so suites of random specs stay fast.
pub fn coarse_validation() -> ValidationOptions {
    ValidationOptions { connectivity_resolution: 0.05, ..ValidationOptions::default() }
}

/// A connected strip-minus-slits domain. Slits sit on a 0.5 grid in
/// `[-8, 8]`, each anchored below, anchored above, or floating.
pub fn random_slit_spec(seed: u64) -> DomainSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs: Vec<f64> = (-16..=16).map(|i| i as f64 * 0.5).collect();
    xs.shuffle(&mut rng);
    let count = rng.random_range(1..=6);
    let obstacles: Vec<ObstacleParams> = xs[..count]
        .iter()
        .map(|&x| {
            let span = match rng.random_range(0..3) {
                0 => Interval::new(0.0, rng.random_range(0.2..3.8)),
                1 => Interval::new(rng.random_range(0.2..3.8), 4.0),
                _ => {
                    let a: f64 = rng.random_range(0.1..3.9);
                    let b: f64 = rng.random_range(0.1..3.9);
                    Interval::new(a.min(b), a.max(b) + 1e-3)
                }
            };
            ObstacleParams::Slit(VerticalSlit { x, span })
        })
        .collect();
    DomainSpec::new(format!("random-{seed}"), Strip::default(), &obstacles, &coarse_validation())
        .expect("generated slit specs are connected")
}
