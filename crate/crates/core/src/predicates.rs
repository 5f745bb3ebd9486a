//! Finite-resolution checks of Property (L), Property (J-P)_aff and
//! witness-based checks of Property (J-P) at a base point `a`.
//!
//! For each `k` the checkers either find a witness (a height `b`, an affine
//! function, a trig polynomial) whose membership in `D` is interval-verified,
//! or refute the whole search region by a finite cover whose every piece is
//! shown to force the candidate through the complement of `D`.
//!
//! Affine candidates `γ(t) = c t + d` are searched in normalized coordinates
//! `c = u / k²`, `d = a₂ + v / k`, where the feasibility region
//! `k|c| + |d - a₂| ≤ 1/k` becomes the fixed diamond `|u| + |v| ≤ 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{graph_in_domain, horizontal_segment_in, Containment, DomainSpec, Point2, QueryLimits};
use crate::interval::Interval;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PredicateError {
    #[error("base point ({x1}, {x2}) is not in D")]
    BaseOutside { x1: f64, x2: f64 },
    #[error("K must be at least 1")]
    ZeroK,
    #[error("invalid tolerance schedule: {0}")]
    Schedule(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PropertyKind {
    L,
    JPaff,
    JPwitness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    HoldsUpToK,
    FailsUpToK,
    Inconclusive,
}

/// Admissible distance `|b_k - a₂|` in the Property (L) search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "schedule", rename_all = "snake_case")]
pub enum ToleranceSchedule {
    /// `1 / k`
    #[default]
    Reciprocal,
    /// `scale · k^(-exponent)`
    PowerLaw { scale: f64, exponent: f64 },
}

impl ToleranceSchedule {
    pub fn validate(&self) -> Result<(), PredicateError> {
        match *self {
            ToleranceSchedule::Reciprocal => Ok(()),
            ToleranceSchedule::PowerLaw { scale, exponent } => {
                if scale > 0.0 && scale.is_finite() && exponent.is_finite() && exponent >= 0.0 {
                    Ok(())
                } else {
                    Err(PredicateError::Schedule(format!("scale {scale}, exponent {exponent}")))
                }
            }
        }
    }

    /// Enclosure of the tolerance at `k`.
    pub fn tol(&self, k: u32) -> Interval {
        match *self {
            ToleranceSchedule::Reciprocal => Interval::ratio(1.0, k as f64),
            ToleranceSchedule::PowerLaw { scale, exponent } => {
                let v = scale * (k as f64).powf(-exponent);
                // powf is not correctly rounded; a few ulps cover it
                Interval::new(v.next_down().next_down(), v.next_up().next_up())
            }
        }
    }
}

/// Budgets shared by the searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchLimits {
    /// Bisection depth for height ranges and affine cells.
    pub depth: u32,
    /// Maximum number of affine cells examined per `k`.
    pub cell_budget: usize,
    /// Candidate evaluations per `k` in the trig-polynomial search.
    pub jp_budget: u64,
    pub jp_degree: u32,
    pub seed: u64,
    pub graph: QueryLimits,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            depth: 30,
            cell_budget: 1 << 16,
            jp_budget: 100_000,
            jp_degree: 1,
            seed: 0x5eed,
            graph: QueryLimits::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineWitness {
    pub c: f64,
    pub d: f64,
    pub k: u32,
}

impl AffineWitness {
    pub fn enclose(&self, t: Interval) -> Interval {
        Interval::point(self.c) * t + self.d
    }

    /// Interval check of `k|c| + |d - a₂| ≤ 1/k`, evaluated as `(k|c| + |d - a₂|)·k ≤ 1`.
    pub fn in_diamond(&self, a2: f64) -> bool {
        let k = self.k as f64;
        let lhs = (Interval::point(self.c).abs() * k + (Interval::point(self.d) - a2).abs()) * k;
        lhs.hi <= 1.0
    }
}

/// `γ(t) = center + (1/k) Σ_j (sin_j · sin(j t) + cos_j · cos(j t))`, `j = 0, 1, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum AnalyticShape {
    TrigPolynomial { sin: Vec<f64>, cos: Vec<f64> },
    Affine { c: f64, d: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticWitness {
    pub k: u32,
    pub center: f64,
    pub shape: AnalyticShape,
}

impl AnalyticWitness {
    /// `sin(t)/k + center`.
    pub fn scaled_sine(k: u32, center: f64) -> Self {
        AnalyticWitness { k, center, shape: AnalyticShape::TrigPolynomial { sin: vec![0.0, 1.0], cos: vec![0.0, 0.0] } }
    }

    pub fn constant(k: u32, center: f64) -> Self {
        AnalyticWitness { k, center, shape: AnalyticShape::TrigPolynomial { sin: vec![0.0], cos: vec![0.0] } }
    }

    pub fn enclose(&self, t: Interval) -> Interval {
        match &self.shape {
            AnalyticShape::TrigPolynomial { sin, cos } => {
                let mut acc = Interval::ZERO;
                for (j, (&s, &c)) in sin.iter().zip(cos).enumerate() {
                    if j == 0 {
                        acc = acc + Interval::point(c);
                        continue;
                    }
                    let jt = t * (j as f64);
                    if s != 0.0 {
                        acc = acc + jt.sin() * s;
                    }
                    if c != 0.0 {
                        acc = acc + jt.cos() * c;
                    }
                }
                acc / (self.k as f64) + self.center
            }
            AnalyticShape::Affine { c, d } => Interval::point(*c) * t + *d,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.enclose(Interval::point(t)).mid()
    }

    /// Upper bound for `‖(sin, cos)‖₁`, ignoring `sin_0`.
    fn l1_norm_upper(&self) -> Option<f64> {
        match &self.shape {
            AnalyticShape::TrigPolynomial { sin, cos } => {
                let mut acc = Interval::ZERO;
                for (j, (s, c)) in sin.iter().zip(cos).enumerate() {
                    if j > 0 {
                        acc = acc + Interval::point(s.abs());
                    }
                    acc = acc + Interval::point(c.abs());
                }
                Some(acc.hi)
            }
            AnalyticShape::Affine { .. } => None,
        }
    }

    fn well_formed(&self) -> bool {
        match &self.shape {
            AnalyticShape::TrigPolynomial { sin, cos } => {
                !sin.is_empty() && sin.len() == cos.len() && sin.iter().chain(cos).all(|x| x.is_finite())
            }
            AnalyticShape::Affine { c, d } => c.is_finite() && d.is_finite(),
        }
    }
}

/// Heights `values` at `abscissa` all lie in the closed set `excluded`,
/// which is part of the complement of `D` on that vertical line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub abscissa: f64,
    pub values: Interval,
    pub excluded: Interval,
}

impl Exclusion {
    fn find(domain: &DomainSpec, probes: &[f64], values: impl Fn(f64) -> Interval) -> Option<Exclusion> {
        probes.iter().find_map(|&t| {
            let v = values(t);
            domain
                .complement_column(t)
                .into_iter()
                .find(|c| c.contains_interval(&v))
                .map(|excluded| Exclusion { abscissa: t, values: v, excluded })
        })
    }

    /// The exclusion still holds for `domain` with values recomputed as `values`.
    fn recheck(&self, domain: &DomainSpec, values: Interval) -> bool {
        self.values.contains_interval(&values)
            && self.excluded.contains_interval(&self.values)
            && domain.complement_column(self.abscissa).iter().any(|c| c.contains_interval(&self.excluded))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightPiece {
    pub b: Interval,
    pub exclusion: Exclusion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefutedCell {
    pub u: Interval,
    pub v: Interval,
    /// Area of the cell clipped to the diamond.
    pub area: f64,
    pub exclusion: Exclusion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "cover", rename_all = "snake_case")]
pub enum Refutation {
    /// Every `b` in `range` puts `[-k, k] × {b}` through the complement.
    Heights { range: Interval, pieces: Vec<HeightPiece>, measure: f64 },
    /// Every `(u, v)` in the diamond puts the affine graph through the complement.
    Cells { cells: Vec<RefutedCell>, measure: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    Segment { b: f64 },
    Affine(AffineWitness),
    Analytic(AnalyticWitness),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    WitnessFound { witness: Witness },
    RefutedAtResolution { refutation: Refutation },
    Unknown { reason: String },
}

impl Outcome {
    pub fn is_witness(&self) -> bool {
        matches!(self, Outcome::WitnessFound { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Outcome::RefutedAtResolution { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KRecord {
    pub k: u32,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub kind: PropertyKind,
    pub base_point: Point2,
    pub max_k: u32,
    pub per_k: Vec<KRecord>,
    pub verdict: Verdict,
    pub note: String,
}

impl PropertyReport {
    pub fn witness_ks(&self) -> Vec<u32> {
        self.per_k.iter().filter(|r| r.outcome.is_witness()).map(|r| r.k).collect()
    }

    pub fn refuted_ks(&self) -> Vec<u32> {
        self.per_k.iter().filter(|r| r.outcome.is_refuted()).map(|r| r.k).collect()
    }

    pub fn record(&self, k: u32) -> Option<&KRecord> {
        self.per_k.iter().find(|r| r.k == k)
    }
}

/// `FailsUpToK` when every `k` has a witness; `HoldsUpToK` when nothing is
/// unknown and the records end in a nonempty refuted tail; otherwise
/// `Inconclusive`.
pub fn verdict_of(per_k: &[KRecord]) -> Verdict {
    if per_k.is_empty() {
        return Verdict::Inconclusive;
    }
    if per_k.iter().all(|r| r.outcome.is_witness()) {
        return Verdict::FailsUpToK;
    }
    let any_unknown = per_k.iter().any(|r| matches!(r.outcome, Outcome::Unknown { .. }));
    let tail_start = per_k.iter().rposition(|r| !r.outcome.is_refuted()).map_or(0, |i| i + 1);
    if !any_unknown && tail_start < per_k.len() {
        Verdict::HoldsUpToK
    } else {
        Verdict::Inconclusive
    }
}

fn require_base(domain: &DomainSpec, a: Point2, max_k: u32) -> Result<(), PredicateError> {
    if max_k == 0 {
        return Err(PredicateError::ZeroK);
    }
    if !domain.contains(a) {
        return Err(PredicateError::BaseOutside { x1: a.x1, x2: a.x2 });
    }
    Ok(())
}

/// Abscissae where exclusions are attempted: tallest obstacle columns in
/// `[-k, k]` and the two endpoints.
fn probe_abscissae(domain: &DomainSpec, k: f64) -> Vec<f64> {
    let mut probes = domain.probes_in(Interval::new(-k, k));
    probes.extend([-k, k]);
    probes
}

// ---------------------------------------------------------------- Property (L)

fn segment_witness_ok(domain: &DomainSpec, a2: f64, k: u32, tol: Interval, b: f64) -> bool {
    (Interval::point(b) - a2).abs().hi <= tol.lo && horizontal_segment_in(domain, b, k as f64)
}

/// Bisection of `[a₂ - tol, a₂ + tol]` (split first at `a₂`) into pieces
/// that are excluded at some probe abscissa, until a feasible height turns up.
fn search_heights(domain: &DomainSpec, a2: f64, k: u32, tol: Interval, depth: u32) -> Outcome {
    let kf = k as f64;
    if segment_witness_ok(domain, a2, k, tol, a2) {
        return Outcome::WitnessFound { witness: Witness::Segment { b: a2 } };
    }
    let center = Interval::point(a2);
    let range = Interval::new((center - tol.hi).lo, (center + tol.hi).hi);
    let probes = probe_abscissae(domain, kf);
    let mut queue = std::collections::VecDeque::from([(Interval::new(range.lo, a2), 1u32), (Interval::new(a2, range.hi), 1u32)]);
    let mut pieces = Vec::new();
    let mut exhausted = false;
    while let Some((b, d)) = queue.pop_front() {
        if let Some(exclusion) = Exclusion::find(domain, &probes, |_| b) {
            pieces.push(HeightPiece { b, exclusion });
            continue;
        }
        let m = b.mid();
        if segment_witness_ok(domain, a2, k, tol, m) {
            return Outcome::WitnessFound { witness: Witness::Segment { b: m } };
        }
        if d >= depth || b.is_point() {
            exhausted = true;
            continue;
        }
        let (l, r) = b.split();
        queue.push_back((l, d + 1));
        queue.push_back((r, d + 1));
    }
    if exhausted {
        return Outcome::Unknown { reason: format!("height bisection reached depth {depth}") };
    }
    pieces.sort_by(|p, q| p.b.lo.total_cmp(&q.b.lo));
    let measure = pieces.iter().map(|p| p.b.width()).sum();
    Outcome::RefutedAtResolution { refutation: Refutation::Heights { range, pieces, measure } }
}

pub fn check_property_l(
    domain: &DomainSpec,
    a: Point2,
    max_k: u32,
    schedule: ToleranceSchedule,
    limits: &SearchLimits,
) -> Result<PropertyReport, PredicateError> {
    require_base(domain, a, max_k)?;
    schedule.validate()?;
    let per_k: Vec<KRecord> = (1..=max_k)
        .into_par_iter()
        .map(|k| KRecord { k, outcome: search_heights(domain, a.x2, k, schedule.tol(k), limits.depth) })
        .collect();
    let verdict = verdict_of(&per_k);
    Ok(PropertyReport {
        kind: PropertyKind::L,
        base_point: a,
        max_k,
        per_k,
        verdict,
        note: format!("heights b with |b - a2| <= tol(k), tolerance schedule {schedule:?}"),
    })
}

// ------------------------------------------------------ Property (J-P)_aff

/// Sutherland–Hodgman clip of a convex polygon by `n·p ≤ 1`.
fn clip_half_plane(poly: &[(f64, f64)], n: (f64, f64)) -> Vec<(f64, f64)> {
    let inside = |p: (f64, f64)| n.0 * p.0 + n.1 * p.1 <= 1.0;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let cur = poly[i];
        let next = poly[(i + 1) % poly.len()];
        let (ci, ni) = (inside(cur), inside(next));
        if ci {
            out.push(cur);
        }
        if ci != ni {
            let fc = n.0 * cur.0 + n.1 * cur.1 - 1.0;
            let fn_ = n.0 * next.0 + n.1 * next.1 - 1.0;
            let s = fc / (fc - fn_);
            out.push((cur.0 + s * (next.0 - cur.0), cur.1 + s * (next.1 - cur.1)));
        }
    }
    out
}

/// The square `u × v` clipped to `|u| + |v| ≤ 1`.
pub fn clip_to_diamond(u: Interval, v: Interval) -> Vec<(f64, f64)> {
    let mut poly = vec![(u.lo, v.lo), (u.hi, v.lo), (u.hi, v.hi), (u.lo, v.hi)];
    for n in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        poly = clip_half_plane(&poly, n);
        if poly.is_empty() {
            break;
        }
    }
    poly
}

pub fn polygon_area(poly: &[(f64, f64)]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let twice: f64 = (0..n)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            p.0 * q.1 - q.0 * p.1
        })
        .sum();
    0.5 * twice.abs()
}

fn polygon_centroid(poly: &[(f64, f64)]) -> (f64, f64) {
    let n = poly.len() as f64;
    let (su, sv) = poly.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    (su / n, sv / n)
}

/// Values `c t + d` over the normalized cell, `c = u/k²`, `d = a₂ + v/k`.
fn cell_values(u: Interval, v: Interval, k: u32, a2: f64, t: f64) -> Interval {
    let kf = k as f64;
    u * Interval::ratio(t, kf * kf) + v * Interval::ratio(1.0, kf) + a2
}

fn affine_from_normalized(u: f64, v: f64, k: u32, a2: f64) -> AffineWitness {
    let kf = k as f64;
    AffineWitness { c: u / (kf * kf), d: a2 + v / kf, k }
}

fn affine_witness_ok(domain: &DomainSpec, a2: f64, w: &AffineWitness, limits: &QueryLimits) -> bool {
    let kf = w.k as f64;
    w.in_diamond(a2)
        && graph_in_domain(domain, &|t: Interval| w.enclose(t), Interval::new(-kf, kf), limits).is_inside()
}

fn search_affine(domain: &DomainSpec, a2: f64, k: u32, limits: &SearchLimits) -> Outcome {
    // constant functions are affine: lift any horizontal segment
    if let Outcome::WitnessFound { witness: Witness::Segment { b } } =
        search_heights(domain, a2, k, ToleranceSchedule::Reciprocal.tol(k), limits.depth)
    {
        let w = AffineWitness { c: 0.0, d: b, k };
        if w.in_diamond(a2) {
            return Outcome::WitnessFound { witness: Witness::Affine(w) };
        }
    }
    let probes = probe_abscissae(domain, k as f64);
    let half = [Interval::new(-1.0, 0.0), Interval::new(0.0, 1.0)];
    let mut queue: std::collections::VecDeque<(Interval, Interval, u32)> =
        half.iter().flat_map(|&u| half.iter().map(move |&v| (u, v, 1u32))).collect();
    let mut cells = Vec::new();
    let mut examined = 0usize;
    let mut exhausted = None;
    while let Some((u, v, d)) = queue.pop_front() {
        let poly = clip_to_diamond(u, v);
        let area = polygon_area(&poly);
        if area == 0.0 {
            continue;
        }
        examined += 1;
        if examined > limits.cell_budget {
            exhausted = Some(format!("cell budget {} exhausted", limits.cell_budget));
            break;
        }
        if let Some(exclusion) = Exclusion::find(domain, &probes, |t| cell_values(u, v, k, a2, t)) {
            cells.push(RefutedCell { u, v, area, exclusion });
            continue;
        }
        let (cu, cv) = polygon_centroid(&poly);
        let w = affine_from_normalized(cu, cv, k, a2);
        if affine_witness_ok(domain, a2, &w, &limits.graph) {
            return Outcome::WitnessFound { witness: Witness::Affine(w) };
        }
        if d >= limits.depth {
            exhausted = Some(format!("cell depth {} reached", limits.depth));
            continue;
        }
        let (u0, u1) = u.split();
        let (v0, v1) = v.split();
        for (uu, vv) in [(u0, v0), (u1, v0), (u0, v1), (u1, v1)] {
            queue.push_back((uu, vv, d + 1));
        }
    }
    if let Some(reason) = exhausted {
        return Outcome::Unknown { reason };
    }
    let measure = cells.iter().map(|c| c.area).sum();
    Outcome::RefutedAtResolution { refutation: Refutation::Cells { cells, measure } }
}

pub fn check_property_jpaff(
    domain: &DomainSpec,
    a: Point2,
    max_k: u32,
    limits: &SearchLimits,
) -> Result<PropertyReport, PredicateError> {
    require_base(domain, a, max_k)?;
    let per_k: Vec<KRecord> = (1..=max_k)
        .into_par_iter()
        .map(|k| KRecord { k, outcome: search_affine(domain, a.x2, k, limits) })
        .collect();
    let verdict = verdict_of(&per_k);
    Ok(PropertyReport {
        kind: PropertyKind::JPaff,
        base_point: a,
        max_k,
        per_k,
        verdict,
        note: "affine c t + d over the diamond k|c| + |d - a2| <= 1/k, normalized as c = u/k^2, d = a2 + v/k".into(),
    })
}

// --------------------------------------------------------- Property (J-P)

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum JpCheck {
    Verified,
    /// The candidate provably fails; `point`, when present, is a graph point outside `D`.
    Rejected { reason: String, point: Option<Point2> },
    /// Neither verified nor rejected within the subdivision budget.
    Unverified { reason: String },
}

impl JpCheck {
    pub fn is_verified(&self) -> bool {
        matches!(self, JpCheck::Verified)
    }
}

/// Interval proof of `sup_{[-k,k]} |γ - a₂| ≤ 1/k` by bisection.
fn deviation_within(w: &AnalyticWitness, a2: f64, depth: u32) -> Option<bool> {
    let kf = w.k as f64;
    let bound = Interval::ratio(1.0, kf);
    let mut stack = vec![(Interval::new(-kf, kf), 0u32)];
    let mut unknown = false;
    while let Some((piece, d)) = stack.pop() {
        let dev = (w.enclose(piece) - a2).abs();
        if dev.hi <= bound.lo {
            continue;
        }
        let probe = (w.enclose(Interval::point(piece.mid())) - a2).abs();
        if probe.lo > bound.hi {
            return Some(false);
        }
        if d >= depth {
            unknown = true;
            continue;
        }
        let (l, r) = piece.split();
        stack.push((l, d + 1));
        stack.push((r, d + 1));
    }
    if unknown {
        None
    } else {
        Some(true)
    }
}

pub fn verify_jp_witness(domain: &DomainSpec, a: Point2, w: &AnalyticWitness, limits: &QueryLimits) -> JpCheck {
    if w.k == 0 || !w.well_formed() {
        return JpCheck::Rejected { reason: "malformed witness".into(), point: None };
    }
    if w.center != a.x2 {
        return JpCheck::Rejected { reason: format!("witness centred at {} instead of a2 = {}", w.center, a.x2), point: None };
    }
    let deviation_ok = match &w.shape {
        AnalyticShape::Affine { c, d } => Some(AffineWitness { c: *c, d: *d, k: w.k }.in_diamond(a.x2)),
        AnalyticShape::TrigPolynomial { .. } if w.l1_norm_upper().is_some_and(|n| n <= 1.0) => Some(true),
        AnalyticShape::TrigPolynomial { .. } => deviation_within(w, a.x2, limits.max_depth.min(30)),
    };
    match deviation_ok {
        Some(true) => {}
        Some(false) => return JpCheck::Rejected { reason: "sup |gamma - a2| exceeds 1/k".into(), point: None },
        None => return JpCheck::Unverified { reason: "deviation bound undecided".into() },
    }
    let kf = w.k as f64;
    match graph_in_domain(domain, &|t: Interval| w.enclose(t), Interval::new(-kf, kf), limits) {
        Containment::Inside => JpCheck::Verified,
        Containment::NotInside { witness } => {
            JpCheck::Rejected { reason: "graph meets the complement of D".into(), point: Some(witness) }
        }
        Containment::Unknown => JpCheck::Unverified { reason: "graph containment undecided".into() },
    }
}

/// Candidate coefficient vectors in the unit ℓ1 ball, in search order.
/// Coordinates are `(sin_1, cos_1, ..., sin_d, cos_d, cos_0)`.
struct Candidates {
    dim: usize,
    fixed: Vec<Vec<f64>>,
    next: usize,
    rng: ChaCha8Rng,
}

impl Candidates {
    fn new(degree: u32, seed: u64) -> Self {
        let dim = 2 * degree as usize + 1;
        let unit = |i: usize, s: f64| {
            let mut e = vec![0.0; dim];
            e[i] = s;
            e
        };
        let mut fixed = Vec::new();
        if dim > 1 {
            fixed.push(unit(0, 1.0));
        }
        fixed.push(vec![0.0; dim]);
        for i in 0..dim {
            for s in [1.0, -1.0] {
                let e = unit(i, s);
                if !fixed.contains(&e) {
                    fixed.push(e);
                }
            }
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    let mut e = vec![0.0; dim];
                    e[i] = 0.5 * si;
                    e[j] = 0.5 * sj;
                    fixed.push(e);
                }
            }
        }
        Candidates { dim, fixed, next: 0, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn next(&mut self) -> Vec<f64> {
        let i = self.next;
        self.next += 1;
        if let Some(e) = self.fixed.get(i) {
            return e.clone();
        }
        let raw: Vec<f64> = (0..self.dim).map(|_| self.rng.random_range(-1.0..1.0)).collect();
        let norm: f64 = raw.iter().map(|x: &f64| x.abs()).sum();
        let radius: f64 = self.rng.random_range(0.0..1.0);
        // shrink slightly so rounding never pushes the ℓ1 norm past 1
        let scale = if norm > 0.0 { radius * (1.0 - 1e-12) / norm } else { 0.0 };
        raw.into_iter().map(|x| x * scale).collect()
    }
}

fn witness_from_coords(k: u32, center: f64, coords: &[f64]) -> AnalyticWitness {
    let degree = (coords.len() - 1) / 2;
    let mut sin = vec![0.0; degree + 1];
    let mut cos = vec![0.0; degree + 1];
    for j in 1..=degree {
        sin[j] = coords[2 * (j - 1)];
        cos[j] = coords[2 * (j - 1) + 1];
    }
    cos[0] = coords[coords.len() - 1];
    AnalyticWitness { k, center, shape: AnalyticShape::TrigPolynomial { sin, cos } }
}

/// Best-effort search over trig polynomials of the given degree whose
/// coefficient vector has ℓ1 norm at most `1/k`. `None` is not a refutation.
pub fn search_jp_analytic(
    domain: &DomainSpec,
    a: Point2,
    k: u32,
    degree: u32,
    budget: u64,
    seed: u64,
    limits: &QueryLimits,
) -> Option<AnalyticWitness> {
    if k == 0 {
        return None;
    }
    let mut candidates = Candidates::new(degree, seed ^ k as u64);
    for _ in 0..budget {
        let w = witness_from_coords(k, a.x2, &candidates.next());
        if verify_jp_witness(domain, a, &w, limits).is_verified() {
            return Some(w);
        }
    }
    None
}

/// Per-`k` witness search for Property (J-P). The verdict is never
/// `HoldsUpToK`: a missing witness is only a failed search.
pub fn check_property_jp(
    domain: &DomainSpec,
    a: Point2,
    max_k: u32,
    limits: &SearchLimits,
) -> Result<PropertyReport, PredicateError> {
    require_base(domain, a, max_k)?;
    let per_k: Vec<KRecord> = (1..=max_k)
        .into_par_iter()
        .map(|k| {
            let found = search_jp_analytic(domain, a, k, limits.jp_degree, limits.jp_budget, limits.seed, &limits.graph);
            let outcome = match found {
                Some(w) => Outcome::WitnessFound { witness: Witness::Analytic(w) },
                None => Outcome::Unknown {
                    reason: format!("no trig polynomial of degree <= {} found in {} evaluations", limits.jp_degree, limits.jp_budget),
                },
            };
            KRecord { k, outcome }
        })
        .collect();
    let verdict = verdict_of(&per_k);
    Ok(PropertyReport {
        kind: PropertyKind::JPwitness,
        base_point: a,
        max_k,
        per_k,
        verdict,
        note: "witness verification and bounded trig-polynomial search only; Property (J-P) over all real-analytic functions is not finitely decidable".into(),
    })
}

// ------------------------------------------------------------ re-validation

/// Re-checks every payload of a report against `domain` without searching.
pub fn reverify_report(domain: &DomainSpec, report: &PropertyReport, schedule: ToleranceSchedule, limits: &QueryLimits) -> Result<(), String> {
    let a = report.base_point;
    let a2 = a.x2;
    if !domain.contains(a) {
        return Err("base point not in D".into());
    }
    let ks: Vec<u32> = report.per_k.iter().map(|r| r.k).collect();
    if ks != (1..=report.max_k).collect::<Vec<_>>() {
        return Err(format!("{:?} report: records do not cover k = 1..={}", report.kind, report.max_k));
    }
    if verdict_of(&report.per_k) != report.verdict {
        return Err(format!("{:?} report: verdict does not follow from records", report.kind));
    }
    for r in &report.per_k {
        let k = r.k;
        let kf = k as f64;
        let fail = |what: &str| Err(format!("{:?} report, k = {k}: {what}", report.kind));
        match (&report.kind, &r.outcome) {
            (_, Outcome::Unknown { .. }) => {}
            (PropertyKind::L, Outcome::WitnessFound { witness: Witness::Segment { b } }) => {
                if !segment_witness_ok(domain, a2, k, schedule.tol(k), *b) {
                    return fail("segment witness does not re-verify");
                }
            }
            (PropertyKind::JPaff, Outcome::WitnessFound { witness: Witness::Affine(w) }) => {
                if w.k != k || !affine_witness_ok(domain, a2, w, limits) {
                    return fail("affine witness does not re-verify");
                }
            }
            (PropertyKind::JPwitness, Outcome::WitnessFound { witness: Witness::Analytic(w) }) => {
                if w.k != k || !verify_jp_witness(domain, a, w, limits).is_verified() {
                    return fail("analytic witness does not re-verify");
                }
            }
            (PropertyKind::L, Outcome::RefutedAtResolution { refutation: Refutation::Heights { range, pieces, measure } }) => {
                let tol = schedule.tol(k);
                let center = Interval::point(a2);
                if range.lo > (center - tol.hi).lo || range.hi < (center + tol.hi).hi {
                    return fail("refuted range too small");
                }
                let mut reach = range.lo;
                for p in pieces {
                    if p.b.lo > reach || p.exclusion.abscissa.abs() > kf || !p.exclusion.recheck(domain, p.b) {
                        return fail("height piece does not re-verify");
                    }
                    reach = reach.max(p.b.hi);
                }
                let total: f64 = pieces.iter().map(|p| p.b.width()).sum();
                if reach < range.hi || (total - range.width()).abs() > 1e-12 || (total - measure).abs() > 1e-12 {
                    return fail("height cover incomplete");
                }
            }
            (PropertyKind::JPaff, Outcome::RefutedAtResolution { refutation: Refutation::Cells { cells, measure } }) => {
                for c in cells {
                    let values = cell_values(c.u, c.v, k, a2, c.exclusion.abscissa);
                    let area = polygon_area(&clip_to_diamond(c.u, c.v));
                    if c.exclusion.abscissa.abs() > kf || !c.exclusion.recheck(domain, values) || area != c.area {
                        return fail("refuted cell does not re-verify");
                    }
                }
                let total: f64 = cells.iter().map(|c| c.area).sum();
                if (total - 2.0).abs() > 1e-12 || (total - measure).abs() > 1e-12 || !cells_tile(cells) {
                    return fail("cell cover does not fill the diamond");
                }
            }
            _ => return fail("payload does not match the property"),
        }
    }
    Ok(())
}

/// Refuted cells come from a quadtree on `[-1, 1]²`: distinct cells may only
/// share boundary, so area adding up to the diamond's means they cover it.
fn cells_tile(cells: &[RefutedCell]) -> bool {
    let dyadic = |x: Interval| {
        let w = x.width();
        w > 0.0 && w <= 1.0 && (w.log2().fract() == 0.0) && ((x.lo / w).fract() == 0.0)
    };
    cells.iter().all(|c| dyadic(c.u) && dyadic(c.v) && c.u.width() == c.v.width())
        && cells.iter().enumerate().all(|(i, a)| {
            cells[i + 1..].iter().all(|b| {
                let overlap_u = a.u.lo.max(b.u.lo) < a.u.hi.min(b.u.hi);
                let overlap_v = a.v.lo.max(b.v.lo) < a.v.hi.min(b.v.hi);
                !(overlap_u && overlap_v)
            })
        })
}

/// Contrapositive of `(J-P) ⇒ (J-P)_aff ⇒ (L)` on finite reports: a segment
/// witness at `k` lifts to a constant affine witness at `k`.
pub fn check_implications(l: &PropertyReport, jpaff: &PropertyReport) -> Result<(), String> {
    if l.base_point != jpaff.base_point || l.max_k != jpaff.max_k {
        return Err("reports differ in base point or K".into());
    }
    for r in &l.per_k {
        if r.outcome.is_witness() && !jpaff.record(r.k).is_some_and(|j| j.outcome.is_witness()) {
            return Err(format!("L has a witness at k = {} but (J-P)_aff does not", r.k));
        }
    }
    if l.verdict == Verdict::FailsUpToK && jpaff.verdict != Verdict::FailsUpToK {
        return Err("L fails up to K but (J-P)_aff does not".into());
    }
    Ok(())
}
