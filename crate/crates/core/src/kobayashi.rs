//! Two-sided bounds for the infinitesimal Kobayashi metric of `T_D` and
//! non-hyperbolicity certificates built from the `f_n` / `g_n` families.
//!
//! Upper bounds come from explicit analytic discs `h : Δ → T_D` with
//! `h(0) = p`, `h'(0) = r v`, giving `κ(p; v) ≤ 1/r`. Lower bounds come from
//! the projection `(z₁, z₂) ↦ z₂`, which maps `T_D` into the vertical strip
//! over `(y_lo, y_hi)` and cannot increase the metric. Tubes are invariant
//! under imaginary translations, so only the base point of `p` matters.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{box_containment_refined, Box2, DomainSpec, Point2, QueryLimits};
use crate::interval::Interval;
use crate::predicates::{
    check_implications, check_property_jp, check_property_jpaff, check_property_l, AnalyticShape, AnalyticWitness,
    Outcome, PredicateError, PropertyReport, SearchLimits, ToleranceSchedule, Verdict, Witness,
};
use crate::witness_maps::{ContainmentCertificate, MapError, WitnessFamily, DEFAULT_MAX_N};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("point {z} is not in the unit disc")]
    OutsideDisc { z: Complex64 },
    #[error("Re w = {re} outside the strip (0, {h})")]
    OutsideStrip { re: f64, h: f64 },
    #[error("strip width must be positive and finite (got {h})")]
    BadWidth { h: f64 },
    #[error("tangent vector must be nonzero")]
    ZeroVector,
    #[error("base point ({x1}, {x2}) is not in D")]
    BaseOutside { x1: f64, x2: f64 },
    #[error("disc is constant (r = 0)")]
    ConstantDisc,
    #[error("disc centre does not match the sample point")]
    CentreMismatch,
    #[error("disc derivative is not a positive multiple of v")]
    NotParallel,
    #[error("disc image not verified inside T_D")]
    Unverified,
    #[error("the map family is centred at (0, {mid}), not at ({x1}, {x2})")]
    FamilyBase { x1: f64, x2: f64, mid: f64 },
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Predicate(#[from] PredicateError),
}

/// Poincaré density of the unit disc, `|v| / (1 - |z|²)`.
pub fn disc_metric(z: Complex64, v: Complex64) -> Result<f64, MetricError> {
    let r2 = z.norm_sqr();
    if r2.is_nan() || r2 >= 1.0 {
        return Err(MetricError::OutsideDisc { z });
    }
    Ok(v.norm() / (1.0 - r2))
}

fn check_strip(h: f64, w: Complex64) -> Result<(), MetricError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(MetricError::BadWidth { h });
    }
    if !(w.re > 0.0 && w.re < h) {
        return Err(MetricError::OutsideStrip { re: w.re, h });
    }
    Ok(())
}

/// Metric of the strip `{0 < Re w < h}`: `π|v| / (2h sin(π Re w / h))`.
pub fn strip_metric(h: f64, w: Complex64, v: Complex64) -> Result<f64, MetricError> {
    check_strip(h, w)?;
    Ok(PI * v.norm() / (2.0 * h * (PI * w.re / h).sin()))
}

/// The same metric pulled back from the disc through
/// `w ↦ ξ = e^{iπw/h}` (onto the upper half-plane) and `ξ ↦ (ξ - i)/(ξ + i)`.
pub fn strip_metric_pullback(h: f64, w: Complex64, v: Complex64) -> Result<f64, MetricError> {
    check_strip(h, w)?;
    let i = Complex64::i();
    // shift Im w to 0: the strip metric is invariant under vertical translation
    let w = Complex64::new(w.re, 0.0);
    let xi = (i * PI * w / h).exp();
    let phi = (xi - i) / (xi + i);
    let dphi = 2.0 * i / ((xi + i) * (xi + i)) * (i * PI / h) * xi;
    disc_metric(phi, dphi * v)
}

/// A point `base + i·imag` of `T_D` with a tangent vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentSample {
    pub base: Point2,
    pub imag: [f64; 2],
    pub v: [Complex64; 2],
}

impl TangentSample {
    pub fn at(base: Point2, v: [Complex64; 2]) -> Self {
        TangentSample { base, imag: [0.0, 0.0], v }
    }

    fn v_norm(&self) -> f64 {
        self.v[0].norm().hypot(self.v[1].norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    Upper,
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricBound {
    pub kind: BoundKind,
    pub value: f64,
    pub provenance: String,
}

/// Lower bound through the projection onto the second coordinate.
pub fn tube_lower_bound(domain: &DomainSpec, s: &TangentSample) -> Result<MetricBound, MetricError> {
    if !domain.contains(s.base) {
        return Err(MetricError::BaseOutside { x1: s.base.x1, x2: s.base.x2 });
    }
    let h = domain.strip.y_hi - domain.strip.y_lo;
    let w = Complex64::new(s.base.x2 - domain.strip.y_lo, s.imag[1]);
    let value = if s.v[1] == Complex64::new(0.0, 0.0) { 0.0 } else { strip_metric(h, w, s.v[1])? };
    Ok(MetricBound { kind: BoundKind::Lower, value, provenance: format!("projection z -> z2 onto strip of width {h}") })
}

/// Closed-form analytic discs with interval-verifiable images.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "disc", rename_all = "snake_case")]
pub enum AnalyticDisc {
    /// `g_n` restricted to the unit disc, centred at `(0, mid)`.
    Family { n: u32 },
    /// `z ↦ centre + z·w`; only the real part of `centre` matters.
    Affine { center: [Complex64; 2], w: [Complex64; 2] },
}

impl AnalyticDisc {
    fn centre_and_derivative(&self, mid: f64) -> Result<(Point2, [Complex64; 2]), MetricError> {
        match *self {
            AnalyticDisc::Family { n } => {
                let fam = WitnessFamily::new(n, mid)?;
                let (d1, d2) = fam.g_derivative(Complex64::new(0.0, 0.0));
                Ok((fam.base(), [d1, d2]))
            }
            AnalyticDisc::Affine { center, w } => Ok((Point2::new(center[0].re, center[1].re), w)),
        }
    }

    fn provenance(&self) -> String {
        match self {
            AnalyticDisc::Family { n } => format!("g_{n}"),
            AnalyticDisc::Affine { w, .. } => format!("affine disc with w = ({}, {})", w[0], w[1]),
        }
    }
}

/// `r` with `d = r v`, `r > 0`, checked to relative accuracy `1e-10`.
fn parallel_factor(d: [Complex64; 2], v: [Complex64; 2]) -> Result<f64, MetricError> {
    let vv = v[0].norm_sqr() + v[1].norm_sqr();
    if vv == 0.0 {
        return Err(MetricError::ZeroVector);
    }
    let dn = d[0].norm().hypot(d[1].norm());
    if dn == 0.0 {
        return Err(MetricError::ConstantDisc);
    }
    let r = (d[0] * v[0].conj() + d[1] * v[1].conj()) / vv;
    let resid = (d[0] - r * v[0]).norm().hypot((d[1] - r * v[1]).norm());
    if r.re <= 0.0 || r.im.abs() > 1e-10 * r.re || resid > 1e-10 * dn {
        return Err(MetricError::NotParallel);
    }
    Ok(r.re)
}

/// Verified upper bound `1/r` from a disc through `s`.
pub fn upper_bound_from_disc(
    domain: &DomainSpec,
    disc: &AnalyticDisc,
    s: &TangentSample,
    limits: &QueryLimits,
) -> Result<MetricBound, MetricError> {
    let (centre, d) = disc.centre_and_derivative(domain.strip.mid)?;
    if centre != s.base {
        return Err(MetricError::CentreMismatch);
    }
    let r = parallel_factor(d, s.v)?;
    let verified = match *disc {
        AnalyticDisc::Family { n } => WitnessFamily::new(n, domain.strip.mid)?.verify_containment(domain).is_contained(),
        AnalyticDisc::Affine { center, w } => {
            // hypot is faithful to an ulp, so step the radius up once
            let radius = |wj: Complex64| if wj.norm() == 0.0 { 0.0 } else { wj.norm().next_up() };
            let span = |c: f64, wj: Complex64| Interval::point(c) + Interval::new(-radius(wj), radius(wj));
            box_containment_refined(domain, &Box2::new(span(center[0].re, w[0]), span(center[1].re, w[1])), limits).is_inside()
        }
    };
    if !verified {
        return Err(MetricError::Unverified);
    }
    Ok(MetricBound { kind: BoundKind::Upper, value: Interval::ratio(1.0, r).hi, provenance: disc.provenance() })
}

/// The largest affine disc in direction `v` found by halving, or `None` if
/// none down to radius `1e-9` verifies.
pub fn affine_upper_bound(domain: &DomainSpec, s: &TangentSample, limits: &QueryLimits) -> Option<(AnalyticDisc, MetricBound)> {
    let vn = s.v_norm();
    if vn == 0.0 {
        return None;
    }
    let centre = [Complex64::new(s.base.x1, s.imag[0]), Complex64::new(s.base.x2, s.imag[1])];
    let mut rho = 0.5 * (domain.strip.y_hi - domain.strip.y_lo);
    while rho > 1e-9 {
        let scale = rho / vn;
        let disc = AnalyticDisc::Affine { center: centre, w: [s.v[0] * scale, s.v[1] * scale] };
        if let Ok(bound) = upper_bound_from_disc(domain, &disc, s, limits) {
            return Some((disc, bound));
        }
        rho *= 0.5;
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObstructionVerdict {
    NonHyperbolicityWitness,
    NoObstructionFound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionRow {
    pub n: u32,
    pub containment: ContainmentCertificate,
    pub op_norm_df: f64,
    pub frobenius_df: f64,
    /// `n·sqrt(1 + sech²n)`
    pub closed_form: f64,
    /// `1/|g_n'(0)|` when the disc is verified.
    pub kobayashi_upper: Option<f64>,
    /// Unit vector along `g_n'(0)`, which is real.
    pub direction: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionCertificate {
    pub domain: String,
    pub a: Point2,
    pub threshold_factor: f64,
    pub rows: Vec<ObstructionRow>,
    pub verdict: ObstructionVerdict,
    /// First `n` whose containment is not `Contained`.
    pub failing_n: Option<u32>,
    pub justification: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Growth required of the last op-norm relative to the first.
    pub threshold_factor: f64,
    pub max_n: u32,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { threshold_factor: 10.0, max_n: DEFAULT_MAX_N }
    }
}

fn scan_row(domain: &DomainSpec, n: u32, max_n: u32) -> Result<ObstructionRow, MetricError> {
    let mid = domain.strip.mid;
    let fam = WitnessFamily::with_cap(n, mid, max_n)?;
    let containment = fam.verify_containment(domain);
    let jac = fam.jac_f(Complex64::new(0.0, 0.0));
    let op_norm_df = jac.op_norm();
    let direction = [jac.a11 / op_norm_df, jac.a21 / op_norm_df];
    let kobayashi_upper = containment.is_contained().then(|| {
        let (d1, d2) = fam.g_derivative(Complex64::new(0.0, 0.0));
        Interval::ratio(1.0, d1.norm().hypot(d2.norm())).hi
    });
    Ok(ObstructionRow {
        n,
        containment,
        op_norm_df,
        frobenius_df: jac.frobenius(),
        closed_form: fam.derivative_norm_at_zero(),
        kobayashi_upper,
        direction,
    })
}

fn scan_verdict(rows: &[ObstructionRow], factor: f64) -> (ObstructionVerdict, Option<u32>) {
    let failing_n = rows.iter().find(|r| !r.containment.is_contained()).map(|r| r.n);
    let increasing = rows.windows(2).all(|w| w[1].op_norm_df > w[0].op_norm_df);
    let grows = match (rows.first(), rows.last()) {
        (Some(f), Some(l)) => l.op_norm_df >= factor * f.op_norm_df,
        _ => false,
    };
    let verdict = if failing_n.is_none() && increasing && grows {
        ObstructionVerdict::NonHyperbolicityWitness
    } else {
        ObstructionVerdict::NoObstructionFound
    };
    (verdict, failing_n)
}

const JUSTIFICATION: &str = "f_n(0) = a and |df_n(0)| = n*sqrt(1 + sech^2 n) -> infinity, with f_n(disc) in D for every listed n";

pub fn obstruction_scan(domain: &DomainSpec, a: Point2, max_n: u32, opts: &ScanOptions) -> Result<ObstructionCertificate, MetricError> {
    if !domain.contains(a) {
        return Err(MetricError::BaseOutside { x1: a.x1, x2: a.x2 });
    }
    let mid = domain.strip.mid;
    if a != Point2::new(0.0, mid) {
        return Err(MetricError::FamilyBase { x1: a.x1, x2: a.x2, mid });
    }
    WitnessFamily::with_cap(max_n, mid, opts.max_n)?;
    let rows: Vec<ObstructionRow> =
        (1..=max_n).into_par_iter().map(|n| scan_row(domain, n, opts.max_n)).collect::<Result<_, _>>()?;
    let (verdict, failing_n) = scan_verdict(&rows, opts.threshold_factor);
    Ok(ObstructionCertificate {
        domain: domain.name.clone(),
        a,
        threshold_factor: opts.threshold_factor,
        rows,
        verdict,
        failing_n,
        justification: JUSTIFICATION.into(),
    })
}

impl ObstructionCertificate {
    /// Recomputes every stored number from the rows and re-checks each
    /// containment record, without searching.
    pub fn revalidate(&self, domain: &DomainSpec, opts: &ScanOptions) -> Result<(), String> {
        let mid = domain.strip.mid;
        if self.a != Point2::new(0.0, mid) || !domain.contains(self.a) {
            return Err("base point does not match the family centre".into());
        }
        if self.domain != domain.name {
            return Err(format!("certificate is for domain {:?}, not {:?}", self.domain, domain.name));
        }
        for (i, row) in self.rows.iter().enumerate() {
            let n = row.n;
            if n as usize != i + 1 {
                return Err(format!("row {i} has n = {n}"));
            }
            let fam = WitnessFamily::with_cap(n, mid, opts.max_n).map_err(|e| e.to_string())?;
            if fam.eval_f(Complex64::new(0.0, 0.0)) != self.a {
                return Err(format!("n = {n}: f_n(0) != a"));
            }
            if row.containment.n != n {
                return Err(format!("n = {n}: containment certificate is for n = {}", row.containment.n));
            }
            row.containment.revalidate(domain)?;
            let fresh = scan_row_numbers(&fam, row.containment.is_contained());
            if fresh != (row.op_norm_df, row.frobenius_df, row.closed_form, row.kobayashi_upper, row.direction) {
                return Err(format!("n = {n}: stored derivative data does not recompute"));
            }
            if ((row.op_norm_df - row.closed_form) / row.closed_form).abs() > 1e-10 {
                return Err(format!("n = {n}: op-norm disagrees with the closed form"));
            }
        }
        let (verdict, failing_n) = scan_verdict(&self.rows, self.threshold_factor);
        if (verdict, failing_n) != (self.verdict, self.failing_n) {
            return Err("verdict does not follow from the rows".into());
        }
        if self.threshold_factor < 1.0 || !self.threshold_factor.is_finite() {
            return Err("threshold factor must be at least 1".into());
        }
        Ok(())
    }
}

fn scan_row_numbers(fam: &WitnessFamily, contained: bool) -> (f64, f64, f64, Option<f64>, [f64; 2]) {
    let jac = fam.jac_f(Complex64::new(0.0, 0.0));
    let op = jac.op_norm();
    let upper = contained.then(|| {
        let (d1, d2) = fam.g_derivative(Complex64::new(0.0, 0.0));
        Interval::ratio(1.0, d1.norm().hypot(d2.norm())).hi
    });
    (op, jac.frobenius(), fam.derivative_norm_at_zero(), upper, [jac.a11 / op, jac.a21 / op])
}

/// Lower and upper bounds at one tangent sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub sample: TangentSample,
    pub lower: MetricBound,
    /// Disc behind `upper`.
    pub disc: Option<AnalyticDisc>,
    pub upper: Option<MetricBound>,
}

impl MetricSample {
    pub fn consistent(&self) -> bool {
        self.upper.as_ref().is_none_or(|u| self.lower.value <= u.value + 1e-12)
    }
}

pub fn metric_sample(domain: &DomainSpec, s: TangentSample, disc: Option<AnalyticDisc>, limits: &QueryLimits) -> Result<MetricSample, MetricError> {
    let lower = tube_lower_bound(domain, &s)?;
    let (disc, upper) = match disc {
        Some(d) => (Some(d), Some(upper_bound_from_disc(domain, &d, &s, limits)?)),
        None => affine_upper_bound(domain, &s, limits).unzip(),
    };
    Ok(MetricSample { sample: s, lower, disc, upper })
}

impl MetricSample {
    /// Recomputes both bounds from the stored disc.
    pub fn revalidate(&self, domain: &DomainSpec, limits: &QueryLimits) -> Result<(), String> {
        let lower = tube_lower_bound(domain, &self.sample).map_err(|e| e.to_string())?;
        if lower != self.lower {
            return Err("lower bound does not recompute".into());
        }
        match (&self.disc, &self.upper) {
            (None, None) => Ok(()),
            (Some(d), Some(u)) => {
                let fresh = upper_bound_from_disc(domain, d, &self.sample, limits).map_err(|e| e.to_string())?;
                if &fresh != u {
                    return Err("upper bound does not recompute".into());
                }
                if !self.consistent() {
                    return Err("lower bound exceeds upper bound".into());
                }
                Ok(())
            }
            _ => Err("upper bound without its disc".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityConfig {
    pub max_k: u32,
    pub max_n: u32,
    pub schedule: ToleranceSchedule,
    pub limits: SearchLimits,
    pub scan: ScanOptions,
    /// `n` values at which `g_n` metric samples are recorded.
    pub metric_ns: Vec<u32>,
}

impl Default for HyperbolicityConfig {
    fn default() -> Self {
        HyperbolicityConfig {
            max_k: 20,
            max_n: 50,
            schedule: ToleranceSchedule::Reciprocal,
            limits: SearchLimits::default(),
            scan: ScanOptions::default(),
            metric_ns: vec![1, 10, 50],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramCheck {
    pub statement: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityReport {
    pub domain: String,
    pub base_point: Point2,
    pub property_l: PropertyReport,
    pub property_jpaff: PropertyReport,
    pub property_jp: PropertyReport,
    pub obstruction: Option<ObstructionCertificate>,
    pub metric_samples: Vec<MetricSample>,
    pub diagram: Vec<DiagramCheck>,
    /// (J-P)_aff holds up to K while an obstruction certificate shows `T_D`
    /// is not hyperbolic: (J-P)_aff is then not sufficient for this base.
    pub affine_gap: bool,
}

impl HyperbolicityReport {
    pub fn diagram_consistent(&self) -> bool {
        self.diagram.iter().all(|c| c.holds)
    }
}

/// Fills missing (J-P) records with lifted affine witnesses.
pub fn lift_affine_into_jp(domain: &DomainSpec, jp: &mut PropertyReport, jpaff: &PropertyReport, limits: &QueryLimits) {
    for rec in &mut jp.per_k {
        if rec.outcome.is_witness() {
            continue;
        }
        if let Some(Outcome::WitnessFound { witness: Witness::Affine(w) }) = jpaff.record(rec.k).map(|r| &r.outcome) {
            let lifted = AnalyticWitness { k: w.k, center: jp.base_point.x2, shape: AnalyticShape::Affine { c: w.c, d: w.d } };
            if crate::predicates::verify_jp_witness(domain, jp.base_point, &lifted, limits).is_verified() {
                rec.outcome = Outcome::WitnessFound { witness: Witness::Analytic(lifted) };
            }
        }
    }
    jp.verdict = crate::predicates::verdict_of(&jp.per_k);
}

pub fn diagram_checks(l: &PropertyReport, jpaff: &PropertyReport, jp: &PropertyReport, samples: &[MetricSample]) -> Vec<DiagramCheck> {
    let lift = check_implications(l, jpaff);
    let jp_from_aff: Vec<u32> = jpaff
        .per_k
        .iter()
        .filter(|r| r.outcome.is_witness() && !jp.record(r.k).is_some_and(|j| j.outcome.is_witness()))
        .map(|r| r.k)
        .collect();
    let never = !(l.verdict == Verdict::FailsUpToK && jpaff.verdict == Verdict::HoldsUpToK);
    vec![
        DiagramCheck {
            statement: "(L) fails at k => (J-P)_aff fails at k (constants are affine)".into(),
            holds: lift.is_ok(),
            detail: lift.err().unwrap_or_else(|| "every segment witness has an affine witness".into()),
        },
        DiagramCheck {
            statement: "(J-P)_aff fails at k => (J-P) fails at k (affine maps are real-analytic)".into(),
            holds: jp_from_aff.is_empty(),
            detail: if jp_from_aff.is_empty() { "every affine witness has an analytic witness".into() } else { format!("missing at k = {jp_from_aff:?}") },
        },
        DiagramCheck {
            statement: "not ((L) FailsUpToK and (J-P)_aff HoldsUpToK)".into(),
            holds: never,
            detail: format!("L {:?}, (J-P)_aff {:?}", l.verdict, jpaff.verdict),
        },
        DiagramCheck {
            statement: "lower <= upper at every metric sample".into(),
            holds: samples.iter().all(MetricSample::consistent),
            detail: format!("{} samples", samples.len()),
        },
    ]
}

pub fn affine_gap(obstruction: Option<&ObstructionCertificate>, jpaff: &PropertyReport) -> bool {
    obstruction.is_some_and(|c| c.verdict == ObstructionVerdict::NonHyperbolicityWitness) && jpaff.verdict == Verdict::HoldsUpToK
}

pub fn hyperbolicity_report(domain: &DomainSpec, a: Point2, config: &HyperbolicityConfig) -> Result<HyperbolicityReport, MetricError> {
    if !domain.contains(a) {
        return Err(MetricError::BaseOutside { x1: a.x1, x2: a.x2 });
    }
    let limits = &config.limits;
    let property_l = check_property_l(domain, a, config.max_k, config.schedule, limits)?;
    let property_jpaff = check_property_jpaff(domain, a, config.max_k, limits)?;
    let mut property_jp = check_property_jp(domain, a, config.max_k, limits)?;
    lift_affine_into_jp(domain, &mut property_jp, &property_jpaff, &limits.graph);

    let centred = a == Point2::new(0.0, domain.strip.mid);
    let obstruction = if centred { Some(obstruction_scan(domain, a, config.max_n, &config.scan)?) } else { None };

    let mut metric_samples = Vec::new();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    for v in [[zero, one], [one, zero]] {
        metric_samples.push(metric_sample(domain, TangentSample::at(a, v), None, &limits.graph)?);
    }
    if let Some(cert) = &obstruction {
        for &n in &config.metric_ns {
            let Some(row) = cert.rows.get(n as usize - 1) else { continue };
            if !row.containment.is_contained() {
                continue;
            }
            let v = [Complex64::new(row.direction[0], 0.0), Complex64::new(row.direction[1], 0.0)];
            metric_samples.push(metric_sample(domain, TangentSample::at(a, v), Some(AnalyticDisc::Family { n }), &limits.graph)?);
        }
    }

    let diagram = diagram_checks(&property_l, &property_jpaff, &property_jp, &metric_samples);
    let affine_gap = affine_gap(obstruction.as_ref(), &property_jpaff);
    Ok(HyperbolicityReport {
        domain: domain.name.clone(),
        base_point: a,
        property_l,
        property_jpaff,
        property_jp,
        obstruction,
        metric_samples,
        diagram,
        affine_gap,
    })
}
