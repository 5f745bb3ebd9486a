//! Planar base domains: a horizontal strip minus finitely many closed
//! obstacles, together with rigorous containment queries.
//!
//! The obstacles are either zero-width vertical slits or smooth "teeth"
//! anchored on one of the strip's boundary lines. Every query that answers
//! `Inside` is backed by outward-rounded interval arithmetic; `NotInside`
//! always carries a concrete point of the complement.

use std::collections::VecDeque;
use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::Interval;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x1: f64,
    pub x2: f64,
}

impl Point2 {
    pub fn new(x1: f64, x2: f64) -> Self {
        Point2 { x1, x2 }
    }
}

/// Axis-aligned closed box `x × y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box2 {
    pub x: Interval,
    pub y: Interval,
}

impl Box2 {
    pub fn new(x: Interval, y: Interval) -> Self {
        Box2 { x, y }
    }

    /// Splits along the wider side.
    pub fn bisect(&self) -> (Box2, Box2) {
        if self.x.width() >= self.y.width() {
            let (a, b) = self.x.split();
            (Box2::new(a, self.y), Box2::new(b, self.y))
        } else {
            let (a, b) = self.y.split();
            (Box2::new(self.x, a), Box2::new(self.x, b))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Containment {
    Inside,
    NotInside { witness: Point2 },
    Unknown,
}

impl Containment {
    pub fn is_inside(&self) -> bool {
        matches!(self, Containment::Inside)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    /// Attached to the lower strip line `x2 = y_lo`.
    Lower,
    /// Attached to the upper strip line `x2 = y_hi`.
    Upper,
}

/// Closed segment `{x} × span`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerticalSlit {
    pub x: f64,
    pub span: Interval,
}

/// User-facing tooth parameters; resolved against a strip by [`DomainSpec::new`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToothParams {
    pub anchor: Anchor,
    pub foot: Interval,
    pub apex_x: f64,
    #[serde(default = "default_sharpness")]
    pub sharpness: f64,
}

fn default_sharpness() -> f64 {
    1.0
}

/// Closed region between an anchor line and the graph of a C^∞ bump that
/// vanishes at the foot endpoints and reaches the mid-line at `apex_x`.
///
/// With `u = x - apex_x`, `L = apex_x - foot.lo`, `R = foot.hi - apex_x`,
/// the bump coordinate is the Möbius map `s(u) = u / (αu + β)` sending
/// `-L, 0, R` to `-1, 0, 1`, and the height is
/// `reach · exp(p · (1 - 1/(1 - s²)))` with `p` the sharpness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothTooth {
    pub anchor: Anchor,
    pub foot: Interval,
    pub apex_x: f64,
    pub sharpness: f64,
    /// Ordinate of the anchor line.
    pub base: f64,
    /// Distance from the anchor line to the mid-line.
    pub reach: f64,
}

impl SmoothTooth {
    fn mobius_coeffs(&self) -> (Interval, Interval) {
        let left = Interval::point(self.apex_x) - Interval::point(self.foot.lo);
        let right = Interval::point(self.foot.hi) - Interval::point(self.apex_x);
        let total = left + right;
        let alpha = (right - left) / total;
        let beta = (left * right * 2.0) / total;
        (alpha, beta)
    }

    fn s_at(&self, x: f64, alpha: Interval, beta: Interval) -> Interval {
        let u = Interval::point(x) - Interval::point(self.apex_x);
        if u.lo == 0.0 && u.hi == 0.0 {
            return Interval::ZERO;
        }
        let s = u / (alpha * u + beta);
        Interval::new(s.lo.max(-1.0), s.hi.min(1.0))
    }

    fn bump(&self, q: f64, upper: bool) -> f64 {
        if q >= 1.0 {
            return 0.0;
        }
        let t = Interval::ONE - Interval::point(q);
        let e = (Interval::ONE - t.recip()) * self.sharpness;
        let v = e.exp();
        if upper {
            v.hi
        } else {
            v.lo.max(0.0)
        }
    }

    /// Enclosure of the tooth height over `x ∩ foot`; `None` when disjoint.
    pub fn height(&self, x: Interval) -> Option<Interval> {
        let x = x.intersect(&self.foot)?;
        let (alpha, beta) = self.mobius_coeffs();
        let s_lo = self.s_at(x.lo, alpha, beta);
        let s_hi = if x.is_point() { s_lo } else { self.s_at(x.hi, alpha, beta) };
        let s = Interval::new(s_lo.lo, s_hi.hi);
        let q = s.sqr();
        let phi = Interval::new(self.bump(q.hi, false), self.bump(q.lo, true));
        let h = phi * self.reach;
        Some(Interval::new(h.lo.max(0.0), h.hi))
    }

    /// Height at the point of `x ∩ foot` closest to the apex, i.e. the
    /// maximum of the unimodal profile over that range.
    pub fn max_height(&self, x: Interval) -> Option<(f64, Interval)> {
        let x = x.intersect(&self.foot)?;
        let xc = self.apex_x.clamp(x.lo, x.hi);
        Some((xc, self.height(Interval::point(xc))?))
    }

    /// Vertical extent covered by the tooth above abscissae `x`, as an outer
    /// enclosure.
    pub fn outer_extent(&self, x: Interval) -> Option<Interval> {
        let h = self.height(x)?;
        Some(match self.anchor {
            Anchor::Lower => Interval::new(self.base, (Interval::point(self.base) + h).hi),
            Anchor::Upper => Interval::new((Interval::point(self.base) - h).lo, self.base),
        })
    }

    /// Part of the tooth column at abscissa `x` that is guaranteed to lie in
    /// the tooth.
    pub fn inner_column(&self, x: f64) -> Option<Interval> {
        let h = self.height(Interval::point(x))?;
        match self.anchor {
            Anchor::Lower => Interval::try_new(self.base, (Interval::point(self.base) + h.lo).lo),
            Anchor::Upper => Interval::try_new((Interval::point(self.base) - h.lo).hi, self.base),
        }
    }

    pub fn contains_point(&self, p: Point2) -> bool {
        let Some(h) = self.height(Interval::point(p.x1)) else {
            return false;
        };
        let hf = h.mid();
        match self.anchor {
            Anchor::Lower => p.x2 >= self.base && p.x2 <= self.base + hf,
            Anchor::Upper => p.x2 <= self.base && p.x2 >= self.base - hf,
        }
    }

    fn box_relation(&self, b: &Box2) -> Relation {
        let Some((xc, h)) = self.max_height(b.x) else {
            return Relation::Disjoint;
        };
        let base = Interval::point(self.base);
        match self.anchor {
            Anchor::Lower => {
                let top = base + h;
                if b.y.hi < self.base || b.y.lo > top.hi {
                    Relation::Disjoint
                } else if b.y.lo <= top.lo {
                    Relation::Meets(Point2::new(xc, b.y.lo.max(self.base)))
                } else {
                    Relation::Undecided
                }
            }
            Anchor::Upper => {
                let bottom = base - h;
                if b.y.lo > self.base || b.y.hi < bottom.lo {
                    Relation::Disjoint
                } else if b.y.hi >= bottom.hi {
                    Relation::Meets(Point2::new(xc, b.y.hi.min(self.base)))
                } else {
                    Relation::Undecided
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstacle {
    Slit(VerticalSlit),
    Tooth(SmoothTooth),
}

enum Relation {
    Disjoint,
    Meets(Point2),
    Undecided,
}

impl Obstacle {
    pub fn x_range(&self) -> Interval {
        match self {
            Obstacle::Slit(s) => Interval::point(s.x),
            Obstacle::Tooth(t) => t.foot,
        }
    }

    pub fn contains_point(&self, p: Point2) -> bool {
        match self {
            Obstacle::Slit(s) => p.x1 == s.x && s.span.contains(p.x2),
            Obstacle::Tooth(t) => t.contains_point(p),
        }
    }

    /// Outer enclosure of the obstacle's vertical extent above `x`.
    pub fn outer_extent(&self, x: Interval) -> Option<Interval> {
        match self {
            Obstacle::Slit(s) => x.contains(s.x).then_some(s.span),
            Obstacle::Tooth(t) => t.outer_extent(x),
        }
    }

    /// Portion of the column at abscissa `x` certainly covered by the obstacle.
    pub fn inner_column(&self, x: f64) -> Option<Interval> {
        match self {
            Obstacle::Slit(s) => (s.x == x).then_some(s.span),
            Obstacle::Tooth(t) => t.inner_column(x),
        }
    }

    /// Heights `b` for which `x_range × {b}` certainly meets the obstacle.
    pub fn inner_shadow(&self, x: Interval) -> Option<Interval> {
        match self {
            Obstacle::Slit(s) => x.contains(s.x).then_some(s.span),
            Obstacle::Tooth(t) => {
                let (xc, _) = t.max_height(x)?;
                t.inner_column(xc)
            }
        }
    }

    /// Abscissa inside `x` where the obstacle's column is tallest.
    pub fn probe_in(&self, x: Interval) -> Option<f64> {
        match self {
            Obstacle::Slit(s) => x.contains(s.x).then_some(s.x),
            Obstacle::Tooth(t) => t.max_height(x).map(|(xc, _)| xc),
        }
    }

    fn box_relation(&self, b: &Box2) -> Relation {
        match self {
            Obstacle::Slit(s) => {
                if b.x.contains(s.x) && b.y.meets(&s.span) {
                    Relation::Meets(Point2::new(s.x, b.y.lo.max(s.span.lo)))
                } else {
                    Relation::Disjoint
                }
            }
            Obstacle::Tooth(t) => t.box_relation(b),
        }
    }
}

/// Strip bounds and mid-line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strip {
    pub y_lo: f64,
    pub y_hi: f64,
    pub mid: f64,
}

impl Default for Strip {
    fn default() -> Self {
        Strip { y_lo: 0.0, y_hi: 4.0, mid: 2.0 }
    }
}

/// User-level description of an obstacle before validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObstacleParams {
    Slit(VerticalSlit),
    Tooth(ToothParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationOptions {
    /// Grid spacing for the connectivity flood-fill.
    pub connectivity_resolution: f64,
    /// Bisection depth for the tooth/sine-graph disjointness proof.
    pub sine_check_depth: u32,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions { connectivity_resolution: 1e-2, sine_check_depth: 30 }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("strip bounds must satisfy y_lo < mid < y_hi with finite values (got {y_lo}, {mid}, {y_hi})")]
    InvalidStrip { y_lo: f64, mid: f64, y_hi: f64 },
    #[error("obstacle {index}: non-finite parameter")]
    NonFinite { index: usize },
    #[error("obstacle {index}: slit span {span} is not inside [{y_lo}, {y_hi}]")]
    SlitOutsideStrip { index: usize, span: Interval, y_lo: f64, y_hi: f64 },
    #[error("obstacle {index}: tooth foot {foot} has zero width")]
    DegenerateTooth { index: usize, foot: Interval },
    #[error("obstacle {index}: apex {apex_x} is not strictly inside foot {foot}")]
    ApexOutsideFoot { index: usize, apex_x: f64, foot: Interval },
    #[error("obstacle {index}: stored tooth does not match its anchor and strip")]
    InconsistentTooth { index: usize },
    #[error("obstacle {index}: sharpness must be positive (got {sharpness})")]
    BadSharpness { index: usize, sharpness: f64 },
    #[error("obstacle {index}: tooth meets the graph of sin x1 + mid near ({x1}, {x2})")]
    ToothMeetsSineGraph { index: usize, x1: f64, x2: f64 },
    #[error("obstacle {index}: could not verify disjointness from the graph of sin x1 + mid")]
    ToothSineUnverified { index: usize },
    #[error("obstacle {index}: tooth violates half-plane placement ({requirement})")]
    HalfPlane { index: usize, requirement: &'static str },
    #[error("domain is not connected at grid resolution {resolution} (unreached free node near ({x1}, {x2}))")]
    Disconnected { resolution: f64, x1: f64, x2: f64 },
    #[error("base point ({x1}, {x2}) is not in the domain")]
    PointOutside { x1: f64, x2: f64 },
}

/// Strip `{y_lo < x2 < y_hi}` minus a finite union of closed obstacles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub name: String,
    pub strip: Strip,
    pub obstacles: Vec<Obstacle>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnvelopeCase {
    /// The convex hull of the base is not the whole plane.
    CaseI,
    /// The envelope of holomorphy is all of C².
    CaseII,
}

impl EnvelopeCase {
    /// The hull of a region squeezed between two horizontal lines is a
    /// proper subset of the plane unless both lines are at infinity.
    pub fn of_bounds(y_lo: f64, y_hi: f64) -> Self {
        if y_lo == f64::NEG_INFINITY && y_hi == f64::INFINITY {
            EnvelopeCase::CaseII
        } else {
            EnvelopeCase::CaseI
        }
    }
}

pub fn classify_envelope(domain: &DomainSpec) -> EnvelopeCase {
    EnvelopeCase::of_bounds(domain.strip.y_lo, domain.strip.y_hi)
}

impl DomainSpec {
    pub fn new(
        name: impl Into<String>,
        strip: Strip,
        obstacles: &[ObstacleParams],
        opts: &ValidationOptions,
    ) -> Result<DomainSpec, GeometryError> {
        let Strip { y_lo, y_hi, mid } = strip;
        if !(y_lo.is_finite() && y_hi.is_finite() && mid.is_finite() && y_lo < mid && mid < y_hi) {
            return Err(GeometryError::InvalidStrip { y_lo, mid, y_hi });
        }
        let resolved = obstacles
            .iter()
            .enumerate()
            .map(|(index, o)| resolve_obstacle(index, o, &strip))
            .collect::<Result<Vec<_>, _>>()?;
        let domain = DomainSpec { name: name.into(), strip, obstacles: resolved };
        domain.validate(opts)?;
        Ok(domain)
    }

    /// Bare strip with no obstacles.
    pub fn bare_strip(strip: Strip) -> Result<DomainSpec, GeometryError> {
        DomainSpec::new("strip", strip, &[], &ValidationOptions::default())
    }

    /// Full structural validation: obstacle parameters, tooth/sine-graph
    /// disjointness, and grid connectivity.
    pub fn validate(&self, opts: &ValidationOptions) -> Result<(), GeometryError> {
        let Strip { y_lo, y_hi, mid } = self.strip;
        if !(y_lo.is_finite() && y_hi.is_finite() && mid.is_finite() && y_lo < mid && mid < y_hi) {
            return Err(GeometryError::InvalidStrip { y_lo, mid, y_hi });
        }
        for (index, o) in self.obstacles.iter().enumerate() {
            match o {
                Obstacle::Slit(s) => check_slit(index, s, &self.strip)?,
                Obstacle::Tooth(t) => {
                    check_tooth_params(index, t.foot, t.apex_x, t.sharpness)?;
                    let expected = resolve_tooth(
                        &ToothParams { anchor: t.anchor, foot: t.foot, apex_x: t.apex_x, sharpness: t.sharpness },
                        &self.strip,
                    );
                    if expected != *t {
                        return Err(GeometryError::InconsistentTooth { index });
                    }
                    verify_tooth_avoids_sine(index, t, mid, opts.sine_check_depth)?;
                }
            }
        }
        check_connectivity(self, opts.connectivity_resolution)
    }

    pub fn contains(&self, p: Point2) -> bool {
        contains(self, p)
    }

    /// Abscissae where obstacle columns are tallest within `x`.
    pub fn probes_in(&self, x: Interval) -> Vec<f64> {
        self.obstacles.iter().filter_map(|o| o.probe_in(x)).collect()
    }

    /// Smallest interval containing all obstacle abscissae.
    pub fn obstacle_x_extent(&self) -> Option<Interval> {
        self.obstacles.iter().map(|o| o.x_range()).reduce(|a, b| a.hull(&b))
    }

    /// Merged closed intervals of heights certainly outside `D` on the
    /// vertical line through `x` (strip exterior included as half-lines).
    pub fn complement_column(&self, x: f64) -> Vec<Interval> {
        let mut parts: Vec<Interval> = vec![
            Interval::new(f64::NEG_INFINITY, self.strip.y_lo),
            Interval::new(self.strip.y_hi, f64::INFINITY),
        ];
        parts.extend(self.obstacles.iter().filter_map(|o| o.inner_column(x)));
        merge_intervals(parts)
    }

    /// Merged closed intervals of heights `b` for which the segment
    /// `x × {b}` certainly leaves `D`.
    pub fn complement_shadow(&self, x: Interval) -> Vec<Interval> {
        let mut parts: Vec<Interval> = vec![
            Interval::new(f64::NEG_INFINITY, self.strip.y_lo),
            Interval::new(self.strip.y_hi, f64::INFINITY),
        ];
        parts.extend(self.obstacles.iter().filter_map(|o| o.inner_shadow(x)));
        merge_intervals(parts)
    }

    /// True when every point of `{x} × ys` lies outside `D`.
    pub fn column_excludes(&self, x: f64, ys: Interval) -> bool {
        self.complement_column(x).iter().any(|c| c.contains_interval(&ys))
    }
}

/// Sorted union of closed intervals, merging overlapping or touching ones.
pub fn merge_intervals(mut parts: Vec<Interval>) -> Vec<Interval> {
    parts.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut out: Vec<Interval> = Vec::with_capacity(parts.len());
    for p in parts {
        match out.last_mut() {
            Some(last) if p.lo <= last.hi => last.hi = last.hi.max(p.hi),
            _ => out.push(p),
        }
    }
    out
}

fn check_slit(index: usize, s: &VerticalSlit, strip: &Strip) -> Result<(), GeometryError> {
    if !(s.x.is_finite() && s.span.lo.is_finite() && s.span.hi.is_finite()) || s.span.lo > s.span.hi {
        return Err(GeometryError::NonFinite { index });
    }
    if s.span.lo < strip.y_lo || s.span.hi > strip.y_hi {
        return Err(GeometryError::SlitOutsideStrip { index, span: s.span, y_lo: strip.y_lo, y_hi: strip.y_hi });
    }
    Ok(())
}

fn check_tooth_params(index: usize, foot: Interval, apex_x: f64, sharpness: f64) -> Result<(), GeometryError> {
    if !(foot.lo.is_finite() && foot.hi.is_finite() && apex_x.is_finite() && sharpness.is_finite())
        || foot.lo > foot.hi
    {
        return Err(GeometryError::NonFinite { index });
    }
    if foot.width() <= 0.0 {
        return Err(GeometryError::DegenerateTooth { index, foot });
    }
    if !(foot.lo < apex_x && apex_x < foot.hi) {
        return Err(GeometryError::ApexOutsideFoot { index, apex_x, foot });
    }
    if sharpness <= 0.0 {
        return Err(GeometryError::BadSharpness { index, sharpness });
    }
    Ok(())
}

fn resolve_tooth(p: &ToothParams, strip: &Strip) -> SmoothTooth {
    let (base, reach) = match p.anchor {
        Anchor::Lower => (strip.y_lo, strip.mid - strip.y_lo),
        Anchor::Upper => (strip.y_hi, strip.y_hi - strip.mid),
    };
    SmoothTooth { anchor: p.anchor, foot: p.foot, apex_x: p.apex_x, sharpness: p.sharpness, base, reach }
}

fn resolve_obstacle(index: usize, o: &ObstacleParams, strip: &Strip) -> Result<Obstacle, GeometryError> {
    match o {
        ObstacleParams::Slit(s) => {
            check_slit(index, s, strip)?;
            Ok(Obstacle::Slit(*s))
        }
        ObstacleParams::Tooth(t) => {
            check_tooth_params(index, t.foot, t.apex_x, t.sharpness)?;
            Ok(Obstacle::Tooth(resolve_tooth(t, strip)))
        }
    }
}

/// Proves, by bisection of the foot, that the tooth never meets the graph
/// of `sin x1 + mid`. Comparisons are made relative to the mid-line so that
/// a tooth apex sitting exactly on it is handled without cancellation.
fn verify_tooth_avoids_sine(index: usize, t: &SmoothTooth, mid: f64, depth: u32) -> Result<(), GeometryError> {
    let offset = Interval::point(t.base) - Interval::point(mid);
    let mut stack = vec![(t.foot, 0u32)];
    while let Some((x, d)) = stack.pop() {
        let h = t.height(x).expect("piece lies in foot");
        let s = x.sin();
        let separated = match t.anchor {
            Anchor::Lower => (offset + h).hi < s.lo,
            Anchor::Upper => (offset - h).lo > s.hi,
        };
        if separated {
            continue;
        }
        for probe in [t.apex_x.clamp(x.lo, x.hi), x.mid()] {
            let hp = t.height(Interval::point(probe)).expect("probe lies in foot");
            let sp = Interval::point(probe).sin();
            let meets = match t.anchor {
                Anchor::Lower => (offset + hp).lo >= sp.hi,
                Anchor::Upper => (offset - hp).hi <= sp.lo,
            };
            if meets {
                return Err(GeometryError::ToothMeetsSineGraph { index, x1: probe, x2: mid + sp.mid() });
            }
        }
        if d >= depth || x.width() < 1e-12 {
            return Err(GeometryError::ToothSineUnverified { index });
        }
        let (a, b) = x.split();
        stack.push((a, d + 1));
        stack.push((b, d + 1));
    }
    Ok(())
}

/// Grid flood-fill. Nodes are points of `D`; two neighbours are joined only
/// when the segment between them is interval-verified inside `D`.
fn check_connectivity(domain: &DomainSpec, resolution: f64) -> Result<(), GeometryError> {
    let Strip { y_lo, y_hi, .. } = domain.strip;
    let extent = domain.obstacle_x_extent().unwrap_or(Interval::new(-1.0, 1.0));
    let x0 = extent.lo - 1.0;
    let x1 = extent.hi + 1.0;
    let nx = ((x1 - x0) / resolution).ceil().max(2.0) as usize + 1;
    let ny = ((y_hi - y_lo) / resolution).ceil().max(2.0) as usize;
    let dx = (x1 - x0) / (nx - 1) as f64;
    let dy = (y_hi - y_lo) / ny as f64;
    let xs: Vec<f64> = (0..nx).map(|i| x0 + i as f64 * dx).collect();
    let ys: Vec<f64> = (0..ny).map(|j| y_lo + (j as f64 + 0.5) * dy).collect();

    // per row: (free, right-edge, up-edge)
    let rows: Vec<Vec<(bool, bool, bool)>> = (0..ny)
        .into_par_iter()
        .map(|j| {
            (0..nx)
                .map(|i| {
                    let p = Point2::new(xs[i], ys[j]);
                    let free = contains(domain, p);
                    let right = free
                        && i + 1 < nx
                        && box_containment(domain, &Box2::new(Interval::new(xs[i], xs[i + 1]), Interval::point(ys[j])))
                            .is_inside();
                    let upward = free
                        && j + 1 < ny
                        && box_containment(domain, &Box2::new(Interval::point(xs[i]), Interval::new(ys[j], ys[j + 1])))
                            .is_inside();
                    (free, right, upward)
                })
                .collect()
        })
        .collect();

    let idx = |i: usize, j: usize| j * nx + i;
    let mut seen = vec![false; nx * ny];
    let Some(start) = (0..ny).flat_map(|j| (0..nx).map(move |i| (i, j))).find(|&(i, j)| rows[j][i].0) else {
        return Ok(());
    };
    let mut queue = VecDeque::from([start]);
    seen[idx(start.0, start.1)] = true;
    while let Some((i, j)) = queue.pop_front() {
        let mut visit = |a: usize, b: usize, queue: &mut VecDeque<(usize, usize)>| {
            if !seen[idx(a, b)] {
                seen[idx(a, b)] = true;
                queue.push_back((a, b));
            }
        };
        if rows[j][i].1 {
            visit(i + 1, j, &mut queue);
        }
        if rows[j][i].2 {
            visit(i, j + 1, &mut queue);
        }
        if i > 0 && rows[j][i - 1].1 {
            visit(i - 1, j, &mut queue);
        }
        if j > 0 && rows[j - 1][i].2 {
            visit(i, j - 1, &mut queue);
        }
    }
    for j in 0..ny {
        for i in 0..nx {
            if rows[j][i].0 && !seen[idx(i, j)] {
                return Err(GeometryError::Disconnected { resolution, x1: xs[i], x2: ys[j] });
            }
        }
    }
    Ok(())
}

/// The strip `0 < x2 < 4` minus four closed slits at `±π/2, ±3π/2`, each
/// reaching the mid-line 2 from alternating sides.
pub fn build_figure1() -> DomainSpec {
    let slit = |x: f64, lo: f64, hi: f64| ObstacleParams::Slit(VerticalSlit { x, span: Interval::new(lo, hi) });
    let obstacles = [
        slit(-3.0 * FRAC_PI_2, 0.0, 2.0),
        slit(-FRAC_PI_2, 2.0, 4.0),
        slit(FRAC_PI_2, 0.0, 2.0),
        slit(3.0 * FRAC_PI_2, 2.0, 4.0),
    ];
    DomainSpec::new("fig1", Strip::default(), &obstacles, &ValidationOptions::default())
        .expect("figure 1 preset is valid")
}

/// Default teeth `S1..S4`: feet of half-width 1 around `-3π/2, -π/2, π/2, 3π/2`.
pub fn figure2_default_teeth() -> [ToothParams; 4] {
    let tooth = |anchor, apex: f64| ToothParams {
        anchor,
        foot: Interval::new(apex - 1.0, apex + 1.0),
        apex_x: apex,
        sharpness: 1.0,
    };
    [
        tooth(Anchor::Lower, -3.0 * PI / 2.0),
        tooth(Anchor::Upper, -FRAC_PI_2),
        tooth(Anchor::Lower, FRAC_PI_2),
        tooth(Anchor::Upper, 3.0 * PI / 2.0),
    ]
}

/// Smooth-boundary variant. Teeth are given in the order `S1..S4`:
/// `S1, S3` anchored below, `S2, S4` above; `S1, S2` in `x1 ≤ 0`,
/// `S3, S4` in `x1 ≥ 0`.
pub fn build_figure2(teeth: &[ToothParams; 4]) -> Result<DomainSpec, GeometryError> {
    let expected = [
        (Anchor::Lower, false, "S1 must be anchored below in x1 <= 0"),
        (Anchor::Upper, false, "S2 must be anchored above in x1 <= 0"),
        (Anchor::Lower, true, "S3 must be anchored below in x1 >= 0"),
        (Anchor::Upper, true, "S4 must be anchored above in x1 >= 0"),
    ];
    for (index, (t, (anchor, right, requirement))) in teeth.iter().zip(expected).enumerate() {
        let placed = if right { t.foot.lo >= 0.0 } else { t.foot.hi <= 0.0 };
        if t.anchor != anchor || !placed {
            return Err(GeometryError::HalfPlane { index, requirement });
        }
    }
    let obstacles: Vec<ObstacleParams> = teeth.iter().map(|t| ObstacleParams::Tooth(*t)).collect();
    DomainSpec::new("fig2", Strip::default(), &obstacles, &ValidationOptions::default())
}

pub fn contains(domain: &DomainSpec, p: Point2) -> bool {
    let Strip { y_lo, y_hi, .. } = domain.strip;
    p.x1.is_finite()
        && p.x2 > y_lo
        && p.x2 < y_hi
        && !domain.obstacles.iter().any(|o| o.contains_point(p))
}

/// Single-shot interval test of a closed box against `D`.
pub fn box_containment(domain: &DomainSpec, b: &Box2) -> Containment {
    let Strip { y_lo, y_hi, .. } = domain.strip;
    if b.y.lo <= y_lo {
        return Containment::NotInside { witness: Point2::new(b.x.lo, b.y.lo) };
    }
    if b.y.hi >= y_hi {
        return Containment::NotInside { witness: Point2::new(b.x.lo, b.y.hi) };
    }
    let mut undecided = false;
    for o in &domain.obstacles {
        match o.box_relation(b) {
            Relation::Disjoint => {}
            Relation::Meets(witness) => return Containment::NotInside { witness },
            Relation::Undecided => undecided = true,
        }
    }
    if undecided {
        Containment::Unknown
    } else {
        Containment::Inside
    }
}

/// Depth and width budget for adaptive subdivision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueryLimits {
    pub max_depth: u32,
    pub min_width: f64,
}

impl Default for QueryLimits {
    fn default() -> Self {
        QueryLimits { max_depth: 40, min_width: 1e-12 }
    }
}

/// [`box_containment`] with bisection of undecided boxes.
pub fn box_containment_refined(domain: &DomainSpec, b: &Box2, limits: &QueryLimits) -> Containment {
    let mut stack = vec![(*b, 0u32)];
    let mut unknown = false;
    while let Some((cur, depth)) = stack.pop() {
        match box_containment(domain, &cur) {
            Containment::Inside => {}
            not @ Containment::NotInside { .. } => return not,
            Containment::Unknown => {
                if depth >= limits.max_depth || cur.x.width().max(cur.y.width()) < limits.min_width {
                    unknown = true;
                } else {
                    let (l, r) = cur.bisect();
                    stack.push((r, depth + 1));
                    stack.push((l, depth + 1));
                }
            }
        }
    }
    if unknown {
        Containment::Unknown
    } else {
        Containment::Inside
    }
}

/// Closed segment `[-k, k] × {b}` interval-verified inside `D`.
pub fn horizontal_segment_in(domain: &DomainSpec, b: f64, k: f64) -> bool {
    debug_assert!(k > 0.0);
    box_containment(domain, &Box2::new(Interval::new(-k, k), Interval::point(b))).is_inside()
}

/// A real function of one variable that can enclose its range.
pub trait GraphFn: Sync {
    fn enclose(&self, t: Interval) -> Interval;

    fn value(&self, t: f64) -> f64 {
        self.enclose(Interval::point(t)).mid()
    }
}

impl<F: Fn(Interval) -> Interval + Sync> GraphFn for F {
    fn enclose(&self, t: Interval) -> Interval {
        self(t)
    }
}

/// Decides whether `{(t, γ(t)) : t ∈ x_range}` lies in `D`.
///
/// Undecided pieces are bisected up to `limits`; at each piece the obstacle
/// probes and the midpoint are tested for a graph point certainly outside
/// `D`, which becomes the `NotInside` witness.
pub fn graph_in_domain(domain: &DomainSpec, gamma: &dyn GraphFn, x_range: Interval, limits: &QueryLimits) -> Containment {
    let excluded_at = |t: f64| -> Option<Point2> {
        let g = gamma.enclose(Interval::point(t));
        domain.column_excludes(t, g).then(|| Point2::new(t, g.mid()))
    };
    for t in domain.probes_in(x_range).into_iter().chain([x_range.lo, x_range.hi]) {
        if let Some(witness) = excluded_at(t) {
            return Containment::NotInside { witness };
        }
    }
    let mut stack = vec![(x_range, 0u32)];
    let mut unknown = false;
    while let Some((piece, depth)) = stack.pop() {
        let g = gamma.enclose(piece);
        if box_containment(domain, &Box2::new(piece, g)).is_inside() {
            continue;
        }
        for t in domain.probes_in(piece).into_iter().chain([piece.mid()]) {
            if let Some(witness) = excluded_at(t) {
                return Containment::NotInside { witness };
            }
        }
        if depth >= limits.max_depth || piece.width() < limits.min_width {
            unknown = true;
            continue;
        }
        let (l, r) = piece.split();
        stack.push((r, depth + 1));
        stack.push((l, depth + 1));
    }
    if unknown {
        Containment::Unknown
    } else {
        Containment::Inside
    }
}
