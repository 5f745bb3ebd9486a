//! The explicit map families
//!
//! ```text
//! f_n(x + iy) = (n x, sin(n x) cosh(n y) / cosh n + mid)        (harmonic, Δ → D)
//! g_n(z)      = (n z, sin(n z) / cosh n + mid)                  (holomorphic, Δ → T_D)
//! ```
//!
//! with `Re g_n = f_n`, `f_n(0) = (0, mid)` and `|df_n(0)| = n·sqrt(1 + sech²n)`.
//! Containment `f_n(Q) ⊂ D` for the closed square `Q = [-1,1]²` (hence for
//! the unit disc) is certified by comparing the image band
//! `{sin(x1)·ρ : ρ ∈ [sech n, 1]}` with every obstacle, in coordinates
//! relative to the mid-line.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{DomainSpec, Obstacle, Point2};
use crate::interval::Interval;

/// Largest family index accepted by default.
pub const DEFAULT_MAX_N: u32 = 1000;

const INCLUSION_CHAIN: &str = "f_n(disc) ⊂ f_n(Q) ⊂ D with Q = [-1,1]×[-1,1]";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("family index must satisfy 1 <= n <= {max} (got {n})")]
    BadIndex { n: u32, max: u32 },
    #[error("abscissa {x1} outside [-{n}, {n}]")]
    AbscissaOutOfRange { x1: f64, n: u32 },
    #[error("curve parameter y0 = {y0} outside [-1, 1]")]
    CurveParameter { y0: f64 },
    #[error("grid step {h} outside (0, 0.1]")]
    GridStep { h: f64 },
}

/// `sech n = 2e^{-n} / (1 + e^{-2n})`, free of overflow.
pub fn sech(n: f64) -> f64 {
    let e = (-n.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

/// Outer enclosure of `sech n`.
pub fn sech_enclosure(n: u32) -> Interval {
    let e = Interval::point(-(n as f64)).exp();
    let r = (e * 2.0) / (e.sqr() + 1.0);
    Interval::new(r.lo.max(0.0), r.hi.min(1.0))
}

/// `cosh(n y) / cosh n`, computed without forming either cosh.
fn cosh_ratio(n: f64, y: f64) -> f64 {
    let a = (n * y).abs();
    ((a - n).exp()) * (1.0 + (-2.0 * a).exp()) / (1.0 + (-2.0 * n).exp())
}

/// `sinh(n y) / cosh n`, computed without forming either hyperbolic function.
fn sinh_ratio(n: f64, y: f64) -> f64 {
    let a = (n * y).abs();
    let v = ((a - n).exp()) * (1.0 - (-2.0 * a).exp()) / (1.0 + (-2.0 * n).exp());
    v.copysign(y)
}

/// Real 2×2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Matrix2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Matrix2 {
    pub fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Matrix2 { a11, a12, a21, a22 }
    }

    pub fn identity() -> Self {
        Matrix2::new(1.0, 0.0, 0.0, 1.0)
    }

    /// Largest singular value, from the closed form
    /// `(|(a+d, c-b)| + |(a-d, b+c)|) / 2`.
    pub fn op_norm(&self) -> f64 {
        let Matrix2 { a11: a, a12: b, a21: c, a22: d } = *self;
        0.5 * ((a + d).hypot(c - b) + (a - d).hypot(b + c))
    }

    pub fn frobenius(&self) -> f64 {
        self.a11.hypot(self.a12).hypot(self.a21.hypot(self.a22))
    }
}

pub fn op_norm(m: &Matrix2) -> f64 {
    m.op_norm()
}

/// `f_n` and `g_n` with additive constant `mid`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessFamily {
    pub n: u32,
    pub mid: f64,
}

impl WitnessFamily {
    pub fn new(n: u32, mid: f64) -> Result<Self, MapError> {
        Self::with_cap(n, mid, DEFAULT_MAX_N)
    }

    pub fn with_cap(n: u32, mid: f64, max: u32) -> Result<Self, MapError> {
        if n == 0 || n > max {
            return Err(MapError::BadIndex { n, max });
        }
        Ok(WitnessFamily { n, mid })
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    pub fn base(&self) -> Point2 {
        Point2::new(0.0, self.mid)
    }

    pub fn eval_f(&self, z: Complex64) -> Point2 {
        let n = self.nf();
        Point2::new(n * z.re, (n * z.re).sin() * cosh_ratio(n, z.im) + self.mid)
    }

    /// Jacobian of `f_n` at `z`; columns are `∂/∂x`, `∂/∂y`.
    pub fn jac_f(&self, z: Complex64) -> Matrix2 {
        let n = self.nf();
        let (s, c) = (n * z.re).sin_cos();
        Matrix2::new(n, 0.0, n * c * cosh_ratio(n, z.im), n * s * sinh_ratio(n, z.im))
    }

    pub fn eval_g(&self, z: Complex64) -> (Complex64, Complex64) {
        let n = self.nf();
        let w = z * n;
        let second = if w.im.abs() < 700.0 && n < 700.0 {
            w.sin() / n.cosh()
        } else {
            let (s, c) = w.re.sin_cos();
            Complex64::new(s * cosh_ratio(n, z.im), c * sinh_ratio(n, z.im))
        };
        (w, second + self.mid)
    }

    /// `g_n'(z) = (n, n cos(nz) / cosh n)`.
    pub fn g_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let n = self.nf();
        let (s, c) = (n * z.re).sin_cos();
        let second = Complex64::new(c * cosh_ratio(n, z.im), -s * sinh_ratio(n, z.im)) * n;
        (Complex64::new(n, 0.0), second)
    }

    /// Closed form `n·sqrt(1 + sech²n)` of `|df_n(0)| = |g_n'(0)|`.
    pub fn derivative_norm_at_zero(&self) -> f64 {
        let n = self.nf();
        n * sech(n).hypot(1.0)
    }

    /// Second components of `f_n` over the fibre `{x = x1/n, |y| ≤ 1}`:
    /// the interval between `sin(x1)/cosh n + mid` and `sin(x1) + mid`.
    pub fn image_band(&self, x1: f64) -> Result<Interval, MapError> {
        let n = self.nf();
        if x1.abs() > n {
            return Err(MapError::AbscissaOutOfRange { x1, n: self.n });
        }
        let s = x1.sin();
        Ok(Interval::spanning(s * sech(n) + self.mid, s + self.mid))
    }

    /// The curve `Γ_{y0}`, the image of `[-1,1] × {y0}`.
    pub fn image_curve(&self, y0: f64) -> Result<ImageCurve, MapError> {
        if !(-1.0..=1.0).contains(&y0) {
            return Err(MapError::CurveParameter { y0 });
        }
        Ok(ImageCurve { n: self.n, y0, mid: self.mid })
    }

    /// Rigorous band over abscissae `x1 ∈ x`, relative to the mid-line.
    pub fn band_enclosure(&self, x: Interval) -> Band {
        Band { sin: x.sin(), sech: sech_enclosure(self.n) }
    }

    /// Certifies `f_n(Q) ⊂ D` or produces a point of `f_n(Q)` outside `D`.
    pub fn verify_containment(&self, domain: &DomainSpec) -> ContainmentCertificate {
        verify_containment_with(self, domain, DEFAULT_BAND_DEPTH)
    }

    pub fn harmonicity_residual(&self, h: f64) -> Result<Residual, MapError> {
        check_step(h)?;
        let n = self.nf();
        let nodes = interior_nodes(h);
        let mut comp = [0.0f64; 2];
        for &x in &nodes {
            for &y in &nodes {
                let f = |dx: f64, dy: f64| self.eval_f(Complex64::new(x + dx, y + dy));
                let c = f(0.0, 0.0);
                let (e, w, nn, s) = (f(h, 0.0), f(-h, 0.0), f(0.0, h), f(0.0, -h));
                let lap1 = (e.x1 + w.x1 + nn.x1 + s.x1 - 4.0 * c.x1) / (h * h);
                let lap2 = (e.x2 + w.x2 + nn.x2 + s.x2 - 4.0 * c.x2) / (h * h);
                comp[0] = comp[0].max(lap1.abs());
                comp[1] = comp[1].max(lap2.abs());
            }
        }
        Ok(Residual::new(comp, h, n.powi(4)))
    }

    pub fn cr_residual(&self, h: f64) -> Result<Residual, MapError> {
        check_step(h)?;
        let n = self.nf();
        let nodes = interior_nodes(h);
        let mut comp = [0.0f64; 2];
        for &x in &nodes {
            for &y in &nodes {
                let g = |dx: f64, dy: f64| self.eval_g(Complex64::new(x + dx, y + dy));
                let (e, w, nn, s) = (g(h, 0.0), g(-h, 0.0), g(0.0, h), g(0.0, -h));
                let cr = |east: Complex64, west: Complex64, north: Complex64, south: Complex64| {
                    let ux = (east.re - west.re) / (2.0 * h);
                    let uy = (north.re - south.re) / (2.0 * h);
                    let vx = (east.im - west.im) / (2.0 * h);
                    let vy = (north.im - south.im) / (2.0 * h);
                    (ux - vy).abs().max((uy + vx).abs())
                };
                comp[0] = comp[0].max(cr(e.0, w.0, nn.0, s.0));
                comp[1] = comp[1].max(cr(e.1, w.1, nn.1, s.1));
            }
        }
        Ok(Residual::new(comp, h, n.powi(3)))
    }
}

fn check_step(h: f64) -> Result<(), MapError> {
    if h > 0.0 && h <= 0.1 {
        Ok(())
    } else {
        Err(MapError::GridStep { h })
    }
}

/// Nodes `-1 + i h` with the 5-point stencil still inside `[-1, 1]`.
fn interior_nodes(h: f64) -> Vec<f64> {
    let m = (2.0 / h).round() as i64;
    (1..m).map(|i| -1.0 + i as f64 * h).filter(|x| x.abs() + h <= 1.0 + 1e-12).collect()
}

/// Maximum finite-difference residual over the interior grid of `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub max: f64,
    pub per_component: [f64; 2],
    pub grid_step: f64,
    /// `max / (h² · scale)`, with scale `n⁴` (Laplacian) or `n³` (Cauchy–Riemann).
    pub constant: f64,
}

impl Residual {
    fn new(per_component: [f64; 2], h: f64, scale: f64) -> Self {
        let max = per_component[0].max(per_component[1]);
        Residual { max, per_component, grid_step: h, constant: max / (h * h * scale) }
    }
}

/// `x1 ↦ (x1, sin(x1)·cosh(n y0)/cosh n + mid)` on `[-n, n]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageCurve {
    pub n: u32,
    pub y0: f64,
    pub mid: f64,
}

impl ImageCurve {
    pub fn domain(&self) -> Interval {
        Interval::new(-(self.n as f64), self.n as f64)
    }

    pub fn amplitude(&self) -> f64 {
        cosh_ratio(self.n as f64, self.y0)
    }

    pub fn eval(&self, x1: f64) -> Point2 {
        Point2::new(x1, x1.sin() * self.amplitude() + self.mid)
    }

    /// Interval enclosure of the curve's height over `x1 ∈ x`.
    pub fn enclose(&self, x: Interval) -> Interval {
        let n = self.n as f64;
        let ny = Interval::point(n) * Interval::point(self.y0);
        let amp = ny.cosh() / Interval::point(n).cosh();
        x.sin() * Interval::new(amp.lo, amp.hi.min(1.0)) + self.mid
    }
}

/// `{sin(x1)·ρ : x1 ∈ X, ρ ∈ [sech n, 1]}`, relative to the mid-line.
/// `sech` encloses `sech n`, which is strictly positive even when its
/// enclosure underflows to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub sin: Interval,
    pub sech: Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisjointRule {
    /// The outer enclosures are separated.
    Separated,
    /// `sin > 0` on the piece, so the band is strictly positive, while the
    /// extent lies at or below the mid-line.
    PositiveBand,
    /// Mirror image of `PositiveBand`.
    NegativeBand,
}

impl Band {
    pub fn outer(&self) -> Interval {
        self.sin * Interval::new(self.sech.lo, 1.0)
    }

    /// Proves the band disjoint from the closed `extent` (mid-relative).
    pub fn avoids(&self, extent: &Interval) -> Option<DisjointRule> {
        let outer = self.outer();
        if outer.lo > extent.hi || outer.hi < extent.lo {
            Some(DisjointRule::Separated)
        } else if self.sin.lo > 0.0 && extent.hi <= 0.0 {
            Some(DisjointRule::PositiveBand)
        } else if self.sin.hi < 0.0 && extent.lo >= 0.0 {
            Some(DisjointRule::NegativeBand)
        } else {
            None
        }
    }

    /// Proves the band strictly inside the open interval `allowed`.
    pub fn inside_open(&self, allowed: &Interval) -> bool {
        let outer = self.outer();
        outer.lo > allowed.lo && outer.hi < allowed.hi
    }

    /// Subset of the true band at a single abscissa.
    pub fn inner(&self) -> Option<Interval> {
        let s = self.sin;
        if s.lo > 0.0 {
            Interval::try_new((Interval::point(s.hi) * self.sech.hi).hi, s.lo)
        } else if s.hi < 0.0 {
            Interval::try_new(s.hi, (Interval::point(s.lo) * self.sech.hi).lo)
        } else if s.lo == 0.0 && s.hi == 0.0 {
            Some(Interval::ZERO)
        } else {
            None
        }
    }
}

const DEFAULT_BAND_DEPTH: u32 = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ContainmentOutcome {
    Contained,
    NotContained {
        /// A point of `f_n(Q)` outside `D`.
        witness: Point2,
        /// Approximate preimage of the witness in `Q`.
        preimage: Option<[f64; 2]>,
    },
    Unknown,
}

/// One disjointness record: on abscissae `abscissa`, the mid-relative band
/// avoids the obstacle's mid-relative vertical extent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandCheck {
    pub obstacle: usize,
    pub abscissa: Interval,
    pub band_offset: Interval,
    pub extent_offset: Interval,
    pub rule: DisjointRule,
}

/// The band stays strictly inside the strip on each listed piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripCheck {
    pub abscissa: Interval,
    pub band_offset: Interval,
    pub allowed_offset: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentCertificate {
    pub n: u32,
    pub domain: String,
    pub mid: f64,
    pub inclusion_chain: String,
    pub outcome: ContainmentOutcome,
    pub strip_checks: Vec<StripCheck>,
    pub checks: Vec<BandCheck>,
}

impl ContainmentCertificate {
    pub fn is_contained(&self) -> bool {
        matches!(self.outcome, ContainmentOutcome::Contained)
    }

    /// Re-checks every stored record against `domain` without searching:
    /// each stored band must enclose the recomputed band, each stored
    /// extent must enclose the obstacle's recomputed extent, the disjointness
    /// rule must still apply, and the pieces must cover `[-n, n]` and every
    /// obstacle's part of it.
    pub fn revalidate(&self, domain: &DomainSpec) -> Result<(), String> {
        let family = WitnessFamily::new(self.n, domain.strip.mid).map_err(|e| e.to_string())?;
        if self.mid != domain.strip.mid {
            return Err(format!("n = {}: mid-line mismatch", self.n));
        }
        match &self.outcome {
            ContainmentOutcome::Contained => {}
            ContainmentOutcome::NotContained { witness, .. } => {
                if domain.contains(*witness) {
                    return Err(format!("n = {}: stored witness {:?} lies in D", self.n, witness));
                }
                return Ok(());
            }
            ContainmentOutcome::Unknown => return Ok(()),
        }
        let range = family_range(self.n);
        let allowed = strip_offsets(domain);
        let mut strip_pieces = Vec::new();
        for c in &self.strip_checks {
            let band = family.band_enclosure(c.abscissa);
            if !c.band_offset.contains_interval(&band.outer()) || c.allowed_offset != allowed {
                return Err(format!("n = {}: strip record on {} does not recompute", self.n, c.abscissa));
            }
            if !band.inside_open(&allowed) {
                return Err(format!("n = {}: strip record on {} fails", self.n, c.abscissa));
            }
            strip_pieces.push(c.abscissa);
        }
        if !covers(&strip_pieces, &range) {
            return Err(format!("n = {}: strip records do not cover [-n, n]", self.n));
        }
        for (index, o) in domain.obstacles.iter().enumerate() {
            let Some(part) = o.x_range().intersect(&range) else { continue };
            let mut pieces = Vec::new();
            for c in self.checks.iter().filter(|c| c.obstacle == index) {
                let band = family.band_enclosure(c.abscissa);
                let extent = obstacle_offset_extent(o, c.abscissa, domain.strip.mid)
                    .ok_or_else(|| format!("n = {}: record for obstacle {index} misses it", self.n))?;
                if !c.band_offset.contains_interval(&band.outer()) || !c.extent_offset.contains_interval(&extent) {
                    return Err(format!("n = {}: record for obstacle {index} on {} does not recompute", self.n, c.abscissa));
                }
                if band.avoids(&extent) != Some(c.rule) {
                    return Err(format!("n = {}: disjointness for obstacle {index} on {} fails", self.n, c.abscissa));
                }
                pieces.push(c.abscissa);
            }
            if !covers(&pieces, &part) {
                return Err(format!("n = {}: obstacle {index} not fully checked", self.n));
            }
        }
        Ok(())
    }
}

fn family_range(n: u32) -> Interval {
    Interval::new(-(n as f64), n as f64)
}

fn strip_offsets(domain: &DomainSpec) -> Interval {
    let mid = Interval::point(domain.strip.mid);
    Interval::new((Interval::point(domain.strip.y_lo) - mid).hi, (Interval::point(domain.strip.y_hi) - mid).lo)
}

fn obstacle_offset_extent(o: &Obstacle, x: Interval, mid: f64) -> Option<Interval> {
    let e = o.outer_extent(x)?;
    let mid = Interval::point(mid);
    Some(Interval::new((Interval::point(e.lo) - mid).lo, (Interval::point(e.hi) - mid).hi))
}

/// Do the closed `pieces` cover `target`?
fn covers(pieces: &[Interval], target: &Interval) -> bool {
    let mut sorted: Vec<Interval> = pieces.to_vec();
    sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut reach = target.lo;
    let mut started = false;
    for p in sorted {
        if p.lo > reach {
            return false;
        }
        if p.hi >= reach {
            started = true;
            reach = p.hi;
        }
        if started && reach >= target.hi {
            return true;
        }
    }
    false
}

/// Abscissae in `x` where `sin` attains `±1`, as doubles.
fn sine_extrema_in(x: Interval) -> Vec<f64> {
    use std::f64::consts::{FRAC_PI_2, PI};
    let first = ((x.lo - FRAC_PI_2) / PI).ceil() as i64;
    let last = ((x.hi - FRAC_PI_2) / PI).floor() as i64;
    (first..=last).map(|m| FRAC_PI_2 + m as f64 * PI).filter(|t| x.contains(*t)).collect()
}

fn preimage(family: &WitnessFamily, p: Point2) -> Option<[f64; 2]> {
    let n = family.nf();
    let x = p.x1 / n;
    let s = p.x1.sin();
    if s == 0.0 {
        return Some([x, 0.0]);
    }
    let rho = (p.x2 - family.mid) / s;
    let c = rho * n.cosh();
    (c.is_finite() && c >= 1.0).then(|| [x, (c.acosh() / n).min(1.0)])
}

pub fn verify_containment_with(family: &WitnessFamily, domain: &DomainSpec, depth: u32) -> ContainmentCertificate {
    let n = family.n;
    let range = family_range(n);
    let mid = domain.strip.mid;
    let mut cert = ContainmentCertificate {
        n,
        domain: domain.name.clone(),
        mid,
        inclusion_chain: INCLUSION_CHAIN.to_string(),
        outcome: ContainmentOutcome::Contained,
        strip_checks: Vec::new(),
        checks: Vec::new(),
    };
    let not_contained = |witness: Point2| ContainmentOutcome::NotContained { witness, preimage: preimage(family, witness) };

    // strip: the band must stay in the open strip
    let allowed = strip_offsets(domain);
    let mut stack = vec![(range, 0u32)];
    let mut unknown = false;
    while let Some((piece, d)) = stack.pop() {
        let band = family.band_enclosure(piece);
        if band.inside_open(&allowed) {
            cert.strip_checks.push(StripCheck { abscissa: piece, band_offset: band.outer(), allowed_offset: allowed });
            continue;
        }
        for t in sine_extrema_in(piece).into_iter().chain([piece.lo, piece.mid(), piece.hi]) {
            let Some(inner) = family.band_enclosure(Interval::point(t)).inner() else { continue };
            let y = if inner.lo <= allowed.lo {
                Some(inner.lo.max(-f64::MAX))
            } else if inner.hi >= allowed.hi {
                Some(inner.hi)
            } else {
                None
            };
            if let Some(y) = y {
                let p = Point2::new(t, (Interval::point(y) + mid).mid());
                if !domain.contains(p) {
                    cert.outcome = not_contained(p);
                    return cert;
                }
            }
        }
        if d >= depth {
            unknown = true;
            continue;
        }
        let (a, b) = piece.split();
        stack.push((b, d + 1));
        stack.push((a, d + 1));
    }

    for (index, o) in domain.obstacles.iter().enumerate() {
        let Some(part) = o.x_range().intersect(&range) else { continue };
        let mut stack = vec![(part, 0u32)];
        while let Some((piece, d)) = stack.pop() {
            let band = family.band_enclosure(piece);
            let extent = obstacle_offset_extent(o, piece, mid).expect("piece meets obstacle");
            if let Some(rule) = band.avoids(&extent) {
                cert.checks.push(BandCheck {
                    obstacle: index,
                    abscissa: piece,
                    band_offset: band.outer(),
                    extent_offset: extent,
                    rule,
                });
                continue;
            }
            let probes = o.probe_in(piece).into_iter().chain([piece.mid()]);
            for t in probes {
                let Some(inner) = family.band_enclosure(Interval::point(t)).inner() else { continue };
                let Some(column) = o.inner_column(t) else { continue };
                let col = Interval::new(
                    (Interval::point(column.lo) - mid).hi,
                    (Interval::point(column.hi) - mid).lo,
                );
                if let Some(overlap) = inner.intersect(&col) {
                    let p = Point2::new(t, (Interval::point(overlap.mid()) + mid).mid());
                    if !domain.contains(p) {
                        cert.outcome = not_contained(p);
                        return cert;
                    }
                }
            }
            if piece.is_point() || d >= depth {
                unknown = true;
                continue;
            }
            let (a, b) = piece.split();
            stack.push((b, d + 1));
            stack.push((a, d + 1));
        }
    }
    if unknown {
        cert.outcome = ContainmentOutcome::Unknown;
    }
    cert
}

pub fn eval_f(n: u32, z: Complex64) -> Point2 {
    WitnessFamily { n, mid: 2.0 }.eval_f(z)
}

pub fn jac_f(n: u32, z: Complex64) -> Matrix2 {
    WitnessFamily { n, mid: 2.0 }.jac_f(z)
}

pub fn eval_g(n: u32, z: Complex64) -> (Complex64, Complex64) {
    WitnessFamily { n, mid: 2.0 }.eval_g(z)
}
