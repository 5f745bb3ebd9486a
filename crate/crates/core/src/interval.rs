//! Closed real intervals with outward-rounded arithmetic.
//!
//! Basic operations (`+`, `-`, `*`, `/`, `sqrt`) are correctly rounded in
//! IEEE-754, so the rounding direction of each bound is recovered exactly
//! from an error-free transformation (two-sum / fma residual). A result is
//! only widened when it was actually inexact, which keeps exact zeros and
//! small integers exact; several containment proofs depend on that.
//!
//! Transcendental functions come from the platform libm and are widened by
//! [`LIBM_ULPS`] units in the last place, except at arguments with an exact
//! known value (`exp(0) = 1`, `sin(0) = 0`, ...). Range analysis for the
//! periodic and even functions locates interior critical points instead of
//! evaluating at the endpoints only.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Ulps of slack granted to every libm result.
pub const LIBM_ULPS: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "extended")]
    pub lo: f64,
    #[serde(with = "extended")]
    pub hi: f64,
}

/// Bounds may be infinite; JSON has no infinity, so those are written as
/// the strings `"inf"` and `"-inf"`.
mod extended {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            Err(serde::ser::Error::custom("NaN interval bound"))
        } else {
            s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" })
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) if t == "-inf" => Ok(f64::NEG_INFINITY),
            Repr::Text(t) => Err(de::Error::custom(format!("invalid interval bound {t:?}"))),
        }
    }
}

fn down(x: f64) -> f64 {
    if x == f64::INFINITY {
        f64::MAX
    } else {
        x.next_down()
    }
}

fn up(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        f64::MIN
    } else {
        x.next_up()
    }
}

fn widen_down(x: f64, ulps: u32) -> f64 {
    (0..ulps).fold(x, |acc, _| down(acc))
}

fn widen_up(x: f64, ulps: u32) -> f64 {
    (0..ulps).fold(x, |acc, _| up(acc))
}

/// Error of `a + b` after rounding, as the sign of `exact - rounded`.
fn add_round(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    if !s.is_finite() {
        return (s, 0.0);
    }
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

fn add_down(a: f64, b: f64) -> f64 {
    let (s, e) = add_round(a, b);
    if s == f64::INFINITY && a.is_finite() && b.is_finite() {
        return f64::MAX;
    }
    if e < 0.0 {
        down(s)
    } else {
        s
    }
}

fn add_up(a: f64, b: f64) -> f64 {
    let (s, e) = add_round(a, b);
    if s == f64::NEG_INFINITY && a.is_finite() && b.is_finite() {
        return f64::MIN;
    }
    if e > 0.0 {
        up(s)
    } else {
        s
    }
}

fn mul_round(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    if !p.is_finite() || p == 0.0 {
        // 0 * x is exact; a zero from underflow is handled by the caller.
        return (p, 0.0);
    }
    (p, a.mul_add(b, -p))
}

fn mul_down(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let (p, e) = mul_round(a, b);
    if p == 0.0 {
        // underflow: the exact product is a tiny number of known sign
        return if (a > 0.0) == (b > 0.0) { 0.0 } else { -f64::from_bits(1) };
    }
    if p == f64::INFINITY {
        return f64::MAX;
    }
    if e < 0.0 {
        down(p)
    } else {
        p
    }
}

fn mul_up(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let (p, e) = mul_round(a, b);
    if p == 0.0 {
        return if (a > 0.0) == (b > 0.0) { f64::from_bits(1) } else { 0.0 };
    }
    if p == f64::NEG_INFINITY {
        return f64::MIN;
    }
    if e > 0.0 {
        up(p)
    } else {
        p
    }
}

/// Sign of `a/b - fl(a/b)` via the exact remainder `a - q*b`.
fn div_round(a: f64, b: f64) -> (f64, f64) {
    let q = a / b;
    if !q.is_finite() || q == 0.0 || !a.is_finite() {
        return (q, 0.0);
    }
    let r = (-q).mul_add(b, a);
    // exact quotient = q + r/b
    let sign = if b > 0.0 { r } else { -r };
    (q, sign)
}

fn div_down(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let (q, e) = div_round(a, b);
    if q == 0.0 && a.is_finite() && b.is_finite() {
        return if (a > 0.0) == (b > 0.0) { 0.0 } else { -f64::from_bits(1) };
    }
    if q == f64::INFINITY && a.is_finite() {
        return f64::MAX;
    }
    if e < 0.0 {
        down(q)
    } else {
        q
    }
}

fn div_up(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let (q, e) = div_round(a, b);
    if q == 0.0 && a.is_finite() && b.is_finite() {
        return if (a > 0.0) == (b > 0.0) { f64::from_bits(1) } else { 0.0 };
    }
    if q == f64::NEG_INFINITY && a.is_finite() {
        return f64::MIN;
    }
    if e > 0.0 {
        up(q)
    } else {
        q
    }
}

fn sqrt_down(x: f64) -> f64 {
    let s = x.sqrt();
    if s == 0.0 || !s.is_finite() {
        return s;
    }
    if (-s).mul_add(s, x) < 0.0 {
        down(s)
    } else {
        s
    }
}

fn sqrt_up(x: f64) -> f64 {
    let s = x.sqrt();
    if s == 0.0 || !s.is_finite() {
        return s;
    }
    if (-s).mul_add(s, x) > 0.0 {
        up(s)
    } else {
        s
    }
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    pub const UNIT: Interval = Interval { lo: -1.0, hi: 1.0 };

    /// Panics when `lo > hi` or either bound is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "invalid interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn try_new(lo: f64, hi: f64) -> Option<Self> {
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Interval hull of two unordered endpoints.
    pub fn spanning(a: f64, b: f64) -> Self {
        Interval { lo: a.min(b), hi: a.max(b) }
    }

    /// Smallest interval of doubles containing `num / den`.
    pub fn ratio(num: f64, den: f64) -> Self {
        Interval { lo: div_down(num, den), hi: div_up(num, den) }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Closed intervals sharing at least one point.
    pub fn meets(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        Interval::try_new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn split(&self) -> (Interval, Interval) {
        let m = self.mid();
        (Interval { lo: self.lo, hi: m }, Interval { lo: m, hi: self.hi })
    }

    pub fn abs(&self) -> Interval {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            -*self
        } else {
            Interval { lo: 0.0, hi: self.mag() }
        }
    }

    pub fn sqr(&self) -> Interval {
        let a = self.abs();
        Interval { lo: mul_down(a.lo, a.lo), hi: mul_up(a.hi, a.hi) }
    }

    pub fn sqrt(&self) -> Interval {
        let lo = self.lo.max(0.0);
        let hi = self.hi.max(0.0);
        Interval { lo: sqrt_down(lo), hi: sqrt_up(hi) }
    }

    /// Reciprocal; an interval containing zero maps to the whole line.
    pub fn recip(&self) -> Interval {
        if self.lo > 0.0 || self.hi < 0.0 {
            Interval { lo: div_down(1.0, self.hi), hi: div_up(1.0, self.lo) }
        } else if self.lo == 0.0 && self.hi > 0.0 {
            Interval { lo: div_down(1.0, self.hi), hi: f64::INFINITY }
        } else if self.hi == 0.0 && self.lo < 0.0 {
            Interval { lo: f64::NEG_INFINITY, hi: div_up(1.0, self.lo) }
        } else {
            Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
        }
    }

    pub fn exp(&self) -> Interval {
        let lo = if self.lo == 0.0 {
            1.0
        } else if self.lo == f64::NEG_INFINITY {
            0.0
        } else {
            widen_down(self.lo.exp(), LIBM_ULPS).max(0.0)
        };
        let hi = if self.hi == 0.0 {
            1.0
        } else if self.hi == f64::NEG_INFINITY {
            0.0
        } else {
            widen_up(self.hi.exp(), LIBM_ULPS)
        };
        Interval { lo, hi }
    }

    pub fn cosh(&self) -> Interval {
        let eval_lo = |x: f64| {
            if x == 0.0 {
                1.0
            } else {
                widen_down(x.cosh(), LIBM_ULPS).max(1.0)
            }
        };
        let eval_hi = |x: f64| if x == 0.0 { 1.0 } else { widen_up(x.cosh(), LIBM_ULPS) };
        if self.contains(0.0) {
            Interval { lo: 1.0, hi: eval_hi(self.lo).max(eval_hi(self.hi)) }
        } else {
            let (near, far) = if self.lo > 0.0 { (self.lo, self.hi) } else { (self.hi, self.lo) };
            Interval { lo: eval_lo(near), hi: eval_hi(far) }
        }
    }

    pub fn sinh(&self) -> Interval {
        let lo = if self.lo == 0.0 { 0.0 } else { widen_down(self.lo.sinh(), LIBM_ULPS) };
        let hi = if self.hi == 0.0 { 0.0 } else { widen_up(self.hi.sinh(), LIBM_ULPS) };
        Interval { lo, hi }
    }

    pub fn sin(&self) -> Interval {
        periodic_range(self, f64::sin, FRAC_PI_2, -FRAC_PI_2, true)
    }

    pub fn cos(&self) -> Interval {
        periodic_range(self, f64::cos, 0.0, PI, false)
    }

    /// `self` plus an exact scalar.
    pub fn add_scalar(&self, c: f64) -> Interval {
        Interval { lo: add_down(self.lo, c), hi: add_up(self.hi, c) }
    }

    pub fn mul_scalar(&self, c: f64) -> Interval {
        *self * Interval::point(c)
    }

    pub fn div_scalar(&self, c: f64) -> Interval {
        *self / Interval::point(c)
    }
}

/// Does `[a, b]` contain `phase + 2πm` for some integer `m`? Errs on the
/// side of "yes" when a critical point sits within rounding distance of an
/// endpoint, which only widens the enclosure.
fn contains_critical(a: f64, b: f64, phase: f64) -> bool {
    let slack = 1e-9;
    let lo = (a - phase) / TAU - slack;
    let hi = (b - phase) / TAU + slack;
    lo.ceil() <= hi.floor()
}

fn periodic_range(x: &Interval, f: fn(f64) -> f64, max_at: f64, min_at: f64, odd: bool) -> Interval {
    if !x.lo.is_finite() || !x.hi.is_finite() || x.width() >= TAU {
        return Interval::UNIT;
    }
    let eval = |t: f64| -> Interval {
        if t == 0.0 {
            let v = if odd { 0.0 } else { 1.0 };
            Interval::point(v)
        } else {
            let v = f(t);
            Interval {
                lo: widen_down(v, LIBM_ULPS).max(-1.0),
                hi: widen_up(v, LIBM_ULPS).min(1.0),
            }
        }
    };
    let ea = eval(x.lo);
    if x.is_point() {
        return ea;
    }
    let eb = eval(x.hi);
    let mut out = ea.hull(&eb);
    if contains_critical(x.lo, x.hi, max_at) {
        out.hi = 1.0;
    }
    if contains_critical(x.lo, x.hi, min_at) {
        out.lo = -1.0;
    }
    out
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval { lo: add_down(self.lo, rhs.lo), hi: add_up(self.hi, rhs.hi) }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        self + (-rhs)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let pairs = [(self.lo, rhs.lo), (self.lo, rhs.hi), (self.hi, rhs.lo), (self.hi, rhs.hi)];
        let lo = pairs.iter().map(|&(a, b)| mul_down(a, b)).fold(f64::INFINITY, f64::min);
        let hi = pairs.iter().map(|&(a, b)| mul_up(a, b)).fold(f64::NEG_INFINITY, f64::max);
        Interval { lo, hi }
    }
}

impl Div for Interval {
    type Output = Interval;
    fn div(self, rhs: Interval) -> Interval {
        if rhs.lo > 0.0 || rhs.hi < 0.0 {
            let pairs = [(self.lo, rhs.lo), (self.lo, rhs.hi), (self.hi, rhs.lo), (self.hi, rhs.hi)];
            let lo = pairs.iter().map(|&(a, b)| div_down(a, b)).fold(f64::INFINITY, f64::min);
            let hi = pairs.iter().map(|&(a, b)| div_up(a, b)).fold(f64::NEG_INFINITY, f64::max);
            Interval { lo, hi }
        } else {
            self * rhs.recip()
        }
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, rhs: f64) -> Interval {
        self.add_scalar(rhs)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    fn sub(self, rhs: f64) -> Interval {
        self.add_scalar(-rhs)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, rhs: f64) -> Interval {
        self.mul_scalar(rhs)
    }
}

impl Div<f64> for Interval {
    type Output = Interval;
    fn div(self, rhs: f64) -> Interval {
        self.div_scalar(rhs)
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
