//! CSV tables and SVG figures.

use std::fmt::Write;

use crate::geometry::{Anchor, DomainSpec, Obstacle};
use crate::interval::Interval;
use crate::kobayashi::ObstructionCertificate;
use crate::witness_maps::WitnessFamily;

const SAMPLES_PER_UNIT: f64 = 40.0;

/// `x1,band_lo,band_hi` rows over `[-n, n]`.
pub fn band_csv(family: &WitnessFamily) -> String {
    let n = family.n as f64;
    let steps = (2.0 * n * SAMPLES_PER_UNIT).ceil().max(200.0) as usize;
    let mut out = String::from("x1,band_lo,band_hi\n");
    for i in 0..=steps {
        let x1 = (-n + 2.0 * n * i as f64 / steps as f64).clamp(-n, n);
        let band = family.image_band(x1).expect("sample lies in [-n, n]");
        writeln!(out, "{x1:?},{:?},{:?}", band.lo, band.hi).unwrap();
    }
    out
}

/// `n,op_norm,frobenius,closed_form,upper_bound,containment` rows.
pub fn metric_scan_csv(cert: &ObstructionCertificate) -> String {
    let mut out = String::from("n,op_norm,frobenius,closed_form,upper_bound,containment\n");
    for r in &cert.rows {
        let upper = r.kobayashi_upper.map_or(String::new(), |u| format!("{u:?}"));
        let status = match r.containment.outcome {
            crate::witness_maps::ContainmentOutcome::Contained => "contained",
            crate::witness_maps::ContainmentOutcome::NotContained { .. } => "not_contained",
            crate::witness_maps::ContainmentOutcome::Unknown => "unknown",
        };
        writeln!(out, "{},{:?},{:?},{:?},{upper},{status}", r.n, r.op_norm_df, r.frobenius_df, r.closed_form).unwrap();
    }
    out
}

struct Frame {
    x: Interval,
    y: Interval,
    width: f64,
    height: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        (x - self.x.lo) / self.x.width() * self.width
    }

    fn py(&self, y: f64) -> f64 {
        (self.y.hi - y) / self.y.width() * self.height
    }

    fn path(&self, pts: &[(f64, f64)]) -> String {
        let mut d = String::new();
        for (i, (x, y)) in pts.iter().enumerate() {
            write!(d, "{}{:.3},{:.3} ", if i == 0 { "M" } else { "L" }, self.px(*x), self.py(*y)).unwrap();
        }
        d
    }
}

/// Strip, obstacles, the graphs of `sin x1 + mid` and `sin x1 / cosh n + mid`,
/// and the band between them over `[-n, n]`.
pub fn figure_svg(domain: &DomainSpec, family: &WitnessFamily) -> String {
    let n = family.n as f64;
    let reach = domain.obstacle_x_extent().map_or(n, |e| e.mag().max(n)) + 0.5;
    let strip = domain.strip;
    let pad = 0.15 * (strip.y_hi - strip.y_lo);
    let frame = Frame {
        x: Interval::new(-reach, reach),
        y: Interval::new(strip.y_lo - pad, strip.y_hi + pad),
        width: 960.0,
        height: 960.0 * (strip.y_hi - strip.y_lo + 2.0 * pad) / (2.0 * reach),
    };
    let frame = Frame { height: frame.height.clamp(240.0, 720.0), ..frame };
    let sample = |lo: f64, hi: f64, f: &dyn Fn(f64) -> f64| -> Vec<(f64, f64)> {
        let steps = ((hi - lo) * SAMPLES_PER_UNIT).ceil().max(2.0) as usize;
        (0..=steps).map(|i| lo + (hi - lo) * i as f64 / steps as f64).map(|x| (x, f(x))).collect()
    };
    let upper_curve = family.image_curve(1.0).expect("y0 = 1 is valid");
    let lower_curve = family.image_curve(0.0).expect("y0 = 0 is valid");

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#,
        w = frame.width,
        h = frame.height
    )
    .unwrap();
    writeln!(svg, r#"<title>{} with the image band of f_{}</title>"#, xml_escape(&domain.name), family.n).unwrap();
    writeln!(
        svg,
        r##"<rect x="0" y="{:.3}" width="{:.3}" height="{:.3}" fill="#f4f4f4"/>"##,
        frame.py(strip.y_hi),
        frame.width,
        frame.py(strip.y_lo) - frame.py(strip.y_hi)
    )
    .unwrap();

    let mut band: Vec<(f64, f64)> = sample(-n, n, &|x| upper_curve.eval(x).x2);
    let mut lower = sample(-n, n, &|x| lower_curve.eval(x).x2);
    lower.reverse();
    band.extend(lower);
    writeln!(svg, r##"<path class="band" d="{}Z" fill="#9ecae1" fill-opacity="0.6" stroke="none"/>"##, frame.path(&band)).unwrap();

    for y in [strip.y_lo, strip.y_hi] {
        writeln!(
            svg,
            r##"<line class="strip" x1="0" y1="{y:.3}" x2="{w:.3}" y2="{y:.3}" stroke="#000" stroke-width="1.5"/>"##,
            y = frame.py(y),
            w = frame.width
        )
        .unwrap();
    }
    writeln!(
        svg,
        r##"<line class="mid" x1="0" y1="{y:.3}" x2="{w:.3}" y2="{y:.3}" stroke="#888" stroke-dasharray="4 4"/>"##,
        y = frame.py(strip.mid),
        w = frame.width
    )
    .unwrap();

    for o in &domain.obstacles {
        match o {
            Obstacle::Slit(s) => {
                writeln!(
                    svg,
                    r##"<line class="slit" x1="{x:.3}" y1="{a:.3}" x2="{x:.3}" y2="{b:.3}" stroke="#b22222" stroke-width="3"/>"##,
                    x = frame.px(s.x),
                    a = frame.py(s.span.lo),
                    b = frame.py(s.span.hi)
                )
                .unwrap();
            }
            Obstacle::Tooth(t) => {
                let sign = match t.anchor {
                    Anchor::Lower => 1.0,
                    Anchor::Upper => -1.0,
                };
                let mut pts = sample(t.foot.lo, t.foot.hi, &|x| {
                    t.base + sign * t.height(Interval::point(x)).map_or(0.0, |h| h.mid())
                });
                pts.push((t.foot.hi, t.base));
                pts.push((t.foot.lo, t.base));
                writeln!(svg, r##"<path class="tooth" d="{}Z" fill="#b22222" fill-opacity="0.8" stroke="#7f1717"/>"##, frame.path(&pts)).unwrap();
            }
        }
    }

    let full = |f: &dyn Fn(f64) -> f64| sample(-reach, reach, f);
    let mid = strip.mid;
    writeln!(svg, r##"<path class="sine" d="{}" fill="none" stroke="#08519c" stroke-width="1.5"/>"##, frame.path(&full(&|x| x.sin() + mid))).unwrap();
    writeln!(
        svg,
        r##"<path class="sine-scaled" d="{}" fill="none" stroke="#08519c" stroke-width="1.5" stroke-dasharray="6 3"/>"##,
        frame.path(&full(&|x| lower_curve.eval(x).x2))
    )
    .unwrap();
    writeln!(
        svg,
        r##"<circle class="base" cx="{:.3}" cy="{:.3}" r="4" fill="#000"/>"##,
        frame.px(0.0),
        frame.py(mid)
    )
    .unwrap();
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
