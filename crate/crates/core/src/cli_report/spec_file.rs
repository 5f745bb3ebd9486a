//! Domain-spec files (TOML).
//!
//! ```toml
//! name = "my-domain"          # optional
//! preset = "fig1"             # optional: "fig1", "fig2" or "strip"
//!
//! [strip]                     # optional, defaults to y_lo = 0, y_hi = 4, mid = 2
//! y_lo = 0
//! y_hi = 4
//! mid = 2
//!
//! [validation]                # optional
//! connectivity_resolution = 0.01
//! sine_check_depth = 30
//!
//! [[obstacles]]
//! kind = "slit"
//! x = "pi/2"
//! span = [0, 2]
//!
//! [[obstacles]]
//! kind = "tooth"
//! anchor = "upper"            # "lower" or "upper"
//! foot = ["-pi/2 - 1", "-pi/2 + 1"]
//! apex_x = "-pi/2"
//! sharpness = 1.0             # optional
//! ```
//!
//! Numeric fields accept numbers or strings of terms joined by `+`/`-`,
//! each term a number, `pi`, `3pi`, `pi/2`, `3pi/2` or `1/3`. A multiple of
//! `pi` over a power of two evaluates to the same double as `c * PI / d`.
//! The `fig2` preset accepts exactly four `tooth` obstacles in the order
//! `S1..S4`, replacing the default teeth.

use std::f64::consts::PI;
use std::ops::Range;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;
use toml::{Spanned, Table, Value};

use crate::geometry::{
    build_figure1, build_figure2, figure2_default_teeth, Anchor, DomainSpec, GeometryError, Obstacle, ObstacleParams,
    Strip, ToothParams, ValidationOptions, VerticalSlit,
};
use crate::interval::Interval;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}, field `{field}`: {message}")]
    Field { line: usize, field: String, message: String },
    #[error("invalid domain: {0}")]
    Geometry(#[from] GeometryError),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    name: Option<String>,
    preset: Option<Spanned<String>>,
    strip: Option<Spanned<Table>>,
    validation: Option<Spanned<Table>>,
    obstacles: Option<Vec<Spanned<Table>>>,
}

/// A parsed spec before geometric validation.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSpec {
    pub name: String,
    pub preset: Option<String>,
    pub strip: Strip,
    pub validation: ValidationOptions,
    pub obstacles: Vec<ObstacleParams>,
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn line(&self, span: &Range<usize>) -> usize {
        self.text[..span.start.min(self.text.len())].matches('\n').count() + 1
    }

    fn field_err(&self, span: &Range<usize>, field: impl Into<String>, message: impl Into<String>) -> SpecError {
        SpecError::Field { line: self.line(span), field: field.into(), message: message.into() }
    }
}

/// Evaluates a number or a `pi` expression string.
pub fn eval_number(v: &Value) -> Result<f64, String> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        Value::String(s) => eval_expr(s),
        other => Err(format!("expected a number or expression string, found {}", other.type_str())),
    }
}

/// Evaluates a `pi` expression such as `-3pi/2 + 1`.
pub fn eval_expr(s: &str) -> Result<f64, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty expression".into());
    }
    let mut total = 0.0;
    let mut rest = compact.as_str();
    let mut first = true;
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'+' => (1.0, &rest[1..]),
            b'-' => (-1.0, &rest[1..]),
            _ if first => (1.0, rest),
            _ => return Err(format!("unexpected `{rest}` in {s:?}")),
        };
        let end = body[1.min(body.len())..].find(['+', '-']).map_or(body.len(), |i| i + 1);
        let (term, tail) = body.split_at(end);
        // exponents such as 1e-3 contain a sign that is not an operator
        let (term, tail) = if term.ends_with(['e', 'E']) && !term.contains("pi") {
            let more = tail[1..].find(['+', '-']).map_or(tail.len(), |i| i + 1);
            (&body[..end + more], &tail[more..])
        } else {
            (term, tail)
        };
        total += sign * eval_term(term).map_err(|e| format!("{e} in {s:?}"))?;
        rest = tail;
        first = false;
    }
    Ok(total)
}

fn eval_term(t: &str) -> Result<f64, String> {
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, Some(d.parse::<f64>().map_err(|_| format!("bad denominator `{d}`"))?)),
        None => (t, None),
    };
    let value = if let Some(coef) = num.strip_suffix("pi") {
        let c = match coef {
            "" => 1.0,
            c => c.trim_end_matches('*').parse::<f64>().map_err(|_| format!("bad coefficient `{c}`"))?,
        };
        c * PI
    } else {
        num.parse::<f64>().map_err(|_| format!("bad term `{t}`"))?
    };
    match den {
        Some(0.0) => Err("division by zero".into()),
        Some(d) => Ok(value / d),
        None => Ok(value),
    }
}

fn take_number(ctx: &Ctx, table: &Table, span: &Range<usize>, path: &str, key: &str) -> Result<Option<f64>, SpecError> {
    let Some(v) = table.get(key) else { return Ok(None) };
    let x = eval_number(v).map_err(|m| ctx.field_err(span, format!("{path}.{key}"), m))?;
    if !x.is_finite() {
        return Err(ctx.field_err(span, format!("{path}.{key}"), "value must be finite"));
    }
    Ok(Some(x))
}

fn require_number(ctx: &Ctx, table: &Table, span: &Range<usize>, path: &str, key: &str) -> Result<f64, SpecError> {
    take_number(ctx, table, span, path, key)?.ok_or_else(|| ctx.field_err(span, format!("{path}.{key}"), "missing field"))
}

fn require_pair(ctx: &Ctx, table: &Table, span: &Range<usize>, path: &str, key: &str) -> Result<Interval, SpecError> {
    let field = format!("{path}.{key}");
    let v = table.get(key).ok_or_else(|| ctx.field_err(span, &field, "missing field"))?;
    let arr = v.as_array().ok_or_else(|| ctx.field_err(span, &field, "expected a two-element array [lo, hi]"))?;
    if arr.len() != 2 {
        return Err(ctx.field_err(span, &field, format!("expected two elements, found {}", arr.len())));
    }
    let lo = eval_number(&arr[0]).map_err(|m| ctx.field_err(span, &field, m))?;
    let hi = eval_number(&arr[1]).map_err(|m| ctx.field_err(span, &field, m))?;
    Interval::try_new(lo, hi).ok_or_else(|| ctx.field_err(span, &field, format!("lo {lo} exceeds hi {hi}")))
}

fn reject_unknown(ctx: &Ctx, table: &Table, span: &Range<usize>, path: &str, allowed: &[&str]) -> Result<(), SpecError> {
    match table.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(ctx.field_err(span, format!("{path}.{k}"), format!("unknown field; expected one of {allowed:?}"))),
        None => Ok(()),
    }
}

fn parse_obstacle(ctx: &Ctx, index: usize, entry: &Spanned<Table>) -> Result<ObstacleParams, SpecError> {
    let span = entry.span();
    let table = entry.get_ref();
    let path = format!("obstacles[{index}]");
    let kind = table
        .get("kind")
        .ok_or_else(|| ctx.field_err(&span, format!("{path}.kind"), "missing field"))?
        .as_str()
        .ok_or_else(|| ctx.field_err(&span, format!("{path}.kind"), "expected a string"))?;
    match kind {
        "slit" => {
            reject_unknown(ctx, table, &span, &path, &["kind", "x", "span"])?;
            let x = require_number(ctx, table, &span, &path, "x")?;
            let span_iv = require_pair(ctx, table, &span, &path, "span")?;
            Ok(ObstacleParams::Slit(VerticalSlit { x, span: span_iv }))
        }
        "tooth" => {
            reject_unknown(ctx, table, &span, &path, &["kind", "anchor", "foot", "apex_x", "sharpness"])?;
            let anchor = match table.get("anchor").and_then(Value::as_str) {
                Some("lower") => Anchor::Lower,
                Some("upper") => Anchor::Upper,
                Some(other) => {
                    return Err(ctx.field_err(&span, format!("{path}.anchor"), format!("unknown anchor {other:?}; expected \"lower\" or \"upper\"")))
                }
                None => return Err(ctx.field_err(&span, format!("{path}.anchor"), "missing or non-string field")),
            };
            let foot = require_pair(ctx, table, &span, &path, "foot")?;
            let apex_x = require_number(ctx, table, &span, &path, "apex_x")?;
            let sharpness = take_number(ctx, table, &span, &path, "sharpness")?.unwrap_or(1.0);
            Ok(ObstacleParams::Tooth(ToothParams { anchor, foot, apex_x, sharpness }))
        }
        other => Err(ctx.field_err(&span, format!("{path}.kind"), format!("unknown obstacle kind {other:?}; expected \"slit\" or \"tooth\""))),
    }
}

pub fn parse_spec_str(text: &str) -> Result<ParsedSpec, SpecError> {
    let ctx = Ctx { text };
    let file: SpecFile = toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(1, |s| ctx.line(&s));
        SpecError::Syntax { line, message: e.message().to_string() }
    })?;

    let mut strip = Strip::default();
    if let Some(st) = &file.strip {
        let span = st.span();
        reject_unknown(&ctx, st.get_ref(), &span, "strip", &["y_lo", "y_hi", "mid"])?;
        let t = st.get_ref();
        strip.y_lo = take_number(&ctx, t, &span, "strip", "y_lo")?.unwrap_or(strip.y_lo);
        strip.y_hi = take_number(&ctx, t, &span, "strip", "y_hi")?.unwrap_or(strip.y_hi);
        strip.mid = take_number(&ctx, t, &span, "strip", "mid")?.unwrap_or(0.5 * (strip.y_lo + strip.y_hi));
    }
    let mut validation = ValidationOptions::default();
    if let Some(v) = &file.validation {
        let span = v.span();
        let t = v.get_ref();
        reject_unknown(&ctx, t, &span, "validation", &["connectivity_resolution", "sine_check_depth"])?;
        if let Some(r) = take_number(&ctx, t, &span, "validation", "connectivity_resolution")? {
            if r <= 0.0 {
                return Err(ctx.field_err(&span, "validation.connectivity_resolution", "must be positive"));
            }
            validation.connectivity_resolution = r;
        }
        if let Some(d) = t.get("sine_check_depth") {
            validation.sine_check_depth = d
                .as_integer()
                .and_then(|d| u32::try_from(d).ok())
                .ok_or_else(|| ctx.field_err(&span, "validation.sine_check_depth", "expected a nonnegative integer"))?;
        }
    }
    let obstacles = file
        .obstacles
        .iter()
        .flatten()
        .enumerate()
        .map(|(i, o)| parse_obstacle(&ctx, i, o))
        .collect::<Result<Vec<_>, _>>()?;

    let preset = match &file.preset {
        None => None,
        Some(p) => {
            let name = p.get_ref().as_str();
            let span = p.span();
            match name {
                "fig1" | "fig2" | "strip" => {}
                other => {
                    return Err(ctx.field_err(&span, "preset", format!("unknown preset {other:?}; expected \"fig1\", \"fig2\" or \"strip\"")))
                }
            }
            if name != "strip" && file.strip.is_some() {
                return Err(ctx.field_err(&span, "strip", format!("preset {name:?} fixes the strip")));
            }
            if name != "fig2" && !obstacles.is_empty() {
                return Err(ctx.field_err(&span, "obstacles", format!("preset {name:?} takes no obstacles")));
            }
            Some(name.to_string())
        }
    };
    let name = file.name.clone().or_else(|| preset.clone()).unwrap_or_else(|| "custom".to_string());
    Ok(ParsedSpec { name, preset, strip, validation, obstacles })
}

impl ParsedSpec {
    pub fn build(&self) -> Result<DomainSpec, SpecError> {
        let mut domain = match self.preset.as_deref() {
            Some("fig1") => build_figure1(),
            Some("fig2") if self.obstacles.is_empty() => build_figure2(&figure2_default_teeth())?,
            Some("fig2") => {
                let teeth: Vec<ToothParams> = self
                    .obstacles
                    .iter()
                    .filter_map(|o| match o {
                        ObstacleParams::Tooth(t) => Some(*t),
                        ObstacleParams::Slit(_) => None,
                    })
                    .collect();
                let teeth: [ToothParams; 4] = teeth.try_into().map_err(|_| SpecError::Field {
                    line: 1,
                    field: "obstacles".into(),
                    message: "preset \"fig2\" needs exactly four tooth obstacles".into(),
                })?;
                if self.obstacles.len() != 4 {
                    return Err(SpecError::Field { line: 1, field: "obstacles".into(), message: "preset \"fig2\" takes only teeth".into() });
                }
                build_figure2(&teeth)?
            }
            Some(_) | None => DomainSpec::new(self.name.clone(), self.strip, &self.obstacles, &self.validation)?,
        };
        if self.preset.is_some() {
            domain.name = self.name.clone();
        }
        Ok(domain)
    }
}

pub fn parse_spec(path: &Path) -> Result<DomainSpec, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io { path: path.display().to_string(), source })?;
    parse_spec_str(&text)?.build()
}

pub fn preset(name: &str) -> Option<DomainSpec> {
    match name {
        "fig1" => Some(build_figure1()),
        "fig2" => build_figure2(&figure2_default_teeth()).ok(),
        "strip" => DomainSpec::bare_strip(Strip::default()).ok(),
        _ => None,
    }
}

/// Renders a domain as a spec file that parses back to the same domain.
pub fn to_spec_toml(domain: &DomainSpec) -> String {
    let num = |x: f64| format!("{x:?}");
    let mut out = format!(
        "name = {:?}\n\n[strip]\ny_lo = {}\ny_hi = {}\nmid = {}\n",
        domain.name,
        num(domain.strip.y_lo),
        num(domain.strip.y_hi),
        num(domain.strip.mid)
    );
    for o in &domain.obstacles {
        out.push_str("\n[[obstacles]]\n");
        match o {
            Obstacle::Slit(s) => {
                out.push_str(&format!("kind = \"slit\"\nx = {}\nspan = [{}, {}]\n", num(s.x), num(s.span.lo), num(s.span.hi)));
            }
            Obstacle::Tooth(t) => {
                let anchor = match t.anchor {
                    Anchor::Lower => "lower",
                    Anchor::Upper => "upper",
                };
                out.push_str(&format!(
                    "kind = \"tooth\"\nanchor = \"{anchor}\"\nfoot = [{}, {}]\napex_x = {}\nsharpness = {}\n",
                    num(t.foot.lo),
                    num(t.foot.hi),
                    num(t.apex_x),
                    num(t.sharpness)
                ));
            }
        }
    }
    out
}
