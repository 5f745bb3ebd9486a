//! Command-line front end: domain loading, analysis orchestration and the
//! JSON/CSV/SVG artifacts.
//!
//! Exit codes: 0 success, 1 usage or configuration, 2 spec validation or a
//! failed verification, 3 budget exhaustion or an inconsistent report.

pub mod document;
pub mod plot;
pub mod spec_file;

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::geometry::{DomainSpec, Point2, ValidationOptions};
use crate::kobayashi::{hyperbolicity_report, HyperbolicityConfig, MetricError};
use crate::predicates::PredicateError;
use crate::witness_maps::{ContainmentOutcome, WitnessFamily};
use document::{CertificateDocument, DocumentError};
use spec_file::SpecError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

pub const PRESETS: [&str; 3] = ["fig1", "fig2", "strip"];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Spec(#[from] SpecError),
    #[error("base point ({x1}, {x2}) is not in domain `{domain}`")]
    PointOutside { domain: String, x1: f64, x2: f64 },
    #[error("analysis failed: {0}")]
    Analysis(#[from] MetricError),
    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Document(#[from] DocumentError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Spec(SpecError::Io { .. }) => EXIT_USAGE,
            CliError::Spec(_) | CliError::PointOutside { .. } | CliError::Document(_) => EXIT_VALIDATION,
            CliError::Analysis(MetricError::BaseOutside { .. } | MetricError::Predicate(PredicateError::BaseOutside { .. })) => {
                EXIT_VALIDATION
            }
            CliError::Analysis(_) => EXIT_USAGE,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainSource {
    Preset(String),
    Spec(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub json: bool,
    pub csv: bool,
    pub svg: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Formats { json: true, csv: true, svg: true }
    }
}

impl Formats {
    /// Parses a comma-separated list such as `json,csv`.
    pub fn parse(list: &str) -> Result<Self, CliError> {
        let mut f = Formats { json: false, csv: false, svg: false };
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "json" => f.json = true,
                "csv" => f.csv = true,
                "svg" => f.svg = true,
                other => return Err(CliError::Usage(format!("unknown format `{other}` (expected json, csv or svg)"))),
            }
        }
        if !(f.json || f.csv || f.svg) {
            return Err(CliError::Usage("--format selects no output".into()));
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: DomainSource,
    pub point: Point2,
    pub max_k: u32,
    pub max_n: u32,
    pub depth: u32,
    pub seed: u64,
    pub out: PathBuf,
    pub formats: Formats,
    /// `n` of the band drawn in `figure.svg`.
    pub plot_n: u32,
}

impl RunConfig {
    pub fn new(source: DomainSource, point: Point2) -> Self {
        let defaults = HyperbolicityConfig::default();
        RunConfig {
            source,
            point,
            max_k: defaults.max_k,
            max_n: defaults.max_n,
            depth: defaults.limits.depth,
            seed: defaults.limits.seed,
            out: PathBuf::from("."),
            formats: Formats::default(),
            plot_n: 3,
        }
    }

    pub fn check(&self) -> Result<(), CliError> {
        for (name, v) in [("--K", self.max_k), ("--N", self.max_n), ("--depth", self.depth), ("--n", self.plot_n)] {
            if v == 0 {
                return Err(CliError::Usage(format!("{name} must be at least 1")));
            }
        }
        if self.max_n > crate::witness_maps::DEFAULT_MAX_N {
            return Err(CliError::Usage(format!("--N must be at most {}", crate::witness_maps::DEFAULT_MAX_N)));
        }
        if !(self.point.x1.is_finite() && self.point.x2.is_finite()) {
            return Err(CliError::Usage("--point must be finite".into()));
        }
        Ok(())
    }

    pub fn hyperbolicity_config(&self) -> HyperbolicityConfig {
        let mut c = HyperbolicityConfig { max_k: self.max_k, max_n: self.max_n, ..HyperbolicityConfig::default() };
        c.limits.depth = self.depth;
        c.limits.seed = self.seed;
        c
    }
}

/// Parses `x,y`.
pub fn parse_point(s: &str) -> Result<Point2, CliError> {
    let bad = || CliError::Usage(format!("--point expects `x,y`, got `{s}`"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    let x1: f64 = spec_file::eval_expr(x.trim()).map_err(|_| bad())?;
    let x2: f64 = spec_file::eval_expr(y.trim()).map_err(|_| bad())?;
    Ok(Point2::new(x1, x2))
}

pub fn load_domain(source: &DomainSource) -> Result<(DomainSpec, ValidationOptions), CliError> {
    match source {
        DomainSource::Preset(name) => {
            let domain = spec_file::preset(name)
                .ok_or_else(|| CliError::Usage(format!("unknown preset `{name}` (expected one of {})", PRESETS.join(", "))))?;
            Ok((domain, ValidationOptions::default()))
        }
        DomainSource::Spec(path) => {
            let text = fs::read_to_string(path).map_err(|source| SpecError::Io { path: path.display().to_string(), source })?;
            let parsed = spec_file::parse_spec_str(&text)?;
            Ok((parsed.build()?, parsed.validation))
        }
    }
}

#[derive(Debug)]
pub struct AnalyzeOutput {
    pub document: CertificateDocument,
    pub written: Vec<PathBuf>,
    pub exit_code: u8,
    pub warnings: Vec<String>,
}

/// Runs the full analysis and writes the selected artifacts. Files are
/// written only once everything has been computed.
pub fn cmd_analyze(config: &RunConfig) -> Result<AnalyzeOutput, CliError> {
    config.check()?;
    let (domain, validation) = load_domain(&config.source)?;
    if !domain.contains(config.point) {
        return Err(CliError::PointOutside { domain: domain.name.clone(), x1: config.point.x1, x2: config.point.x2 });
    }
    let hc = config.hyperbolicity_config();
    let report = hyperbolicity_report(&domain, config.point, &hc)?;

    let mut warnings = Vec::new();
    if let Some(cert) = &report.obstruction {
        for row in &cert.rows {
            if row.containment.outcome == ContainmentOutcome::Unknown {
                warnings.push(format!("containment of f_{} undecided within the depth budget", row.n));
            }
        }
    }
    for check in report.diagram.iter().filter(|c| !c.holds) {
        warnings.push(format!("diagram check failed: {} ({})", check.statement, check.detail));
    }

    let document = CertificateDocument::new(domain.clone(), report, hc, validation);
    let mut files: Vec<(PathBuf, String)> = Vec::new();
    if config.formats.json {
        files.push((config.out.join("certificate.json"), document.to_canonical_json()));
    }
    if config.formats.csv {
        if let Some(cert) = &document.report.obstruction {
            files.push((config.out.join("metric_scan.csv"), plot::metric_scan_csv(cert)));
        }
    }
    let family = WitnessFamily::new(config.plot_n, domain.strip.mid).map_err(|e| CliError::Usage(e.to_string()))?;
    if config.formats.csv {
        files.push((config.out.join("band.csv"), plot::band_csv(&family)));
    }
    if config.formats.svg {
        files.push((config.out.join("figure.svg"), plot::figure_svg(&domain, &family)));
    }
    let written = write_all(&config.out, files)?;
    let exit_code = if warnings.is_empty() { EXIT_OK } else { EXIT_BUDGET };
    Ok(AnalyzeOutput { document, written, exit_code, warnings })
}

/// Writes the band figure and band samples for `f_n`.
pub fn cmd_plot(source: &DomainSource, n: u32, out: &Path, formats: Formats) -> Result<Vec<PathBuf>, CliError> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let (domain, _) = load_domain(source)?;
    let family = WitnessFamily::new(n, domain.strip.mid).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut files = Vec::new();
    if formats.svg {
        files.push((out.join("figure.svg"), plot::figure_svg(&domain, &family)));
    }
    if formats.csv {
        files.push((out.join("band.csv"), plot::band_csv(&family)));
    }
    write_all(out, files)
}

/// Parses and fully re-verifies a certificate document.
pub fn cmd_verify(path: &Path) -> Result<CertificateDocument, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let doc = CertificateDocument::parse(&text)?;
    doc.verify(Some(&text))?;
    Ok(doc)
}

/// Every preset rendered as an equivalent spec file.
pub fn cmd_presets() -> String {
    let mut out = String::new();
    for name in PRESETS {
        let domain = spec_file::preset(name).expect("built-in presets are valid");
        out.push_str(&format!("# preset = \"{name}\"\n"));
        out.push_str(&spec_file::to_spec_toml(&domain));
        out.push('\n');
    }
    out
}

fn write_all(dir: &Path, files: Vec<(PathBuf, String)>) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::with_capacity(files.len());
    for (path, body) in files {
        fs::write(&path, body).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_and_formats() {
        assert_eq!(parse_point("0,2").unwrap(), Point2::new(0.0, 2.0));
        assert_eq!(parse_point(" pi/2 , 1.5 ").unwrap(), Point2::new(std::f64::consts::FRAC_PI_2, 1.5));
        assert!(parse_point("0;2").is_err());
        let f = Formats::parse("json,svg").unwrap();
        assert!(f.json && f.svg && !f.csv);
        assert_eq!(Formats::parse("pdf").unwrap_err().exit_code(), EXIT_USAGE);
    }

    #[test]
    fn point_outside_is_a_validation_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = RunConfig::new(DomainSource::Preset("fig1".into()), Point2::new(10.0, 10.0));
        cfg.out = dir.path().to_path_buf();
        let err = cmd_analyze(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_VALIDATION);
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn zero_budgets_are_usage_errors() {
        let mut cfg = RunConfig::new(DomainSource::Preset("fig1".into()), Point2::new(0.0, 2.0));
        cfg.max_k = 0;
        assert_eq!(cmd_analyze(&cfg).unwrap_err().exit_code(), EXIT_USAGE);
        let dir = tempfile::tempdir().unwrap();
        let err = cmd_plot(&DomainSource::Preset("fig1".into()), 0, dir.path(), Formats::default()).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_USAGE);
    }

    #[test]
    fn unknown_preset() {
        assert_eq!(load_domain(&DomainSource::Preset("fig3".into())).unwrap_err().exit_code(), EXIT_USAGE);
    }

    #[test]
    fn presets_listing_round_trips() {
        let listing = cmd_presets();
        for chunk in listing.split("# preset = ").skip(1) {
            let body = chunk.split_once('\n').unwrap().1;
            let domain = spec_file::parse_spec_str(body).unwrap().build().unwrap();
            assert!(PRESETS.iter().any(|p| spec_file::preset(p).unwrap() == domain));
        }
    }

    #[test]
    fn strip_analysis_verifies() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = RunConfig::new(DomainSource::Preset("strip".into()), Point2::new(0.0, 2.0));
        cfg.max_k = 4;
        cfg.max_n = 5;
        cfg.out = dir.path().to_path_buf();
        let out = cmd_analyze(&cfg).unwrap();
        assert_eq!(out.exit_code, EXIT_OK);
        assert_eq!(out.document.report.property_jpaff.verdict, crate::predicates::Verdict::FailsUpToK);
        assert_eq!(out.written.len(), 4);
        cmd_verify(&dir.path().join("certificate.json")).unwrap();
    }
}
