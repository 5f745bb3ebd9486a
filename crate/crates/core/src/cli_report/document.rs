//! The certificate document: a canonical JSON file bundling the domain, the
//! full report and everything needed to re-check it.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::geometry::{DomainSpec, Point2, ValidationOptions};
use crate::kobayashi::{affine_gap, diagram_checks, HyperbolicityConfig, HyperbolicityReport};
use crate::predicates::{check_implications, reverify_report, ToleranceSchedule};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_NAME: &str = "tubelab";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl ToolInfo {
    pub fn current() -> Self {
        ToolInfo { name: TOOL_NAME.into(), version: env!("CARGO_PKG_VERSION").into() }
    }
}

/// Everything that determines the report: all budgets, schedules and seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reproducibility {
    pub config: HyperbolicityConfig,
    pub validation: ValidationOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub domain: DomainSpec,
    pub base_point: Point2,
    pub report: HyperbolicityReport,
    pub reproducibility: Reproducibility,
    /// SHA-256 of the canonical document with this field empty.
    pub checksum: String,
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("stale schema_version {found} (expected {expected}); regenerate the document with `tubelab analyze` using the same spec and budgets listed in its reproducibility block")]
    StaleSchema { found: u64, expected: u32 },
    #[error("missing schema_version")]
    MissingSchema,
    #[error("document is not in canonical form")]
    NotCanonical,
    #[error("checksum mismatch (stored {stored}, computed {computed})")]
    Checksum { stored: String, computed: String },
    #[error("verification failed at {item}: {reason}")]
    Failed { item: String, reason: String },
}

impl CertificateDocument {
    pub fn new(domain: DomainSpec, report: HyperbolicityReport, config: HyperbolicityConfig, validation: ValidationOptions) -> Self {
        let mut doc = CertificateDocument {
            schema_version: SCHEMA_VERSION,
            tool: ToolInfo::current(),
            base_point: report.base_point,
            domain,
            report,
            reproducibility: Reproducibility { config, validation },
            checksum: String::new(),
        };
        doc.checksum = doc.compute_checksum();
        doc
    }

    /// Pretty-printed JSON in declaration order with shortest round-trip floats.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn compute_checksum(&self) -> String {
        let mut unsealed = self.clone();
        unsealed.checksum.clear();
        hex::encode(Sha256::digest(unsealed.to_canonical_json().as_bytes()))
    }

    /// Parses a document, rejecting other schema versions before anything else.
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let raw: serde_json::Value = serde_json::from_str(text)?;
        match raw.get("schema_version").and_then(serde_json::Value::as_u64) {
            None => return Err(DocumentError::MissingSchema),
            Some(v) if v != SCHEMA_VERSION as u64 => return Err(DocumentError::StaleSchema { found: v, expected: SCHEMA_VERSION }),
            Some(_) => {}
        }
        Ok(serde_json::from_str(text)?)
    }

    /// Full re-verification without searching: form, checksum, domain
    /// validity, every witness and refutation, the obstruction rows, the
    /// metric bounds and the diagram checks.
    pub fn verify(&self, text: Option<&str>) -> Result<(), DocumentError> {
        let fail = |item: &str, reason: String| DocumentError::Failed { item: item.into(), reason };
        if let Some(text) = text {
            if self.to_canonical_json() != text {
                return Err(DocumentError::NotCanonical);
            }
        }
        let computed = self.compute_checksum();
        if computed != self.checksum {
            return Err(DocumentError::Checksum { stored: self.checksum.clone(), computed });
        }
        self.domain.validate(&self.reproducibility.validation).map_err(|e| fail("domain", e.to_string()))?;
        let rep = &self.report;
        if rep.domain != self.domain.name || rep.base_point != self.base_point {
            return Err(fail("report", "report is for a different domain or base point".into()));
        }
        let cfg = &self.reproducibility.config;
        let graph = &cfg.limits.graph;
        for (item, r, schedule) in [
            ("property_l", &rep.property_l, cfg.schedule),
            ("property_jpaff", &rep.property_jpaff, ToleranceSchedule::Reciprocal),
            ("property_jp", &rep.property_jp, ToleranceSchedule::Reciprocal),
        ] {
            if r.base_point != self.base_point || r.max_k != cfg.max_k {
                return Err(fail(item, "base point or K differs from the configuration".into()));
            }
            reverify_report(&self.domain, r, schedule, graph).map_err(|e| fail(item, e))?;
        }
        check_implications(&rep.property_l, &rep.property_jpaff).map_err(|e| fail("diagram", e))?;
        if let Some(cert) = &rep.obstruction {
            if cert.rows.len() != cfg.max_n as usize || cert.a != self.base_point {
                return Err(fail("obstruction", "rows do not match N or the base point".into()));
            }
            cert.revalidate(&self.domain, &cfg.scan).map_err(|e| fail("obstruction", e))?;
        }
        for (i, s) in rep.metric_samples.iter().enumerate() {
            if s.sample.base != self.base_point {
                return Err(fail(&format!("metric_samples[{i}]"), "sample is not at the base point".into()));
            }
            s.revalidate(&self.domain, graph).map_err(|e| fail(&format!("metric_samples[{i}]"), e))?;
        }
        let diagram = diagram_checks(&rep.property_l, &rep.property_jpaff, &rep.property_jp, &rep.metric_samples);
        if diagram != rep.diagram {
            return Err(fail("diagram", "diagram checks do not recompute".into()));
        }
        if affine_gap(rep.obstruction.as_ref(), &rep.property_jpaff) != rep.affine_gap {
            return Err(fail("affine_gap", "flag does not recompute".into()));
        }
        Ok(())
    }
}
