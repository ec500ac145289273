//! Canonical instance document and report documents.
//!
//! An instance document is JSON with top-level fields `k` (integer),
//! `gamma` (rational string, optional, default `"1"`), `metric`, and
//! `requests`. The metric object carries `type` (`"line"`, `"dmax"`, or
//! `"dhc"`); explicit kinds add `n` (integer) and `dist`, a
//! strictly-lower-triangular matrix of rational strings (row `i` holds the
//! distances to points `0..i`, so row 0 is empty). Each request carries
//! `id` (integer), `atime` (rational string), and `pos` — a rational
//! coordinate string for `"line"`, an integer point index otherwise. Line
//! documents store coordinates directly and carry no point list: the point
//! set is the set of distinct coordinates. All rationals are strings like
//! `"101/100"`; counts and indices are plain integers.
//!
//! [`save_instance`] emits a canonical form: fields in a fixed order,
//! `gamma` always present, rationals rendered in lowest terms.
//! `load(save(x))` structurally equals `x`.
//!
//! # Examples
//! ```
//! use kmpmd_cli::formats::{load_instance, save_instance};
//!
//! let doc = r#"{
//!   "k": 2,
//!   "metric": { "type": "line" },
//!   "requests": [
//!     { "id": 0, "atime": "0", "pos": "0" },
//!     { "id": 1, "atime": "0", "pos": "1" }
//!   ]
//! }"#;
//! let inst = load_instance(doc).unwrap();
//! assert_eq!(inst.m(), 2);
//! let canonical = save_instance(&inst);
//! assert_eq!(load_instance(&canonical).unwrap(), inst);
//! ```

use std::fmt;

use kmpmd_core::gdk::AuditReport;
use kmpmd_core::instances::{Instance, InstanceError, Request};
use kmpmd_core::metrics::{
    BasePairMetric, MetricError, MetricGuards, MetricSpace, SpaceBase, SpaceKind,
};
use kmpmd_core::numerics::{int, parse_rational, render_rational, Rational};
use serde::{Deserialize, Serialize};

/// Errors from reading or interpreting a document.
#[derive(Debug)]
pub enum FormatError {
    /// Not valid JSON or wrong shape.
    Json(String),
    /// Valid JSON but semantically malformed (unknown metric type, bad
    /// rational, wrong position kind, ...).
    Doc(String),
    /// Document parsed but the instance itself is invalid.
    Instance(InstanceError),
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Json(msg) => write!(f, "invalid document: {msg}"),
            FormatError::Doc(msg) => write!(f, "malformed document: {msg}"),
            FormatError::Instance(e) => write!(f, "invalid instance: {e}"),
        }
    }
}

impl std::error::Error for FormatError {}

impl From<InstanceError> for FormatError {
    fn from(e: InstanceError) -> Self {
        FormatError::Instance(e)
    }
}

impl From<MetricError> for FormatError {
    fn from(e: MetricError) -> Self {
        FormatError::Instance(InstanceError::Metric(e))
    }
}

/// Request position: integer point index (explicit spaces) or rational
/// coordinate string (line spaces).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PosDoc {
    Index(usize),
    Coord(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequestDoc {
    pub id: u32,
    pub atime: String,
    pub pos: PosDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricDoc {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<String>,
    pub metric: MetricDoc,
    pub requests: Vec<RequestDoc>,
}

fn doc_rational(field: &str, text: &str) -> Result<Rational, FormatError> {
    parse_rational(text)
        .map_err(|e| FormatError::Doc(format!("{field}: cannot parse {text:?}: {e:?}")))
}

/// Parses and validates an instance document.
pub fn load_instance(text: &str) -> Result<Instance, FormatError> {
    let doc: InstanceDoc =
        serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))?;
    instance_from_doc(&doc)
}

/// Builds a validated instance from a parsed document.
pub fn instance_from_doc(doc: &InstanceDoc) -> Result<Instance, FormatError> {
    let gamma = match &doc.gamma {
        Some(text) => doc_rational("gamma", text)?,
        None => int(1),
    };
    let guards = MetricGuards::default();
    let (space, positions) = match doc.metric.kind.as_str() {
        "line" => {
            if doc.metric.n.is_some() || doc.metric.dist.is_some() {
                return Err(FormatError::Doc(
                    "line metric takes no n or dist field".into(),
                ));
            }
            let mut coords = Vec::new();
            for r in &doc.requests {
                match &r.pos {
                    PosDoc::Coord(text) => {
                        coords.push(doc_rational("pos", text)?);
                    }
                    PosDoc::Index(_) => {
                        return Err(FormatError::Doc(format!(
                            "request {}: line pos must be a rational coordinate string",
                            r.id
                        )));
                    }
                }
            }
            let mut points = coords.clone();
            points.sort();
            points.dedup();
            let positions: Vec<usize> = coords
                .iter()
                .map(|c| points.binary_search(c).expect("coord is in the point set"))
                .collect();
            let space = MetricSpace::new(
                SpaceBase::Line { coords: points },
                doc.k,
                gamma,
                &guards,
            )?;
            (space, positions)
        }
        kind @ ("dmax" | "dhc") => {
            let n = doc.metric.n.ok_or_else(|| {
                FormatError::Doc(format!("{kind} metric requires an n field"))
            })?;
            let rows_text = doc.metric.dist.as_ref().ok_or_else(|| {
                FormatError::Doc(format!("{kind} metric requires a dist matrix"))
            })?;
            if rows_text.len() != n {
                return Err(FormatError::Doc(format!(
                    "dist has {} rows, expected n = {n}",
                    rows_text.len()
                )));
            }
            let mut rows = Vec::with_capacity(n);
            for (i, row) in rows_text.iter().enumerate() {
                let mut parsed = Vec::with_capacity(row.len());
                for text in row {
                    parsed.push(doc_rational(&format!("dist row {i}"), text)?);
                }
                rows.push(parsed);
            }
            let base = BasePairMetric::from_lower_triangular(&rows)?;
            let space = match kind {
                "dmax" => MetricSpace::new(SpaceBase::Dmax(base), doc.k, gamma, &guards)?,
                _ => MetricSpace::new(SpaceBase::Dhc(base), doc.k, gamma, &guards)?,
            };
            let mut positions = Vec::with_capacity(doc.requests.len());
            for r in &doc.requests {
                match &r.pos {
                    PosDoc::Index(p) => positions.push(*p),
                    PosDoc::Coord(_) => {
                        return Err(FormatError::Doc(format!(
                            "request {}: {kind} pos must be an integer point index",
                            r.id
                        )));
                    }
                }
            }
            (space, positions)
        }
        other => {
            return Err(FormatError::Doc(format!(
                "unknown metric type {other:?} (expected line, dmax, or dhc)"
            )));
        }
    };
    let mut requests = Vec::with_capacity(doc.requests.len());
    for (r, pos) in doc.requests.iter().zip(positions) {
        requests.push(Request {
            id: r.id,
            atime: doc_rational("atime", &r.atime)?,
            pos,
        });
    }
    Ok(Instance::new(space, requests)?)
}

/// Canonical document for an instance.
pub fn instance_to_doc(instance: &Instance) -> InstanceDoc {
    let space = instance.space();
    let metric = match space.base() {
        SpaceBase::Line { .. } => MetricDoc {
            kind: "line".into(),
            n: None,
            dist: None,
        },
        SpaceBase::Dmax(base) | SpaceBase::Dhc(base) => MetricDoc {
            kind: match space.kind() {
                SpaceKind::DmaxOverBase => "dmax".into(),
                _ => "dhc".into(),
            },
            n: Some(base.len()),
            dist: Some(
                base.lower_triangular()
                    .iter()
                    .map(|row| row.iter().map(render_rational).collect())
                    .collect(),
            ),
        },
    };
    let requests = instance
        .requests()
        .iter()
        .map(|r| RequestDoc {
            id: r.id,
            atime: render_rational(&r.atime),
            pos: match space.coord(r.pos) {
                Some(c) => PosDoc::Coord(render_rational(c)),
                None => PosDoc::Index(r.pos),
            },
        })
        .collect();
    InstanceDoc {
        k: instance.k(),
        gamma: Some(render_rational(space.gamma())),
        metric,
        requests,
    }
}

/// Renders the canonical document text (pretty JSON, trailing newline).
pub fn save_instance(instance: &Instance) -> String {
    let mut text = serde_json::to_string_pretty(&instance_to_doc(instance))
        .expect("document serialization cannot fail");
    text.push('\n');
    text
}

/// One audit outcome in a report document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditDoc {
    pub name: String,
    /// `"pass"`, `"fail"`, or `"skipped"`.
    pub status: String,
    pub checks: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl AuditDoc {
    pub fn from_report(report: &AuditReport) -> Self {
        AuditDoc {
            name: report.name.to_string(),
            status: if report.passed { "pass" } else { "fail" }.to_string(),
            checks: report.checks,
            violations: report.violations.clone(),
            notes: report.notes.clone(),
        }
    }

    pub fn skipped(name: &str, why: String) -> Self {
        AuditDoc {
            name: name.to_string(),
            status: "skipped".to_string(),
            checks: 0,
            violations: Vec::new(),
            notes: vec![why],
        }
    }

    pub fn failed(&self) -> bool {
        self.status == "fail"
    }
}

/// The `instance` section of a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSummaryDoc {
    pub m: usize,
    pub k: usize,
    pub gamma: String,
    pub metric: String,
    pub points: usize,
}

impl InstanceSummaryDoc {
    pub fn new(instance: &Instance) -> Self {
        let space = instance.space();
        InstanceSummaryDoc {
            m: instance.m(),
            k: instance.k(),
            gamma: render_rational(space.gamma()),
            metric: space.kind().to_string(),
            points: space.len(),
        }
    }
}

/// One matched group in the `result` section.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDoc {
    pub ids: Vec<u32>,
    pub time: String,
    pub dist: String,
    pub wait: String,
}

/// The `result` section: what the engine did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultDoc {
    pub rate: String,
    pub alg: String,
    pub dist: String,
    pub wait: String,
    pub dual: String,
    pub events: usize,
    pub groups: Vec<GroupDoc>,
}

/// The `bounds` section: the competitive inequalities, evaluated exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsDoc {
    /// `(4mk + k^2) * gamma * D'`.
    pub general_bound: String,
    pub general_ok: bool,
    /// Whether the refined bound applies (line and d_max spaces).
    pub refined_applicable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refined_bound: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refined_ok: Option<bool>,
    /// Set when the run used a non-default rate, where the bounds are not
    /// guaranteed.
    pub rate_overridden: bool,
}

/// Report document: the four fixed sections.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub instance: InstanceSummaryDoc,
    pub result: ResultDoc,
    pub audits: Vec<AuditDoc>,
    pub bounds: BoundsDoc,
}

impl ReportDoc {
    pub fn any_violation(&self) -> bool {
        self.audits.iter().any(|a| a.failed())
            || !self.bounds.general_ok
            || self.bounds.refined_ok == Some(false)
    }
}

/// Renders any report-style document as pretty JSON with a trailing
/// newline.
pub fn render_json<T: Serialize>(doc: &T) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("report serialization cannot fail");
    text.push('\n');
    text
}
