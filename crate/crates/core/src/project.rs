//! JSON project files.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "goal": "Pick a supplier",
//!   "criteria": [{"id": "C1", "label": "Cost", "children": [...]}],
//!   "alternatives": [{"id": "A1", "label": "Acme"}],
//!   "judgments": [
//!     {"node": "goal", "expert": "e1", "scores": [[0, 1, -5], [0, 2, 3]]},
//!     {"node": "C2", "tfn": [[[1, 1, 1], [2, 3, 4]], [[0.25, 0.333, 0.5], [1, 1, 1]]]}
//!   ],
//!   "direct_weights": {"C11": [0.2, 0.5, 0.3]},
//!   "settings": {"defuzz": "middle", "method": "gm-middle",
//!                "cr_threshold": 0.1, "sensitivity_factor": 1.5}
//! }
//! ```
//!
//! `scores` entries are `[i, j, score]` with `i < j` indexing the node's
//! children (alternatives for a leaf criterion); a negative score favours
//! item `j`. Several entries for one node are treated as separate experts
//! and aggregated by componentwise geometric mean.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consistency::DEFAULT_THRESHOLD;
use crate::exec::Execution;
use crate::fuzzy::{Defuzz, Tfn};
use crate::hierarchy::{
    validate_hierarchy, Alternative, CriterionNode, EvalOptions, Hierarchy, NodeJudgment,
    ValidationReport, Violation,
};
use crate::judgment::{aggregate_experts, ExpertJudgmentSet, FuzzyComparisonMatrix, PairScore};
use crate::sensitivity::DEFAULT_FACTOR;
use crate::weights::DerivationMethod;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ProjectError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}{}: {message}", field_suffix(.field))]
    Parse {
        line: usize,
        column: usize,
        field: Option<String>,
        message: String,
    },
    #[error("unsupported schema_version {found} (supported: {SCHEMA_VERSION})")]
    Version { found: u32 },
    #[error("invalid project:\n{0}")]
    Invalid(ValidationReport),
}

fn field_suffix(field: &Option<String>) -> String {
    match field {
        Some(f) if f != "." => format!(" (field `{f}`)"),
        _ => String::new(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Settings {
    pub defuzz: Defuzz,
    pub method: DerivationMethod,
    pub cr_threshold: f64,
    pub sensitivity_factor: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            defuzz: Defuzz::Middle,
            method: DerivationMethod::GmMiddle,
            cr_threshold: DEFAULT_THRESHOLD,
            sensitivity_factor: DEFAULT_FACTOR,
        }
    }
}

impl Settings {
    pub fn eval_options(&self, allow_inconsistent: bool, exec: Execution) -> EvalOptions {
        EvalOptions {
            method: self.method,
            defuzz: self.defuzz,
            cr_threshold: self.cr_threshold,
            allow_inconsistent,
            exec,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixSpec {
    /// Upper-triangle precise scores.
    Scores(Vec<PairScore>),
    /// Full grid of fuzzy numbers.
    Tfn(Vec<Vec<Tfn>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgmentEntry {
    pub node: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expert: Option<String>,
    #[serde(flatten)]
    pub matrix: MatrixSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectFile {
    pub schema_version: u32,
    pub goal: String,
    pub criteria: Vec<CriterionNode>,
    pub alternatives: Vec<Alternative>,
    #[serde(default)]
    pub judgments: Vec<JudgmentEntry>,
    #[serde(default)]
    pub direct_weights: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    pub settings: Settings,
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: Option<u32>,
}

impl ProjectFile {
    /// Builds the evaluable hierarchy, reporting every problem found.
    pub fn to_hierarchy(&self) -> Result<Hierarchy, ValidationReport> {
        let mut hierarchy = Hierarchy {
            goal: self.goal.clone(),
            criteria: self.criteria.clone(),
            alternatives: self.alternatives.clone(),
            judgments: BTreeMap::new(),
        };
        let mut violations = Vec::new();
        let items_by_node: BTreeMap<String, Vec<String>> = hierarchy
            .decision_nodes()
            .into_iter()
            .map(|n| {
                (
                    n.id.to_string(),
                    n.items.iter().map(|s| s.to_string()).collect(),
                )
            })
            .collect();

        let mut grouped: BTreeMap<&str, Vec<&JudgmentEntry>> = BTreeMap::new();
        for entry in &self.judgments {
            grouped.entry(entry.node.as_str()).or_default().push(entry);
        }
        for (node, entries) in grouped {
            let Some(items) = items_by_node.get(node) else {
                violations.push(Violation::UnknownNode {
                    node: node.to_string(),
                });
                continue;
            };
            if self.direct_weights.contains_key(node) {
                violations.push(Violation::ConflictingSources {
                    node: node.to_string(),
                });
                continue;
            }
            let built: Result<Vec<_>, _> = entries
                .iter()
                .map(|e| e.build_matrix(items.clone()))
                .collect();
            match built.and_then(|ms| aggregate_experts(&ms)) {
                Ok(m) => {
                    hierarchy
                        .judgments
                        .insert(node.to_string(), NodeJudgment::Fuzzy(m));
                }
                Err(e) => violations.push(Violation::BadJudgment {
                    node: node.to_string(),
                    message: e.to_string(),
                }),
            }
        }
        for (node, values) in &self.direct_weights {
            if !items_by_node.contains_key(node) {
                violations.push(Violation::UnknownNode { node: node.clone() });
            } else if !hierarchy.judgments.contains_key(node)
                && !self.judgments.iter().any(|e| &e.node == node)
            {
                hierarchy
                    .judgments
                    .insert(node.clone(), NodeJudgment::Direct(values.clone()));
            }
        }

        let structural = validate_hierarchy(&hierarchy);
        for v in structural.violations {
            // A node whose judgments failed to build is already reported.
            let already = matches!(&v, Violation::MissingJudgment { node }
                if violations.iter().any(|x| matches!(x,
                    Violation::BadJudgment { node: n, .. } | Violation::ConflictingSources { node: n } if n == node)));
            if !already {
                violations.push(v);
            }
        }
        if !(self.settings.cr_threshold.is_finite() && self.settings.cr_threshold > 0.0) {
            violations.push(Violation::InvalidSetting {
                name: "cr_threshold".into(),
            });
        }
        if !(self.settings.sensitivity_factor.is_finite() && self.settings.sensitivity_factor > 0.0)
        {
            violations.push(Violation::InvalidSetting {
                name: "sensitivity_factor".into(),
            });
        }
        if violations.is_empty() {
            Ok(hierarchy)
        } else {
            Err(ValidationReport { violations })
        }
    }

    pub fn validate(&self) -> ValidationReport {
        match self.to_hierarchy() {
            Ok(_) => ValidationReport::default(),
            Err(r) => r,
        }
    }

    /// Replaces all judgments for `node` with one precise-score set.
    pub fn set_scores(&mut self, node: &str, expert: Option<String>, scores: Vec<PairScore>) {
        self.judgments.retain(|e| e.node != node);
        self.direct_weights.remove(node);
        self.judgments.push(JudgmentEntry {
            node: node.to_string(),
            expert,
            matrix: MatrixSpec::Scores(scores),
        });
    }
}

impl JudgmentEntry {
    fn build_matrix(
        &self,
        items: Vec<String>,
    ) -> Result<FuzzyComparisonMatrix, crate::judgment::JudgmentError> {
        match &self.matrix {
            MatrixSpec::Scores(scores) => FuzzyComparisonMatrix::from_scores(
                items,
                &ExpertJudgmentSet {
                    expert_id: self.expert.clone().unwrap_or_default(),
                    node_id: self.node.clone(),
                    upper_triangle: scores.clone(),
                },
            ),
            MatrixSpec::Tfn(grid) => FuzzyComparisonMatrix::from_grid(items, grid),
        }
    }
}

fn parse_error(e: &serde_json::Error, field: Option<String>) -> ProjectError {
    let message = e.to_string();
    // serde_json appends " at line L column C"; the location has its own fields.
    let message = match message.rfind(" at line ") {
        Some(k) => message[..k].to_string(),
        None => message,
    };
    ProjectError::Parse {
        line: e.line(),
        column: e.column(),
        field,
        message,
    }
}

/// Parses and validates a project.
pub fn load_project(bytes: &[u8]) -> Result<ProjectFile, ProjectError> {
    let probe: VersionProbe = serde_json::from_slice(bytes).map_err(|e| parse_error(&e, None))?;
    match probe.schema_version {
        Some(SCHEMA_VERSION) | None => {}
        Some(found) => return Err(ProjectError::Version { found }),
    }
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let project: ProjectFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        parse_error(e.inner(), Some(field))
    })?;
    project.to_hierarchy().map_err(ProjectError::Invalid)?;
    Ok(project)
}

pub fn load_project_path(path: impl AsRef<Path>) -> Result<ProjectFile, ProjectError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| ProjectError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_project(&bytes)
}

/// Serializes a valid project as pretty-printed JSON. Floats use the
/// shortest representation that parses back to the same value.
pub fn save_project(project: &ProjectFile) -> Result<Vec<u8>, ProjectError> {
    project.to_hierarchy().map_err(ProjectError::Invalid)?;
    let mut out = serde_json::to_vec_pretty(project).expect("project serializes");
    out.push(b'\n');
    Ok(out)
}

pub fn save_project_path(
    project: &ProjectFile,
    path: impl AsRef<Path>,
) -> Result<(), ProjectError> {
    let bytes = save_project(project)?;
    let path = path.as_ref();
    std::fs::write(path, bytes).map_err(|source| ProjectError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// A published value with the table it was read from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Published<T> {
    pub source: String,
    pub values: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublishedScalar {
    pub source: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublishedRanking {
    pub source: String,
    pub order: Vec<String>,
}

/// Reference values printed alongside the bundled dataset. Consistency
/// ratios are kept for provenance only; they cannot be re-derived from the
/// published matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedValues {
    pub name: String,
    pub main_weights: Published<BTreeMap<String, f64>>,
    pub sub_weights: BTreeMap<String, Published<BTreeMap<String, f64>>>,
    pub criterion_scores: BTreeMap<String, Published<BTreeMap<String, f64>>>,
    pub global_scores: Published<BTreeMap<String, f64>>,
    pub ranking: PublishedRanking,
    pub published_cr: BTreeMap<String, PublishedScalar>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub name: String,
    pub project: ProjectFile,
    pub expected: ExpectedValues,
}

pub const TURKIYE_JSON: &str = include_str!("../../../fixtures/turkiye.json");
const TURKIYE_EXPECTED_JSON: &str = include_str!("../../../fixtures/turkiye.expected.json");

/// Renewable-energy selection for Türkiye: 5 main criteria, 30 sub-criteria,
/// 5 alternatives. Criteria are judged by aggregated fuzzy matrices; the
/// alternatives carry published per-sub-criterion weights.
pub fn turkiye() -> Fixture {
    let project = load_project(TURKIYE_JSON.as_bytes()).expect("bundled fixture is valid");
    let expected: ExpectedValues =
        serde_json::from_str(TURKIYE_EXPECTED_JSON).expect("bundled expectations parse");
    Fixture {
        name: expected.name.clone(),
        project,
        expected,
    }
}

impl fmt::Display for ProjectFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bytes = serde_json::to_vec_pretty(self).map_err(|_| fmt::Error)?;
        f.write_str(&String::from_utf8_lossy(&bytes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
  "schema_version": 1,
  "goal": "g",
  "criteria": [
    {"id": "C1", "label": "one"},
    {"id": "C2", "label": "two"}
  ],
  "alternatives": [{"id": "A1", "label": "x"}, {"id": "A2", "label": "y"}],
  "judgments": [
    {"node": "goal", "scores": [[0, 1, 3]]},
    {"node": "C2", "tfn": [[[1, 1, 1], [2, 3, 4]], [[0.25, 0.3333333333333333, 0.5], [1, 1, 1]]]}
  ],
  "direct_weights": {"C1": [0.4, 0.6]}
}"#;

    #[test]
    fn loads_small_project_with_default_settings() {
        let p = load_project(SMALL.as_bytes()).unwrap();
        assert_eq!(p.settings, Settings::default());
        let h = p.to_hierarchy().unwrap();
        assert!(matches!(h.judgments["C2"], NodeJudgment::Fuzzy(_)));
        assert!(matches!(h.judgments["C1"], NodeJudgment::Direct(_)));
    }

    #[test]
    fn unknown_node_is_named() {
        let text = SMALL.replace(r#""node": "C2""#, r#""node": "C99""#);
        let err = load_project(text.as_bytes()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("C99"), "{msg}");
        assert!(msg.contains("C2"), "{msg}");
    }

    #[test]
    fn truncated_input_reports_location() {
        let err = load_project(&SMALL.as_bytes()[..200]).unwrap_err();
        match err {
            ProjectError::Parse { line, column, .. } => {
                assert!(line > 1);
                assert!(column > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_field_type_names_the_field() {
        let text = SMALL.replace(r#""goal": "g""#, r#""goal": 7"#);
        let err = load_project(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("goal"), "{err}");
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn unsupported_version() {
        let text = SMALL.replace(r#""schema_version": 1"#, r#""schema_version": 7"#);
        assert!(matches!(
            load_project(text.as_bytes()),
            Err(ProjectError::Version { found: 7 })
        ));
    }

    #[test]
    fn conflicting_and_incomplete_judgments() {
        let mut p = load_project(SMALL.as_bytes()).unwrap();
        p.direct_weights.insert("C2".into(), vec![0.5, 0.5]);
        let r = p.validate();
        assert!(r
            .violations
            .contains(&Violation::ConflictingSources { node: "C2".into() }));

        let mut p = load_project(SMALL.as_bytes()).unwrap();
        p.set_scores("goal", None, vec![]);
        let r = p.validate();
        assert_eq!(r.violations.len(), 1);
        assert!(
            matches!(&r.violations[0], Violation::BadJudgment { node, message }
            if node == "goal" && message.contains("(0, 1)"))
        );
    }

    #[test]
    fn empty_alternatives_refused_on_save() {
        let mut p = load_project(SMALL.as_bytes()).unwrap();
        p.alternatives.clear();
        p.direct_weights.clear();
        p.judgments.retain(|j| j.node == "goal");
        assert!(matches!(save_project(&p), Err(ProjectError::Invalid(_))));
    }

    #[test]
    fn tfn_grid_round_trips_exactly() {
        let p = load_project(SMALL.as_bytes()).unwrap();
        let again = load_project(&save_project(&p).unwrap()).unwrap();
        assert_eq!(p, again);
        let MatrixSpec::Tfn(grid) = &again.judgments[1].matrix else {
            panic!("expected grid");
        };
        assert_eq!(grid[1][0].m(), 0.3333333333333333);
    }

    #[test]
    fn fixture_structure() {
        let f = turkiye();
        assert_eq!(f.name, "turkiye-renewables-2024");
        assert_eq!(f.project.criteria.len(), 5);
        let subs: Vec<usize> = f
            .project
            .criteria
            .iter()
            .map(|c| c.children.len())
            .collect();
        assert_eq!(subs, vec![9, 8, 4, 2, 7]);
        assert_eq!(subs.iter().sum::<usize>(), 30);
        assert_eq!(f.project.alternatives.len(), 5);
        assert_eq!(f.project.direct_weights.len(), 30);
        assert_eq!(f.expected.published_cr.len(), 36);
    }
}
