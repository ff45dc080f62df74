//! Decision hierarchy: goal, criteria tree and alternatives, plus synthesis
//! of local priorities into global alternative scores.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consistency::{self, ConsistencyError, ConsistencyReport, DEFAULT_THRESHOLD};
use crate::exec::Execution;
use crate::fuzzy::Defuzz;
use crate::judgment::FuzzyComparisonMatrix;
use crate::weights::{self, DerivationMethod, WeightError, WeightOrigin, WeightVector};

/// Node id of the root; its judgments compare the top-level criteria.
pub const GOAL_ID: &str = "goal";

/// Scores closer than this are reported as ties.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionNode {
    pub id: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sdg: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<CriterionNode>,
}

impl CriterionNode {
    pub fn leaf(id: impl Into<String>, label: impl Into<String>) -> Self {
        CriterionNode {
            id: id.into(),
            label: label.into(),
            sdg: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn with_children(mut self, children: Vec<CriterionNode>) -> Self {
        self.children = children;
        self
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alternative {
    pub id: String,
    pub label: String,
}

/// Judgment source attached to a node.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeJudgment {
    /// Comparison of the node's children (or alternatives, for a leaf).
    Fuzzy(FuzzyComparisonMatrix),
    /// Alternative weights given directly for a leaf criterion, in
    /// alternative order. Normalized on use.
    Direct(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hierarchy {
    pub goal: String,
    pub criteria: Vec<CriterionNode>,
    pub alternatives: Vec<Alternative>,
    pub judgments: BTreeMap<String, NodeJudgment>,
}

/// A node that carries a local priority vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionNode<'a> {
    pub id: &'a str,
    pub parent: Option<&'a str>,
    /// Ids of what the node's judgments compare.
    pub items: Vec<&'a str>,
    pub is_leaf: bool,
}

impl Hierarchy {
    /// The goal and every criterion, parents before children.
    pub fn decision_nodes(&self) -> Vec<DecisionNode<'_>> {
        fn walk<'a>(
            h: &'a Hierarchy,
            node: &'a CriterionNode,
            parent: &'a str,
            out: &mut Vec<DecisionNode<'a>>,
        ) {
            let items = if node.is_leaf() {
                h.alternatives.iter().map(|a| a.id.as_str()).collect()
            } else {
                node.children.iter().map(|c| c.id.as_str()).collect()
            };
            out.push(DecisionNode {
                id: &node.id,
                parent: Some(parent),
                items,
                is_leaf: node.is_leaf(),
            });
            for child in &node.children {
                walk(h, child, &node.id, out);
            }
        }

        let mut out = vec![DecisionNode {
            id: GOAL_ID,
            parent: None,
            items: self.criteria.iter().map(|c| c.id.as_str()).collect(),
            is_leaf: false,
        }];
        for c in &self.criteria {
            walk(self, c, GOAL_ID, &mut out);
        }
        out
    }

    pub fn node(&self, id: &str) -> Option<DecisionNode<'_>> {
        self.decision_nodes().into_iter().find(|n| n.id == id)
    }

    pub fn criterion(&self, id: &str) -> Option<&CriterionNode> {
        fn find<'a>(nodes: &'a [CriterionNode], id: &str) -> Option<&'a CriterionNode> {
            nodes.iter().find_map(|n| {
                if n.id == id {
                    Some(n)
                } else {
                    find(&n.children, id)
                }
            })
        }
        find(&self.criteria, id)
    }

    pub fn leaves(&self) -> Vec<&CriterionNode> {
        fn walk<'a>(nodes: &'a [CriterionNode], out: &mut Vec<&'a CriterionNode>) {
            for n in nodes {
                if n.is_leaf() {
                    out.push(n);
                } else {
                    walk(&n.children, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.criteria, &mut out);
        out
    }

    pub fn alternative_ids(&self) -> Vec<String> {
        self.alternatives.iter().map(|a| a.id.clone()).collect()
    }

    pub fn label(&self, id: &str) -> Option<&str> {
        if id == GOAL_ID {
            return Some(&self.goal);
        }
        self.alternatives
            .iter()
            .find(|a| a.id == id)
            .map(|a| a.label.as_str())
            .or_else(|| self.criterion(id).map(|c| c.label.as_str()))
    }
}

/// One structural problem found by [`validate_hierarchy`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NoCriteria,
    TooFewAlternatives {
        count: usize,
    },
    EmptyId,
    DuplicateId {
        id: String,
    },
    MissingJudgment {
        node: String,
    },
    UnknownNode {
        node: String,
    },
    ItemMismatch {
        node: String,
    },
    DirectOnInternalNode {
        node: String,
    },
    DirectWeightCount {
        node: String,
        expected: usize,
        found: usize,
    },
    DirectWeightValue {
        node: String,
    },
    ConflictingSources {
        node: String,
    },
    BadJudgment {
        node: String,
        message: String,
    },
    InvalidSetting {
        name: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoCriteria => write!(f, "the hierarchy has no criteria"),
            Violation::TooFewAlternatives { count } => {
                write!(f, "at least 2 alternatives are required, found {count}")
            }
            Violation::EmptyId => write!(f, "a node has an empty id"),
            Violation::DuplicateId { id } => write!(f, "duplicate node id {id:?}"),
            Violation::MissingJudgment { node } => {
                write!(
                    f,
                    "node {node:?} has neither a comparison matrix nor direct weights"
                )
            }
            Violation::UnknownNode { node } => {
                write!(f, "judgment refers to unknown node {node:?}")
            }
            Violation::ItemMismatch { node } => {
                write!(
                    f,
                    "comparison matrix of {node:?} does not compare the node's children"
                )
            }
            Violation::DirectOnInternalNode { node } => {
                write!(
                    f,
                    "direct weights are only allowed on leaf criteria, not {node:?}"
                )
            }
            Violation::DirectWeightCount {
                node,
                expected,
                found,
            } => write!(
                f,
                "direct weights of {node:?}: expected {expected} values, found {found}"
            ),
            Violation::DirectWeightValue { node } => {
                write!(f, "direct weights of {node:?} must be positive and finite")
            }
            Violation::ConflictingSources { node } => {
                write!(
                    f,
                    "node {node:?} has both comparison judgments and direct weights"
                )
            }
            Violation::BadJudgment { node, message } => {
                write!(f, "judgments for {node:?}: {message}")
            }
            Violation::InvalidSetting { name } => {
                write!(f, "setting {name} must be a positive number")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "- {v}")?;
        }
        Ok(())
    }
}

/// Lists every structural problem; an empty report means the hierarchy can
/// be evaluated.
pub fn validate_hierarchy(h: &Hierarchy) -> ValidationReport {
    let mut violations = Vec::new();
    if h.criteria.is_empty() {
        violations.push(Violation::NoCriteria);
    }
    if h.alternatives.len() < 2 {
        violations.push(Violation::TooFewAlternatives {
            count: h.alternatives.len(),
        });
    }

    let mut seen = HashSet::from([GOAL_ID]);
    let nodes = h.decision_nodes();
    let ids = nodes
        .iter()
        .skip(1)
        .map(|n| n.id)
        .chain(h.alternatives.iter().map(|a| a.id.as_str()));
    for id in ids {
        if id.is_empty() {
            violations.push(Violation::EmptyId);
        } else if !seen.insert(id) {
            violations.push(Violation::DuplicateId { id: id.to_string() });
        }
    }

    for node in &nodes {
        match h.judgments.get(node.id) {
            None if node.items.len() >= 2 || node.is_leaf => {
                violations.push(Violation::MissingJudgment {
                    node: node.id.to_string(),
                });
            }
            None => {}
            Some(NodeJudgment::Fuzzy(m)) => {
                if m.item_ids()
                    .iter()
                    .map(String::as_str)
                    .ne(node.items.iter().copied())
                {
                    violations.push(Violation::ItemMismatch {
                        node: node.id.to_string(),
                    });
                }
            }
            Some(NodeJudgment::Direct(values)) => {
                if !node.is_leaf {
                    violations.push(Violation::DirectOnInternalNode {
                        node: node.id.to_string(),
                    });
                } else if values.len() != node.items.len() {
                    violations.push(Violation::DirectWeightCount {
                        node: node.id.to_string(),
                        expected: node.items.len(),
                        found: values.len(),
                    });
                } else if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                    violations.push(Violation::DirectWeightValue {
                        node: node.id.to_string(),
                    });
                }
            }
        }
    }

    let known: HashSet<&str> = nodes.iter().map(|n| n.id).collect();
    for node in h.judgments.keys() {
        if !known.contains(node.as_str()) {
            violations.push(Violation::UnknownNode { node: node.clone() });
        }
    }
    ValidationReport { violations }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HierarchyError {
    #[error("invalid hierarchy:\n{0}")]
    Invalid(ValidationReport),
    #[error("node {node:?} is inconsistent: CR {cr:.4} is not below {threshold}")]
    Inconsistent {
        node: String,
        cr: f64,
        threshold: f64,
    },
    #[error("no local weights for node {0:?}")]
    MissingWeights(String),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Consistency(#[from] ConsistencyError),
}

/// Settings for turning judgments into weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub method: DerivationMethod,
    /// Defuzzification used to build the crisp matrix for consistency checks.
    pub defuzz: Defuzz,
    pub cr_threshold: f64,
    /// Derive weights even when a matrix fails the consistency threshold.
    pub allow_inconsistent: bool,
    pub exec: Execution,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            method: DerivationMethod::GmMiddle,
            defuzz: Defuzz::Middle,
            cr_threshold: DEFAULT_THRESHOLD,
            allow_inconsistent: false,
            exec: Execution::default(),
        }
    }
}

pub type LocalWeights = BTreeMap<String, WeightVector>;

fn fuzzy_nodes(h: &Hierarchy) -> Vec<(&str, &FuzzyComparisonMatrix)> {
    h.judgments
        .iter()
        .filter_map(|(id, j)| match j {
            NodeJudgment::Fuzzy(m) => Some((id.as_str(), m)),
            NodeJudgment::Direct(_) => None,
        })
        .collect()
}

/// Consistency report for every node judged by a comparison matrix.
pub fn consistency_reports(
    h: &Hierarchy,
    defuzz: Defuzz,
    threshold: f64,
    exec: Execution,
) -> Result<BTreeMap<String, ConsistencyReport>, HierarchyError> {
    let nodes = fuzzy_nodes(h);
    let reports = exec.try_map(&nodes, |(_, m)| {
        consistency::check(&m.crispify(defuzz), threshold)
    })?;
    Ok(nodes
        .iter()
        .map(|(id, _)| id.to_string())
        .zip(reports)
        .collect())
}

/// One priority vector per decision node.
pub fn compute_local_weights(
    h: &Hierarchy,
    opts: &EvalOptions,
) -> Result<LocalWeights, HierarchyError> {
    let report = validate_hierarchy(h);
    if !report.is_valid() {
        return Err(HierarchyError::Invalid(report));
    }
    let nodes = h.decision_nodes();
    let vectors = opts
        .exec
        .try_map(&nodes, |node| -> Result<WeightVector, HierarchyError> {
            let items: Vec<String> = node.items.iter().map(|s| s.to_string()).collect();
            match h.judgments.get(node.id) {
                Some(NodeJudgment::Fuzzy(m)) => {
                    let report = consistency::check(&m.crispify(opts.defuzz), opts.cr_threshold)?;
                    if !report.acceptable && !opts.allow_inconsistent {
                        return Err(HierarchyError::Inconsistent {
                            node: node.id.to_string(),
                            cr: report.cr,
                            threshold: opts.cr_threshold,
                        });
                    }
                    Ok(weights::derive(node.id, m, opts.method))
                }
                Some(NodeJudgment::Direct(raw)) => Ok(WeightVector::normalized(
                    node.id,
                    WeightOrigin::Direct,
                    items,
                    raw.clone(),
                )?),
                // A single child needs no judgment.
                None => Ok(WeightVector::new(
                    node.id,
                    WeightOrigin::Direct,
                    items,
                    vec![1.0],
                )?),
            }
        })?;
    Ok(vectors
        .into_iter()
        .map(|w| (w.node_id.clone(), w))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranking {
    /// Alternative ids, best first.
    pub order: Vec<String>,
    /// Groups of alternatives whose scores differ by less than [`TIE_TOL`].
    pub ties: Vec<Vec<String>>,
}

impl Ranking {
    /// 1-based rank of `id` by position in `order`.
    pub fn position(&self, id: &str) -> Option<usize> {
        self.order.iter().position(|x| x == id).map(|p| p + 1)
    }
}

/// Scores of every alternative under one top-level criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionScores {
    pub criterion: String,
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionResult {
    pub local_weights: LocalWeights,
    /// Product of local weights from the goal down to each criterion.
    pub global_criterion_weights: BTreeMap<String, f64>,
    pub alternatives: Vec<String>,
    /// Per top-level criterion, in criteria order.
    pub criterion_scores: Vec<CriterionScores>,
    /// Aligned with `alternatives`.
    pub global_scores: Vec<f64>,
    pub ranking: Ranking,
}

impl DecisionResult {
    pub fn score(&self, alternative: &str) -> Option<f64> {
        self.alternatives
            .iter()
            .position(|a| a == alternative)
            .map(|k| self.global_scores[k])
    }

    pub fn main_weights(&self) -> &WeightVector {
        &self.local_weights[GOAL_ID]
    }

    pub fn criterion_score(&self, criterion: &str, alternative: &str) -> Option<f64> {
        let k = self.alternatives.iter().position(|a| a == alternative)?;
        self.criterion_scores
            .iter()
            .find(|c| c.criterion == criterion)
            .map(|c| c.scores[k])
    }
}

fn weights_of<'a>(local: &'a LocalWeights, node: &str) -> Result<&'a WeightVector, HierarchyError> {
    local
        .get(node)
        .ok_or_else(|| HierarchyError::MissingWeights(node.to_string()))
}

/// Alternative scores contributed by the subtree under `node`, relative to
/// that node (sums to 1).
fn subtree_scores(
    node: &CriterionNode,
    local: &LocalWeights,
    alternatives: &[String],
    global: &mut BTreeMap<String, f64>,
    path_weight: f64,
) -> Result<Vec<f64>, HierarchyError> {
    global.insert(node.id.clone(), path_weight);
    let w = weights_of(local, &node.id)?;
    if node.is_leaf() {
        return alternatives
            .iter()
            .map(|a| {
                w.get(a)
                    .ok_or_else(|| HierarchyError::MissingWeights(format!("{}/{a}", node.id)))
            })
            .collect();
    }
    let mut acc = vec![0.0; alternatives.len()];
    for child in &node.children {
        let cw = w
            .get(&child.id)
            .ok_or_else(|| HierarchyError::MissingWeights(format!("{}/{}", node.id, child.id)))?;
        let s = subtree_scores(child, local, alternatives, global, path_weight * cw)?;
        for (a, v) in acc.iter_mut().zip(s) {
            *a += cw * v;
        }
    }
    Ok(acc)
}

/// Weighted-sum synthesis of local priorities along every goal-to-leaf path.
pub fn score_alternatives(
    h: &Hierarchy,
    local: &LocalWeights,
) -> Result<DecisionResult, HierarchyError> {
    let alternatives = h.alternative_ids();
    let main = weights_of(local, GOAL_ID)?;
    let mut global_weights = BTreeMap::new();
    let mut criterion_scores = Vec::with_capacity(h.criteria.len());
    let mut global_scores = vec![0.0; alternatives.len()];
    for c in &h.criteria {
        let wc = main
            .get(&c.id)
            .ok_or_else(|| HierarchyError::MissingWeights(format!("{GOAL_ID}/{}", c.id)))?;
        let scores = subtree_scores(c, local, &alternatives, &mut global_weights, wc)?;
        for (g, s) in global_scores.iter_mut().zip(&scores) {
            *g += wc * s;
        }
        criterion_scores.push(CriterionScores {
            criterion: c.id.clone(),
            scores,
        });
    }
    let ranking = rank_scores(&alternatives, &global_scores);
    Ok(DecisionResult {
        local_weights: local.clone(),
        global_criterion_weights: global_weights,
        alternatives,
        criterion_scores,
        global_scores,
        ranking,
    })
}

/// Orders ids by descending score; ties are grouped and ordered by id.
pub fn rank_scores(ids: &[String], scores: &[f64]) -> Ranking {
    let mut idx: Vec<usize> = (0..ids.len()).collect();
    idx.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then_with(|| ids[a].cmp(&ids[b]))
    });
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in idx {
        match groups.last_mut() {
            Some(g) if (scores[g[0]] - scores[k]).abs() < TIE_TOL => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    let mut order = Vec::with_capacity(ids.len());
    let mut ties = Vec::new();
    for mut g in groups {
        g.sort_by(|&a, &b| ids[a].cmp(&ids[b]));
        let names: Vec<String> = g.iter().map(|&k| ids[k].clone()).collect();
        if names.len() > 1 {
            ties.push(names.clone());
        }
        order.extend(names);
    }
    Ranking { order, ties }
}

pub fn rank_alternatives(result: &DecisionResult) -> Ranking {
    rank_scores(&result.alternatives, &result.global_scores)
}

/// Validate, derive local weights and synthesize in one call.
pub fn evaluate(h: &Hierarchy, opts: &EvalOptions) -> Result<DecisionResult, HierarchyError> {
    let local = compute_local_weights(h, opts)?;
    score_alternatives(h, &local)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::SignedScore;
    use crate::judgment::{ExpertJudgmentSet, PairScore};

    fn alts(n: usize) -> Vec<Alternative> {
        (1..=n)
            .map(|k| Alternative {
                id: format!("A{k}"),
                label: format!("Alt {k}"),
            })
            .collect()
    }

    fn scores_matrix(ids: &[&str], scores: &[i64]) -> NodeJudgment {
        let ids: Vec<String> = ids.iter().map(|s| s.to_string()).collect();
        let set = ExpertJudgmentSet {
            expert_id: "e".into(),
            node_id: "n".into(),
            upper_triangle: crate::judgment::upper_pairs(ids.len())
                .zip(scores)
                .map(|((i, j), &s)| PairScore {
                    i,
                    j,
                    score: SignedScore::new(s).unwrap(),
                })
                .collect(),
        };
        NodeJudgment::Fuzzy(FuzzyComparisonMatrix::from_scores(ids, &set).unwrap())
    }

    fn two_level() -> Hierarchy {
        Hierarchy {
            goal: "pick".into(),
            criteria: vec![
                CriterionNode::leaf("C1", "cost"),
                CriterionNode::leaf("C2", "quality").with_children(vec![
                    CriterionNode::leaf("C21", "a"),
                    CriterionNode::leaf("C22", "b"),
                ]),
            ],
            alternatives: alts(3),
            judgments: BTreeMap::from([
                ("goal".to_string(), scores_matrix(&["C1", "C2"], &[3])),
                ("C2".to_string(), scores_matrix(&["C21", "C22"], &[-2])),
                ("C1".to_string(), NodeJudgment::Direct(vec![0.5, 0.3, 0.2])),
                ("C21".to_string(), NodeJudgment::Direct(vec![0.2, 0.2, 0.6])),
                (
                    "C22".to_string(),
                    scores_matrix(&["A1", "A2", "A3"], &[1, 3, 3]),
                ),
            ]),
        }
    }

    #[test]
    fn validation_finds_structural_problems() {
        assert!(validate_hierarchy(&two_level()).is_valid());

        let mut h = two_level();
        h.criteria[1].children[1].id = "C21".into();
        let r = validate_hierarchy(&h);
        assert!(r
            .violations
            .contains(&Violation::DuplicateId { id: "C21".into() }));

        let mut h = two_level();
        h.judgments.remove("C21");
        let r = validate_hierarchy(&h);
        assert_eq!(
            r.violations,
            vec![Violation::MissingJudgment { node: "C21".into() }]
        );

        let mut h = two_level();
        h.judgments
            .insert("C99".into(), NodeJudgment::Direct(vec![0.5, 0.5]));
        h.judgments
            .insert("C2".into(), NodeJudgment::Direct(vec![0.5, 0.5]));
        h.judgments
            .insert("C1".into(), NodeJudgment::Direct(vec![0.5, 0.5]));
        let r = validate_hierarchy(&h);
        assert!(r
            .violations
            .contains(&Violation::UnknownNode { node: "C99".into() }));
        assert!(r
            .violations
            .contains(&Violation::DirectOnInternalNode { node: "C2".into() }));
        assert!(r.violations.contains(&Violation::DirectWeightCount {
            node: "C1".into(),
            expected: 3,
            found: 2
        }));

        let h = Hierarchy {
            goal: "g".into(),
            criteria: vec![],
            alternatives: alts(1),
            judgments: BTreeMap::new(),
        };
        let r = validate_hierarchy(&h);
        assert!(r.violations.contains(&Violation::NoCriteria));
        assert!(r
            .violations
            .contains(&Violation::TooFewAlternatives { count: 1 }));
    }

    #[test]
    fn synthesis_matches_hand_computation() {
        let h = two_level();
        let r = evaluate(&h, &EvalOptions::default()).unwrap();
        // goal: 3 => crisp [[1,3],[1/3,1]] => (0.75, 0.25)
        // C2: -2 => (1/3, 2/3)
        // C22: rows [1,1,3], [1,1,3], [1/3,1/3,1]
        let g = [
            3f64.powf(1.0 / 3.0),
            3f64.powf(1.0 / 3.0),
            (1.0f64 / 9.0).powf(1.0 / 3.0),
        ];
        let s: f64 = g.iter().sum();
        let c22: Vec<f64> = g.iter().map(|x| x / s).collect();
        let c21 = [0.2, 0.2, 0.6];
        let c1 = [0.5, 0.3, 0.2];
        for k in 0..3 {
            let c2 = c21[k] / 3.0 + 2.0 * c22[k] / 3.0;
            let expected = 0.75 * c1[k] + 0.25 * c2;
            assert!((r.global_scores[k] - expected).abs() < 1e-12);
            assert!((r.criterion_scores[1].scores[k] - c2).abs() < 1e-12);
        }
        assert!((r.global_scores.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((r.global_criterion_weights["C22"] - 0.25 * 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_criterion_and_single_leaf() {
        let h = Hierarchy {
            goal: "g".into(),
            criteria: vec![CriterionNode::leaf("C1", "only")],
            alternatives: alts(3),
            judgments: BTreeMap::from([(
                "C1".to_string(),
                NodeJudgment::Direct(vec![0.2, 0.5, 0.3]),
            )]),
        };
        assert!(validate_hierarchy(&h).is_valid());
        let r = evaluate(&h, &EvalOptions::default()).unwrap();
        assert_eq!(r.main_weights().weights, vec![1.0]);
        assert_eq!(r.global_scores, vec![0.2, 0.5, 0.3]);
        assert_eq!(r.ranking.order, vec!["A2", "A3", "A1"]);
    }

    #[test]
    fn inconsistent_node_is_refused_without_override() {
        let mut h = two_level();
        h.criteria[0] = CriterionNode::leaf("C1", "x");
        h.judgments.insert(
            "C22".into(),
            scores_matrix(&["A1", "A2", "A3"], &[9, -9, 9]),
        );
        let err = evaluate(&h, &EvalOptions::default()).unwrap_err();
        assert!(matches!(err, HierarchyError::Inconsistent { ref node, .. } if node == "C22"));
        let opts = EvalOptions {
            allow_inconsistent: true,
            ..EvalOptions::default()
        };
        assert!(evaluate(&h, &opts).is_ok());
    }

    #[test]
    fn ranking_ties() {
        let ids: Vec<String> = ["A3", "A1", "A2"].iter().map(|s| s.to_string()).collect();
        let r = rank_scores(&ids, &[0.4, 0.3, 0.3]);
        assert_eq!(r.order, vec!["A3", "A1", "A2"]);
        assert_eq!(r.ties, vec![vec!["A1".to_string(), "A2".to_string()]]);
        let r = rank_scores(&ids[..1], &[1.0]);
        assert_eq!(r.order.len(), 1);
        assert!(r.ties.is_empty());
        let r = rank_scores(&ids, &[0.2, 0.5, 0.3]);
        assert_eq!(r.order, vec!["A1", "A2", "A3"]);
        assert_eq!(r.position("A3"), Some(3));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let h = two_level();
        let seq = EvalOptions {
            exec: Execution::Sequential,
            ..EvalOptions::default()
        };
        assert_eq!(
            evaluate(&h, &seq).unwrap(),
            evaluate(&h, &EvalOptions::default()).unwrap()
        );
    }
}
