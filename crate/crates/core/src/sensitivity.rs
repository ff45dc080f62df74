//! Scenario-based sensitivity of the final ranking to criterion weights.
//!
//! A scenario multiplies one criterion's local weight by `factor` and rescales
//! its siblings so the vector still sums to one:
//!
//! ```text
//! w'_b = factor * w_b
//! w'_j = w_j * (1 - w'_b) / (1 - w_b)      for j != b
//! ```
//!
//! Only the vector holding the boosted criterion changes; every other local
//! vector, including the alternative weights at the leaves, is held fixed.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::hierarchy::{
    score_alternatives, DecisionResult, Hierarchy, HierarchyError, Ranking, GOAL_ID,
};
use crate::weights::{WeightOrigin, WeightVector};

/// Default boost: +50%.
pub const DEFAULT_FACTOR: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensitivityError {
    #[error("boost factor must be positive and finite, got {0}")]
    InvalidFactor(f64),
    #[error("{0:?} is not a criterion that can be boosted")]
    UnknownNode(String),
    #[error("boosting {node:?} (weight {weight:.4}) by {factor} reaches or exceeds 1")]
    Infeasible {
        node: String,
        weight: f64,
        factor: f64,
    },
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    /// `None` for the baseline.
    pub boosted: Option<String>,
    pub factor: f64,
}

impl Scenario {
    pub fn baseline() -> Self {
        Scenario {
            name: "Scenario 1".into(),
            boosted: None,
            factor: 1.0,
        }
    }
}

/// Rescales `base` so that `boosted` gets `factor` times its weight.
pub fn scenario_weights(
    base: &WeightVector,
    boosted: &str,
    factor: f64,
) -> Result<WeightVector, SensitivityError> {
    if !(factor.is_finite() && factor > 0.0) {
        return Err(SensitivityError::InvalidFactor(factor));
    }
    let b = base
        .position(boosted)
        .ok_or_else(|| SensitivityError::UnknownNode(boosted.to_string()))?;
    let wb = base.weights[b];
    let mut out = WeightVector {
        origin: WeightOrigin::Scenario,
        ..base.clone()
    };
    if factor == 1.0 {
        return Ok(out);
    }
    let boosted_weight = factor * wb;
    if boosted_weight >= 1.0 {
        return Err(SensitivityError::Infeasible {
            node: boosted.to_string(),
            weight: wb,
            factor,
        });
    }
    let scale = (1.0 - boosted_weight) / (1.0 - wb);
    for (k, w) in out.weights.iter_mut().enumerate() {
        *w = if k == b { boosted_weight } else { *w * scale };
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenario: Scenario,
    /// The local vector after rescaling (the main-criteria vector for the
    /// baseline).
    pub adjusted: WeightVector,
    /// Aligned with the report's `alternatives`.
    pub global_scores: Vec<f64>,
    pub ranking: Ranking,
}

/// Pair of alternatives whose order differs from the baseline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankFlip {
    pub scenario: String,
    /// Ranked higher in the baseline.
    pub above: String,
    /// Ranked lower in the baseline, higher in the scenario.
    pub below: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub factor: f64,
    pub alternatives: Vec<String>,
    /// Baseline first.
    pub scenarios: Vec<ScenarioResult>,
    /// 1-based ranks each alternative attains across all scenarios.
    pub stability: BTreeMap<String, BTreeSet<usize>>,
    pub flips: Vec<RankFlip>,
}

impl SensitivityReport {
    pub fn scenario(&self, name: &str) -> Option<&ScenarioResult> {
        self.scenarios.iter().find(|s| s.scenario.name == name)
    }

    pub fn flips_in<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a RankFlip> + 'a {
        self.flips.iter().filter(move |f| f.scenario == name)
    }
}

fn parent_of<'a>(h: &'a Hierarchy, node: &str) -> Result<&'a str, SensitivityError> {
    h.decision_nodes()
        .into_iter()
        .find(|n| n.id == node)
        .and_then(|n| n.parent)
        .ok_or_else(|| SensitivityError::UnknownNode(node.to_string()))
}

/// Recomputes the decision with one scenario applied to `base`'s weights.
pub fn run_scenario(
    h: &Hierarchy,
    base: &DecisionResult,
    scenario: &Scenario,
) -> Result<ScenarioResult, SensitivityError> {
    let Some(boosted) = scenario.boosted.as_deref() else {
        return Ok(ScenarioResult {
            scenario: scenario.clone(),
            adjusted: base.main_weights().clone(),
            global_scores: base.global_scores.clone(),
            ranking: base.ranking.clone(),
        });
    };
    let parent = parent_of(h, boosted)?;
    let parent_weights = base
        .local_weights
        .get(parent)
        .ok_or_else(|| HierarchyError::MissingWeights(parent.to_string()))?;
    let adjusted = scenario_weights(parent_weights, boosted, scenario.factor)?;
    let mut local = base.local_weights.clone();
    local.insert(parent.to_string(), adjusted.clone());
    let result = score_alternatives(h, &local)?;
    Ok(ScenarioResult {
        scenario: scenario.clone(),
        adjusted,
        global_scores: result.global_scores,
        ranking: result.ranking,
    })
}

/// Pairs ordered one way in `baseline` and the other way in `other`.
pub fn rank_flips(scenario: &str, baseline: &Ranking, other: &Ranking) -> Vec<RankFlip> {
    let mut flips = Vec::new();
    for (k, above) in baseline.order.iter().enumerate() {
        for below in &baseline.order[k + 1..] {
            if other.position(below) < other.position(above) {
                flips.push(RankFlip {
                    scenario: scenario.to_string(),
                    above: above.clone(),
                    below: below.clone(),
                });
            }
        }
    }
    flips
}

/// Baseline plus the given scenarios, evaluated independently.
pub fn run_custom(
    h: &Hierarchy,
    base: &DecisionResult,
    factor: f64,
    scenarios: &[Scenario],
    exec: Execution,
) -> Result<SensitivityReport, SensitivityError> {
    let mut all = vec![Scenario::baseline()];
    all.extend_from_slice(scenarios);
    let results = exec.try_map(&all, |s| run_scenario(h, base, s))?;

    let baseline = &results[0].ranking;
    let mut stability: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    let mut flips = Vec::new();
    for r in &results {
        for (pos, id) in r.ranking.order.iter().enumerate() {
            stability.entry(id.clone()).or_default().insert(pos + 1);
        }
        flips.extend(rank_flips(&r.scenario.name, baseline, &r.ranking));
    }
    Ok(SensitivityReport {
        factor,
        alternatives: base.alternatives.clone(),
        scenarios: results,
        stability,
        flips,
    })
}

/// Baseline plus one scenario per top-level criterion, each boosted by
/// `factor`. Scenario `k + 1` boosts the `k`-th criterion.
pub fn run_scenarios(
    h: &Hierarchy,
    base: &DecisionResult,
    factor: f64,
    exec: Execution,
) -> Result<SensitivityReport, SensitivityError> {
    let scenarios: Vec<Scenario> = base.local_weights[GOAL_ID]
        .items
        .iter()
        .enumerate()
        .map(|(k, id)| Scenario {
            name: format!("Scenario {}", k + 2),
            boosted: Some(id.clone()),
            factor,
        })
        .collect();
    run_custom(h, base, factor, &scenarios, exec)
}

/// [`run_scenarios`] for each factor in `factors`.
pub fn sweep(
    h: &Hierarchy,
    base: &DecisionResult,
    factors: &[f64],
    exec: Execution,
) -> Result<Vec<SensitivityReport>, SensitivityError> {
    // Each report already fans out over its scenarios.
    exec.try_map(factors, |&f| {
        run_scenarios(h, base, f, Execution::Sequential)
    })
}
