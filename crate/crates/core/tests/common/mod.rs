//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use fahp_core::hierarchy::{Alternative, CriterionNode};
use fahp_core::judgment::upper_pairs;
use fahp_core::project::{JudgmentEntry, MatrixSpec, ProjectFile, Settings, SCHEMA_VERSION};
use fahp_core::{PairScore, SignedScore};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Positive weights summing to one.
pub fn random_weights(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

pub fn random_signed(rng: &mut impl Rng) -> SignedScore {
    let v: i64 = rng.random_range(1..=9);
    let v = if rng.random_bool(0.5) { -v } else { v };
    SignedScore::new(v).unwrap()
}

pub fn random_scores(rng: &mut impl Rng, n: usize) -> Vec<PairScore> {
    upper_pairs(n)
        .map(|(i, j)| PairScore {
            i,
            j,
            score: random_signed(rng),
        })
        .collect()
}

fn judge(rng: &mut impl Rng, node: &str, n: usize, out: &mut Vec<JudgmentEntry>) {
    let experts = if rng.random_bool(0.3) { 2 } else { 1 };
    for e in 0..experts {
        out.push(JudgmentEntry {
            node: node.to_string(),
            expert: (experts > 1).then(|| format!("e{e}")),
            matrix: MatrixSpec::Scores(random_scores(rng, n)),
        });
    }
}

/// A structurally valid project with random shape, judgments and direct
/// weights. Consistency is not guaranteed.
pub fn random_project(seed: u64) -> ProjectFile {
    let mut rng = rng(seed);
    let n_alt = rng.random_range(2..=5);
    let alternatives: Vec<Alternative> = (1..=n_alt)
        .map(|k| Alternative {
            id: format!("A{k}"),
            label: format!("option {k}"),
        })
        .collect();
    let mut judgments = Vec::new();
    let mut direct_weights = BTreeMap::new();

    let n_main = rng.random_range(1..=4);
    if n_main > 1 {
        judge(&mut rng, "goal", n_main, &mut judgments);
    }
    let mut criteria = Vec::new();
    for c in 1..=n_main {
        let id = format!("C{c}");
        let n_sub = rng.random_range(0..=4);
        let leaves: Vec<String> = if n_sub == 0 {
            vec![id.clone()]
        } else {
            (1..=n_sub).map(|s| format!("C{c}{s}")).collect()
        };
        let node = if n_sub == 0 {
            CriterionNode::leaf(&id, format!("criterion {c}"))
        } else {
            if n_sub > 1 {
                judge(&mut rng, &id, n_sub, &mut judgments);
            }
            CriterionNode::leaf(&id, format!("criterion {c}")).with_children(
                leaves
                    .iter()
                    .map(|l| CriterionNode::leaf(l, format!("sub {l}")))
                    .collect(),
            )
        };
        criteria.push(node);
        for leaf in leaves {
            if rng.random_bool(0.5) {
                judge(&mut rng, &leaf, n_alt, &mut judgments);
            } else {
                let raw: Vec<f64> = (0..n_alt).map(|_| rng.random_range(1e-3..1.0)).collect();
                direct_weights.insert(leaf, raw);
            }
        }
    }
    ProjectFile {
        schema_version: SCHEMA_VERSION,
        goal: format!("random project {seed}"),
        criteria,
        alternatives,
        judgments,
        direct_weights,
        settings: Settings {
            cr_threshold: rng.random_range(0.05..0.2),
            sensitivity_factor: rng.random_range(1.1..2.0),
            ..Settings::default()
        },
    }
}
