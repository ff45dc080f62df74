//! Engine results checked against independent computations and frozen
//! reference values.

mod common;

use fahp_core::consistency::{self, lambda_max_estimate, locate_inconsistency};
use fahp_core::hierarchy::{self, NodeJudgment, GOAL_ID};
use fahp_core::project;
use fahp_core::weights::row_geometric_mean;
use fahp_core::{CrispMatrix, Defuzz, DerivationMethod, EvalOptions, Execution, Hierarchy};
use rand::seq::SliceRandom;

fn fixture() -> Hierarchy {
    project::turkiye().project.to_hierarchy().unwrap()
}

fn crisp(h: &Hierarchy, node: &str) -> CrispMatrix {
    match &h.judgments[node] {
        NodeJudgment::Fuzzy(m) => m.crispify(Defuzz::Middle),
        NodeJudgment::Direct(_) => panic!("{node} is direct"),
    }
}

fn assert_close(got: &[f64], want: &[f64], tol: f64) {
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() <= tol, "{got:?} vs {want:?}");
    }
}

/// Principal eigenpair by power iteration.
fn power_iteration(m: &CrispMatrix) -> (f64, Vec<f64>) {
    let n = m.order();
    let mut v = vec![1.0 / n as f64; n];
    let mut lambda = 0.0;
    for _ in 0..10_000 {
        let next = m.mul_vec(&v);
        let s: f64 = next.iter().sum();
        let next: Vec<f64> = next.iter().map(|x| x / s).collect();
        let done = next.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-15);
        lambda = s;
        v = next;
        if done {
            break;
        }
    }
    (lambda, v)
}

#[test]
fn gm_weights_match_frozen_oracle() {
    let h = fixture();
    let r = hierarchy::evaluate(&h, &EvalOptions::default()).unwrap();
    let cases: [(&str, &[f64]); 6] = [
        (GOAL_ID, &[0.1249, 0.4158, 0.3530, 0.0458, 0.0604]),
        (
            "C1",
            &[
                0.1386, 0.0603, 0.0432, 0.1443, 0.1047, 0.0378, 0.1527, 0.1964, 0.1221,
            ],
        ),
        (
            "C2",
            &[
                0.1309, 0.0860, 0.2195, 0.0429, 0.0825, 0.0422, 0.1809, 0.2152,
            ],
        ),
        ("C3", &[0.0799, 0.2290, 0.2069, 0.4842]),
        ("C4", &[0.1, 0.9]),
        (
            "C5",
            &[0.0625, 0.1151, 0.1380, 0.2173, 0.1347, 0.0425, 0.2898],
        ),
    ];
    for (node, want) in cases {
        assert_close(&r.local_weights[node].weights, want, 5e-5);
    }
    assert_close(
        &r.global_scores,
        &[0.2306, 0.2375, 0.1397, 0.1762, 0.2161],
        5e-5,
    );
}

#[test]
fn synthesis_matches_brute_force_path_products() {
    let mut projects = vec![project::turkiye().project];
    projects.extend((0..40).map(common::random_project));
    let opts = EvalOptions {
        allow_inconsistent: true,
        ..Default::default()
    };
    for p in projects {
        let h = p.to_hierarchy().unwrap();
        let r = hierarchy::evaluate(&h, &opts).unwrap();
        let mut expected = vec![0.0; h.alternatives.len()];
        for main in &h.criteria {
            let wm = r.local_weights[GOAL_ID].get(&main.id).unwrap();
            let leaves: Vec<(&str, f64)> = if main.children.is_empty() {
                vec![(main.id.as_str(), 1.0)]
            } else {
                main.children
                    .iter()
                    .map(|c| (c.id.as_str(), r.local_weights[&main.id].get(&c.id).unwrap()))
                    .collect()
            };
            for (leaf, ws) in leaves {
                for (k, a) in h.alternatives.iter().enumerate() {
                    expected[k] += wm * ws * r.local_weights[leaf].get(&a.id).unwrap();
                }
            }
        }
        assert_close(&r.global_scores, &expected, 1e-12);
        assert!((r.global_scores.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn consistency_matches_frozen_oracle() {
    let h = fixture();
    let g = consistency::check(&crisp(&h, GOAL_ID), 0.1).unwrap();
    assert!((g.lambda_max - 5.131052).abs() < 1e-6);
    assert!((g.ci - 0.032763).abs() < 1e-6);
    assert!((g.cr - 0.029516).abs() < 1e-6);
    for (node, cr) in [
        ("C1", 0.059312),
        ("C2", 0.084660),
        ("C3", 0.012759),
        ("C4", 0.0),
        ("C5", 0.030500),
    ] {
        let r = consistency::check(&crisp(&h, node), 0.1).unwrap();
        assert!((r.cr - cr).abs() < 1e-6, "{node}: {}", r.cr);
        assert!(r.acceptable);
    }
}

#[test]
fn lambda_estimate_agrees_with_power_iteration() {
    let h = fixture();
    for node in [GOAL_ID, "C1", "C2", "C3", "C4", "C5"] {
        let m = crisp(&h, node);
        let (lambda, v) = power_iteration(&m);
        // With the true eigenvector the estimate is exact.
        assert!((lambda_max_estimate(&m, &v).unwrap() - lambda).abs() < 1e-9);
        // With geometric-mean weights it is close and never below n.
        let est = lambda_max_estimate(&m, &row_geometric_mean(&m)).unwrap();
        assert!(est >= m.order() as f64 - 1e-9);
        assert!(
            (est - lambda).abs() < 0.02 * lambda,
            "{node}: {est} vs {lambda}"
        );
    }
}

#[test]
fn cr_is_invariant_under_relabelling() {
    let mut rng = common::rng(7);
    for sample in 0..100 {
        let n = 3 + sample % 8;
        let scores = common::random_scores(&mut rng, n);
        let mut rows = vec![vec![1.0; n]; n];
        for p in &scores {
            rows[p.i][p.j] = p.score.ratio();
            rows[p.j][p.i] = 1.0 / p.score.ratio();
        }
        let m = CrispMatrix::from_rows(&rows).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let a = consistency::check(&m, 0.1).unwrap();
        let b = consistency::check(&m.permuted(&perm), 0.1).unwrap();
        assert!((a.cr - b.cr).abs() < 1e-12, "{} vs {}", a.cr, b.cr);
    }
}

#[test]
fn buckley_matches_frozen_oracle_and_stays_near_gm() {
    let h = fixture();
    let opts = EvalOptions {
        method: DerivationMethod::Buckley,
        ..Default::default()
    };
    let r = hierarchy::evaluate(&h, &opts).unwrap();
    assert_close(
        &r.local_weights[GOAL_ID].weights,
        &[0.127829, 0.412121, 0.350012, 0.048511, 0.061527],
        1e-6,
    );
    assert_close(
        &r.local_weights["C3"].weights,
        &[0.08253, 0.234367, 0.205698, 0.477405],
        1e-6,
    );
    assert_close(&r.local_weights["C4"].weights, &[0.10362, 0.89638], 1e-5);
    // Method sensitivity is visible but small.
    assert_close(
        &r.local_weights["C3"].weights,
        &[0.080, 0.229, 0.207, 0.484],
        0.05,
    );
}

#[test]
fn full_cycle_suggests_indifference() {
    // a01 = 9, a12 = 9, a20 = 9: a pure cycle, so every row has the same
    // geometric mean and every cell is off by a factor of 9.
    let cyc = CrispMatrix::from_rows(&[
        vec![1.0, 9.0, 1.0 / 9.0],
        vec![1.0 / 9.0, 1.0, 9.0],
        vec![9.0, 1.0 / 9.0, 1.0],
    ])
    .unwrap();
    let r = consistency::check(&cyc, 0.1).unwrap();
    assert!(!r.acceptable);
    let w = row_geometric_mean(&cyc);
    assert_close(&w, &[1.0 / 3.0; 3], 1e-12);
    let cells = locate_inconsistency(&cyc, &w, 3).unwrap();
    let order: Vec<(usize, usize)> = cells.iter().map(|c| (c.i, c.j)).collect();
    assert_eq!(order, [(0, 1), (0, 2), (1, 2)]);
    for c in &cells {
        assert!((c.magnitude - 9f64.ln()).abs() < 1e-12);
        assert_eq!(c.suggested.value(), 1);
    }
    assert_eq!(r.worst_entries, cells);
}

#[test]
fn execution_modes_agree() {
    let h = fixture();
    let seq = EvalOptions {
        exec: Execution::Sequential,
        ..Default::default()
    };
    let par = EvalOptions {
        exec: Execution::Parallel,
        ..Default::default()
    };
    assert_eq!(
        hierarchy::evaluate(&h, &seq).unwrap(),
        hierarchy::evaluate(&h, &par).unwrap()
    );
}
