//! Fuzzy pairwise-comparison matrices and their crisp counterparts.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::{Defuzz, FuzzyError, SignedScore, Tfn};

/// Largest supported matrix order (the random index table stops at 15).
pub const MAX_ORDER: usize = 15;

/// Tolerance for the reciprocity check on user-supplied grids.
pub const RECIPROCITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JudgmentError {
    #[error("matrix order {0} is outside 2..={MAX_ORDER}")]
    OrderOutOfRange(usize),
    #[error("expected {expected} rows/columns, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("duplicate item id {0:?}")]
    DuplicateItem(String),
    #[error("incomplete matrix, missing pairs {}", format_pairs(.0))]
    MissingPairs(Vec<(usize, usize)>),
    #[error("pair ({0}, {1}) is given more than once")]
    DuplicatePair(usize, usize),
    #[error("pair ({i}, {j}) is invalid for order {order}: need i < j < order")]
    InvalidPair { i: usize, j: usize, order: usize },
    #[error("diagonal entry {0} must be (1, 1, 1)")]
    Diagonal(usize),
    #[error("entries ({i}, {j}) and ({j}, {i}) are not reciprocal")]
    NotReciprocal { i: usize, j: usize },
    #[error("entry ({i}, {j}) must be a positive finite number")]
    NonPositive { i: usize, j: usize },
    #[error("cannot aggregate an empty list of matrices")]
    NoMatrices,
    #[error("matrices compare different items")]
    ShapeMismatch,
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
}

fn format_pairs(pairs: &[(usize, usize)]) -> String {
    pairs
        .iter()
        .map(|(i, j)| format!("({i}, {j})"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// One upper-triangle judgment `(i, j, score)` with `i < j`; serialized as
/// a three-element array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(
    from = "(usize, usize, SignedScore)",
    into = "(usize, usize, SignedScore)"
)]
pub struct PairScore {
    pub i: usize,
    pub j: usize,
    pub score: SignedScore,
}

impl From<(usize, usize, SignedScore)> for PairScore {
    fn from((i, j, score): (usize, usize, SignedScore)) -> Self {
        PairScore { i, j, score }
    }
}

impl From<PairScore> for (usize, usize, SignedScore) {
    fn from(p: PairScore) -> Self {
        (p.i, p.j, p.score)
    }
}

/// One expert's precise-score judgments for the children of a node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpertJudgmentSet {
    pub expert_id: String,
    pub node_id: String,
    pub upper_triangle: Vec<PairScore>,
}

impl ExpertJudgmentSet {
    /// Pairs `(i, j)`, `i < j < order`, that have no judgment.
    pub fn missing_pairs(&self, order: usize) -> Vec<(usize, usize)> {
        let present: HashSet<(usize, usize)> =
            self.upper_triangle.iter().map(|p| (p.i, p.j)).collect();
        upper_pairs(order)
            .filter(|pair| !present.contains(pair))
            .collect()
    }
}

/// All `(i, j)` with `i < j < order`, row-major.
pub fn upper_pairs(order: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..order).flat_map(move |i| (i + 1..order).map(move |j| (i, j)))
}

fn check_items(item_ids: &[String]) -> Result<(), JudgmentError> {
    let n = item_ids.len();
    if !(2..=MAX_ORDER).contains(&n) {
        return Err(JudgmentError::OrderOutOfRange(n));
    }
    let mut seen = HashSet::new();
    for id in item_ids {
        if !seen.insert(id.as_str()) {
            return Err(JudgmentError::DuplicateItem(id.clone()));
        }
    }
    Ok(())
}

/// Reciprocal `n x n` matrix of triangular fuzzy numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyComparisonMatrix {
    item_ids: Vec<String>,
    entries: Vec<Tfn>,
}

impl FuzzyComparisonMatrix {
    /// Builds the matrix from an upper triangle; the diagonal is `(1,1,1)`
    /// and the lower triangle is the exact reciprocal.
    fn from_upper(item_ids: Vec<String>, mut upper: impl FnMut(usize, usize) -> Tfn) -> Self {
        let n = item_ids.len();
        let mut entries = vec![Tfn::ONE; n * n];
        for (i, j) in upper_pairs(n) {
            let t = upper(i, j);
            entries[i * n + j] = t;
            entries[j * n + i] = t.reciprocal();
        }
        FuzzyComparisonMatrix { item_ids, entries }
    }

    /// All-indifferent matrix.
    pub fn indifferent(item_ids: Vec<String>) -> Result<Self, JudgmentError> {
        check_items(&item_ids)?;
        Ok(Self::from_upper(item_ids, |_, _| Tfn::ONE))
    }

    /// Fills the upper triangle from scale lookups of `judgments`.
    pub fn from_scores(
        item_ids: Vec<String>,
        judgments: &ExpertJudgmentSet,
    ) -> Result<Self, JudgmentError> {
        check_items(&item_ids)?;
        let n = item_ids.len();
        let mut grid: Vec<Option<SignedScore>> = vec![None; n * n];
        for p in &judgments.upper_triangle {
            if p.i >= p.j || p.j >= n {
                return Err(JudgmentError::InvalidPair {
                    i: p.i,
                    j: p.j,
                    order: n,
                });
            }
            let cell = &mut grid[p.i * n + p.j];
            if cell.is_some() {
                return Err(JudgmentError::DuplicatePair(p.i, p.j));
            }
            *cell = Some(p.score);
        }
        let missing: Vec<_> = upper_pairs(n)
            .filter(|&(i, j)| grid[i * n + j].is_none())
            .collect();
        if !missing.is_empty() {
            return Err(JudgmentError::MissingPairs(missing));
        }
        Ok(Self::from_upper(item_ids, |i, j| {
            grid[i * n + j].expect("checked complete").tfn()
        }))
    }

    /// Accepts a full grid, checking the diagonal and reciprocity within
    /// [`RECIPROCITY_TOL`]. The stored lower triangle is re-derived exactly
    /// from the upper one.
    pub fn from_grid(item_ids: Vec<String>, grid: &[Vec<Tfn>]) -> Result<Self, JudgmentError> {
        check_items(&item_ids)?;
        let n = item_ids.len();
        if grid.len() != n {
            return Err(JudgmentError::DimensionMismatch {
                expected: n,
                found: grid.len(),
            });
        }
        for (i, row) in grid.iter().enumerate() {
            if row.len() != n {
                return Err(JudgmentError::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            if !row[i].approx_eq(&Tfn::ONE, RECIPROCITY_TOL) {
                return Err(JudgmentError::Diagonal(i));
            }
        }
        for (i, j) in upper_pairs(n) {
            if !grid[j][i].approx_eq(&grid[i][j].reciprocal(), RECIPROCITY_TOL) {
                return Err(JudgmentError::NotReciprocal { i, j });
            }
        }
        Ok(Self::from_upper(item_ids, |i, j| grid[i][j]))
    }

    pub fn order(&self) -> usize {
        self.item_ids.len()
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn get(&self, i: usize, j: usize) -> Tfn {
        self.entries[i * self.order() + j]
    }

    pub fn row(&self, i: usize) -> &[Tfn] {
        let n = self.order();
        &self.entries[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> Vec<Vec<Tfn>> {
        (0..self.order()).map(|i| self.row(i).to_vec()).collect()
    }

    /// Reads the upper triangle back as scale scores, if every entry is a
    /// scale triple.
    pub fn upper_scores(&self) -> Option<Vec<PairScore>> {
        upper_pairs(self.order())
            .map(|(i, j)| {
                SignedScore::from_tfn(&self.get(i, j), 1e-9).map(|score| PairScore { i, j, score })
            })
            .collect()
    }

    /// Defuzzifies the upper triangle and rebuilds the lower triangle as its
    /// exact reciprocal.
    pub fn crispify(&self, method: Defuzz) -> CrispMatrix {
        let n = self.order();
        let mut entries = vec![1.0; n * n];
        for (i, j) in upper_pairs(n) {
            let v = self.get(i, j).defuzzify(method);
            entries[i * n + j] = v;
            entries[j * n + i] = 1.0 / v;
        }
        CrispMatrix { n, entries }
    }

    /// Same comparisons with items reordered so that new item `k` is old
    /// item `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let ids = perm.iter().map(|&p| self.item_ids[p].clone()).collect();
        Self::from_upper(ids, |i, j| self.get(perm[i], perm[j]))
    }
}

/// Componentwise geometric mean of several experts' matrices over the same
/// items. Reciprocity is rebuilt from the aggregated upper triangle.
pub fn aggregate_experts(
    matrices: &[FuzzyComparisonMatrix],
) -> Result<FuzzyComparisonMatrix, JudgmentError> {
    let first = matrices.first().ok_or(JudgmentError::NoMatrices)?;
    if matrices.iter().any(|m| m.item_ids != first.item_ids) {
        return Err(JudgmentError::ShapeMismatch);
    }
    if matrices.len() == 1 {
        return Ok(first.clone());
    }
    let k = matrices.len() as f64;
    let mut failure = None;
    let aggregated = FuzzyComparisonMatrix::from_upper(first.item_ids.clone(), |i, j| {
        let mut logs = [0.0f64; 3];
        for m in matrices {
            for (acc, v) in logs.iter_mut().zip(m.get(i, j).components()) {
                *acc += v.ln();
            }
        }
        let [l, m, u] = logs.map(|s| (s / k).exp());
        Tfn::new(l, m, u).unwrap_or_else(|e| {
            failure = Some(e);
            Tfn::ONE
        })
    });
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(aggregated),
    }
}

/// Crisp positive reciprocal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CrispMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl CrispMatrix {
    /// Validates a row-major grid: positive entries, unit diagonal and
    /// reciprocity within [`RECIPROCITY_TOL`] (relative).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, JudgmentError> {
        let n = rows.len();
        if !(1..=MAX_ORDER).contains(&n) {
            return Err(JudgmentError::OrderOutOfRange(n));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(JudgmentError::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !(v.is_finite() && v > 0.0) {
                    return Err(JudgmentError::NonPositive { i, j });
                }
            }
            if (row[i] - 1.0).abs() > RECIPROCITY_TOL {
                return Err(JudgmentError::Diagonal(i));
            }
            entries.extend_from_slice(row);
        }
        for (i, j) in upper_pairs(n) {
            if (rows[i][j] * rows[j][i] - 1.0).abs() > RECIPROCITY_TOL {
                return Err(JudgmentError::NotReciprocal { i, j });
            }
        }
        Ok(CrispMatrix { n, entries })
    }

    /// Perfectly consistent matrix `a_ij = w_i / w_j`.
    pub fn consistent(weights: &[f64]) -> Result<Self, JudgmentError> {
        let rows: Vec<Vec<f64>> = weights
            .iter()
            .map(|wi| weights.iter().map(|wj| wi / wj).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// `A · v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let entries = (0..n * n)
            .map(|k| self.get(perm[k / n], perm[k % n]))
            .collect();
        CrispMatrix { n, entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::{scale_lookup, PreciseScore};
    use proptest::prelude::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|k| format!("X{k}")).collect()
    }

    fn set(pairs: &[(usize, usize, i64)]) -> ExpertJudgmentSet {
        ExpertJudgmentSet {
            expert_id: "e1".into(),
            node_id: "goal".into(),
            upper_triangle: pairs
                .iter()
                .map(|&(i, j, s)| PairScore {
                    i,
                    j,
                    score: SignedScore::new(s).unwrap(),
                })
                .collect(),
        }
    }

    fn tfn(l: f64, m: f64, u: f64) -> Tfn {
        Tfn::new(l, m, u).unwrap()
    }

    #[test]
    fn two_items_absolute() {
        let m = FuzzyComparisonMatrix::from_scores(ids(2), &set(&[(0, 1, 9)])).unwrap();
        assert_eq!(m.get(0, 0), Tfn::ONE);
        assert_eq!(m.get(0, 1).components(), [8.0, 9.0, 9.0]);
        assert_eq!(m.get(1, 0).components(), [1.0 / 9.0, 1.0 / 9.0, 0.125]);
        assert_eq!(m.get(1, 1), Tfn::ONE);
    }

    #[test]
    fn indifference_gives_all_ones() {
        let m = FuzzyComparisonMatrix::from_scores(ids(2), &set(&[(0, 1, 1)])).unwrap();
        assert!(m.rows().iter().flatten().all(|t| *t == Tfn::ONE));
        let c = FuzzyComparisonMatrix::indifferent(ids(4))
            .unwrap()
            .crispify(Defuzz::Middle);
        assert!(c.rows().iter().flatten().all(|&v| v == 1.0));
    }

    #[test]
    fn incomplete_and_duplicate_pairs() {
        let err =
            FuzzyComparisonMatrix::from_scores(ids(3), &set(&[(0, 1, 3), (0, 2, 3)])).unwrap_err();
        assert_eq!(err, JudgmentError::MissingPairs(vec![(1, 2)]));
        assert!(err.to_string().contains("(1, 2)"));

        let err =
            FuzzyComparisonMatrix::from_scores(ids(2), &set(&[(0, 1, 3), (0, 1, 5)])).unwrap_err();
        assert_eq!(err, JudgmentError::DuplicatePair(0, 1));

        let err = FuzzyComparisonMatrix::from_scores(ids(2), &set(&[(1, 0, 3)])).unwrap_err();
        assert!(matches!(err, JudgmentError::InvalidPair { i: 1, j: 0, .. }));

        let err = FuzzyComparisonMatrix::from_scores(ids(16), &set(&[])).unwrap_err();
        assert_eq!(err, JudgmentError::OrderOutOfRange(16));
    }

    #[test]
    fn missing_pairs_count() {
        let s = set(&[(0, 1, 3), (0, 2, 3), (3, 4, 2)]);
        assert_eq!(s.missing_pairs(5).len(), 7);
    }

    #[test]
    fn aggregate_geometric_mean() {
        let a = FuzzyComparisonMatrix::from_grid(
            ids(2),
            &[
                vec![Tfn::ONE, tfn(1.0, 2.0, 3.0)],
                vec![tfn(1.0, 2.0, 3.0).reciprocal(), Tfn::ONE],
            ],
        )
        .unwrap();
        let b = FuzzyComparisonMatrix::from_scores(ids(2), &set(&[(0, 1, 3)])).unwrap();
        let g = aggregate_experts(&[a.clone(), b]).unwrap();
        let expected = tfn(2f64.sqrt(), 6f64.sqrt(), 12f64.sqrt());
        assert!(g.get(0, 1).approx_eq(&expected, 1e-12));
        assert!(g.get(1, 0).approx_eq(&expected.reciprocal(), 1e-12));
        assert!((g.get(0, 1).m() - 2.4495).abs() < 1e-4);

        let same = aggregate_experts(&[a.clone(), a.clone()]).unwrap();
        assert!(same.get(0, 1).approx_eq(&a.get(0, 1), 1e-12));

        assert_eq!(aggregate_experts(&[]), Err(JudgmentError::NoMatrices));
        let c = FuzzyComparisonMatrix::indifferent(ids(3)).unwrap();
        assert_eq!(
            aggregate_experts(&[a, c]),
            Err(JudgmentError::ShapeMismatch)
        );
    }

    #[test]
    fn crispify_restores_exact_reciprocity() {
        let m = FuzzyComparisonMatrix::from_scores(ids(2), &set(&[(0, 1, -9)])).unwrap();
        let c = m.crispify(Defuzz::Middle);
        assert_eq!(c.rows(), vec![vec![1.0, 1.0 / 9.0], vec![9.0, 1.0]]);
        let c = m.crispify(Defuzz::Centroid);
        assert_eq!(c.get(0, 1) * c.get(1, 0), 1.0);
    }

    #[test]
    fn grid_validation() {
        let bad_diag = [vec![tfn(1.0, 2.0, 3.0), Tfn::ONE], vec![Tfn::ONE, Tfn::ONE]];
        assert_eq!(
            FuzzyComparisonMatrix::from_grid(ids(2), &bad_diag),
            Err(JudgmentError::Diagonal(0))
        );
        let s = scale_lookup(PreciseScore::new(3).unwrap());
        let not_recip = [vec![Tfn::ONE, s], vec![s, Tfn::ONE]];
        assert_eq!(
            FuzzyComparisonMatrix::from_grid(ids(2), &not_recip),
            Err(JudgmentError::NotReciprocal { i: 0, j: 1 })
        );
        assert!(CrispMatrix::from_rows(&[vec![1.0, 2.0], vec![0.4, 1.0]]).is_err());
        assert!(CrispMatrix::from_rows(&[vec![1.0, -2.0], vec![-0.5, 1.0]]).is_err());
    }

    fn arb_judgments() -> impl Strategy<Value = (usize, Vec<i64>)> {
        (2usize..=9).prop_flat_map(|n| {
            let k = n * (n - 1) / 2;
            let score = prop_oneof![(1i64..=9), (-9i64..=-2)];
            (Just(n), proptest::collection::vec(score, k))
        })
    }

    proptest! {
        #[test]
        fn scores_round_trip_and_reciprocity((n, scores) in arb_judgments()) {
            let pairs: Vec<_> = upper_pairs(n).zip(&scores).map(|((i, j), &s)| (i, j, s)).collect();
            let m = FuzzyComparisonMatrix::from_scores(ids(n), &set(&pairs)).unwrap();
            for i in 0..n {
                prop_assert_eq!(m.get(i, i), Tfn::ONE);
                for j in 0..n {
                    prop_assert!(m.get(j, i).approx_eq(&m.get(i, j).reciprocal(), 1e-9));
                }
            }
            let back: Vec<i64> = m.upper_scores().unwrap().iter().map(|p| p.score.value()).collect();
            prop_assert_eq!(back, scores);

            let c = m.crispify(Defuzz::Centroid);
            prop_assert_eq!(c.order(), n);
            prop_assert!(CrispMatrix::from_rows(&c.rows()).is_ok());
        }

        #[test]
        fn aggregation_is_permutation_invariant(
            (n, a) in arb_judgments(),
            seed in any::<u64>(),
        ) {
            let b: Vec<i64> = a.iter().map(|s| if s.abs() > 2 { s - s.signum() } else { *s }).collect();
            let c: Vec<i64> = a.iter().map(|s| -s).map(|s| if s == -1 { 1 } else { s }).collect();
            let mk = |v: &[i64]| {
                let pairs: Vec<_> = upper_pairs(n).zip(v).map(|((i, j), &s)| (i, j, s)).collect();
                FuzzyComparisonMatrix::from_scores(ids(n), &set(&pairs)).unwrap()
            };
            let (ma, mb, mc) = (mk(&a), mk(&b), mk(&c));
            let one = aggregate_experts(&[ma.clone(), mb.clone(), mc.clone()]).unwrap();
            let other = if seed % 2 == 0 {
                aggregate_experts(&[mc, ma, mb]).unwrap()
            } else {
                aggregate_experts(&[mb, mc, ma]).unwrap()
            };
            for i in 0..n {
                for j in 0..n {
                    prop_assert!(one.get(i, j).approx_eq(&other.get(i, j), 1e-12));
                }
            }
        }
    }
}
