//! Consistency ratio of crisp comparison matrices and localization of the
//! judgments that contribute most to inconsistency.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::fuzzy::SignedScore;
use crate::judgment::{upper_pairs, CrispMatrix, MAX_ORDER};
use crate::weights::{row_geometric_mean, SUM_TOL};

/// Conventional acceptability bound on the consistency ratio.
pub const DEFAULT_THRESHOLD: f64 = 0.1;

/// Cells whose log residual is below this are treated as consistent.
const RESIDUAL_FLOOR: f64 = 1e-9;

/// Random index by matrix order (index 0 unused).
///
/// Order 13 is 1.56. Some printings of the table show 2.56, which breaks the
/// monotone sequence between 1.54 and 1.58.
const RANDOM_INDEX: [f64; MAX_ORDER + 1] = [
    0.0, 0.0, 0.0, 0.52, 0.89, 1.11, 1.25, 1.35, 1.40, 1.45, 1.49, 1.52, 1.54, 1.56, 1.58, 1.59,
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConsistencyError {
    #[error("no random index for order {0} (supported: 1..={MAX_ORDER})")]
    UnsupportedOrder(usize),
    #[error("weight vector has {found} entries for a matrix of order {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("weights must be strictly positive and sum to 1")]
    InvalidWeights,
    #[error("threshold must be positive, got {0}")]
    InvalidThreshold(f64),
}

/// A cell of the upper triangle ranked by how far it departs from the ratio
/// implied by the weights, with the nearest scale judgment as a revision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InconsistentCell {
    pub i: usize,
    pub j: usize,
    /// `|ln(a_ij * w_j / w_i)|`.
    pub magnitude: f64,
    pub current: f64,
    pub suggested: SignedScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub order: usize,
    pub lambda_max: f64,
    pub ci: f64,
    pub ri: f64,
    pub cr: f64,
    pub threshold: f64,
    pub acceptable: bool,
    pub worst_entries: Vec<InconsistentCell>,
}

pub fn random_index(order: usize) -> Result<f64, ConsistencyError> {
    if (1..=MAX_ORDER).contains(&order) {
        Ok(RANDOM_INDEX[order])
    } else {
        Err(ConsistencyError::UnsupportedOrder(order))
    }
}

fn check_weights(matrix: &CrispMatrix, weights: &[f64]) -> Result<(), ConsistencyError> {
    if weights.len() != matrix.order() {
        return Err(ConsistencyError::DimensionMismatch {
            expected: matrix.order(),
            found: weights.len(),
        });
    }
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) || (sum - 1.0).abs() > SUM_TOL {
        return Err(ConsistencyError::InvalidWeights);
    }
    Ok(())
}

/// Mean over rows of `(A w)_i / w_i`.
pub fn lambda_max_estimate(matrix: &CrispMatrix, weights: &[f64]) -> Result<f64, ConsistencyError> {
    check_weights(matrix, weights)?;
    let aw = matrix.mul_vec(weights);
    let n = matrix.order() as f64;
    Ok(aw.iter().zip(weights).map(|(a, w)| a / w).sum::<f64>() / n)
}

/// Upper-triangle cells ordered by decreasing log residual. Residuals equal
/// to within 1e-9 are ordered by `(i, j)`.
fn ranked_cells(matrix: &CrispMatrix, weights: &[f64]) -> Vec<InconsistentCell> {
    let mut cells: Vec<InconsistentCell> = upper_pairs(matrix.order())
        .map(|(i, j)| {
            let current = matrix.get(i, j);
            InconsistentCell {
                i,
                j,
                magnitude: (current * weights[j] / weights[i]).ln().abs(),
                current,
                suggested: SignedScore::nearest(weights[i] / weights[j]),
            }
        })
        .filter(|c| c.magnitude >= RESIDUAL_FLOOR)
        .collect();
    cells.sort_by_key(|c| {
        (
            std::cmp::Reverse((c.magnitude * 1e9).round() as i64),
            c.i,
            c.j,
        )
    });
    cells
}

pub fn consistency_ratio(
    matrix: &CrispMatrix,
    weights: &[f64],
    threshold: f64,
) -> Result<ConsistencyReport, ConsistencyError> {
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(ConsistencyError::InvalidThreshold(threshold));
    }
    let n = matrix.order();
    let ri = random_index(n)?;
    let lambda_max = lambda_max_estimate(matrix, weights)?;
    let ci = if n > 1 {
        (lambda_max - n as f64) / (n as f64 - 1.0)
    } else {
        0.0
    };
    // Orders 1 and 2 are always consistent and have RI = 0.
    let cr = if ri > 0.0 { ci / ri } else { 0.0 };
    Ok(ConsistencyReport {
        order: n,
        lambda_max,
        ci,
        ri,
        cr,
        threshold,
        acceptable: cr < threshold,
        worst_entries: ranked_cells(matrix, weights),
    })
}

/// Report using the matrix's own row-geometric-mean weights.
pub fn check(matrix: &CrispMatrix, threshold: f64) -> Result<ConsistencyReport, ConsistencyError> {
    consistency_ratio(matrix, &row_geometric_mean(matrix), threshold)
}

/// Checks many matrices, one report per input in input order.
pub fn check_batch(
    matrices: &[CrispMatrix],
    threshold: f64,
    exec: Execution,
) -> Result<Vec<ConsistencyReport>, ConsistencyError> {
    exec.try_map(matrices, |m| check(m, threshold))
}

/// The `k` most inconsistent cells with a suggested revision for each.
pub fn locate_inconsistency(
    matrix: &CrispMatrix,
    weights: &[f64],
    k: usize,
) -> Result<Vec<InconsistentCell>, ConsistencyError> {
    check_weights(matrix, weights)?;
    let mut cells = ranked_cells(matrix, weights);
    cells.truncate(k);
    Ok(cells)
}
