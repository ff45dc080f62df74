//! Priority vectors derived from comparison matrices.
//!
//! Two derivations are offered. `GmMiddle` takes the modal value of every
//! judgment and normalizes the row geometric means of the resulting crisp
//! matrix. `Buckley` keeps the judgments fuzzy: fuzzy row geometric means are
//! divided by their fuzzy sum, centroid-defuzzified and renormalized.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::{Defuzz, Tfn};
use crate::judgment::{CrispMatrix, FuzzyComparisonMatrix};

/// Allowed drift of a weight vector's sum from 1.
pub const SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("node {node}: {items} items but {weights} weights")]
    LengthMismatch {
        node: String,
        items: usize,
        weights: usize,
    },
    #[error("node {node}: weight for {item} must be positive and finite, got {value}")]
    NonPositive {
        node: String,
        item: String,
        value: f64,
    },
    #[error("node {node}: weights sum to {sum}, expected 1")]
    NotNormalized { node: String, sum: f64 },
    #[error("node {0}: empty weight vector")]
    Empty(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivationMethod {
    #[default]
    GmMiddle,
    Buckley,
}

impl DerivationMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            DerivationMethod::GmMiddle => "gm-middle",
            DerivationMethod::Buckley => "buckley",
        }
    }
}

/// Where a weight vector came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightOrigin {
    GmMiddle,
    Buckley,
    /// Supplied directly in the project rather than derived from judgments.
    Direct,
    /// Rescaled by a sensitivity scenario.
    Scenario,
}

impl From<DerivationMethod> for WeightOrigin {
    fn from(m: DerivationMethod) -> Self {
        match m {
            DerivationMethod::GmMiddle => WeightOrigin::GmMiddle,
            DerivationMethod::Buckley => WeightOrigin::Buckley,
        }
    }
}

/// Normalized, strictly positive priorities of a node's children (or of the
/// alternatives, for a leaf criterion).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub node_id: String,
    pub origin: WeightOrigin,
    pub items: Vec<String>,
    pub weights: Vec<f64>,
}

impl WeightVector {
    pub fn new(
        node_id: impl Into<String>,
        origin: WeightOrigin,
        items: Vec<String>,
        weights: Vec<f64>,
    ) -> Result<Self, WeightError> {
        let node = node_id.into();
        Self::check_shape(&node, &items, &weights)?;
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(WeightError::NotNormalized { node, sum });
        }
        Ok(WeightVector {
            node_id: node,
            origin,
            items,
            weights,
        })
    }

    /// Scales positive `raw` values to sum 1.
    pub fn normalized(
        node_id: impl Into<String>,
        origin: WeightOrigin,
        items: Vec<String>,
        raw: Vec<f64>,
    ) -> Result<Self, WeightError> {
        let node = node_id.into();
        Self::check_shape(&node, &items, &raw)?;
        let sum: f64 = raw.iter().sum();
        let weights = raw.into_iter().map(|w| w / sum).collect();
        Ok(WeightVector {
            node_id: node,
            origin,
            items,
            weights,
        })
    }

    fn check_shape(node: &str, items: &[String], weights: &[f64]) -> Result<(), WeightError> {
        if items.is_empty() {
            return Err(WeightError::Empty(node.to_string()));
        }
        if items.len() != weights.len() {
            return Err(WeightError::LengthMismatch {
                node: node.to_string(),
                items: items.len(),
                weights: weights.len(),
            });
        }
        if let Some((item, &value)) = items
            .iter()
            .zip(weights)
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(WeightError::NonPositive {
                node: node.to_string(),
                item: item.clone(),
                value,
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn get(&self, item: &str) -> Option<f64> {
        self.position(item).map(|k| self.weights[k])
    }

    pub fn position(&self, item: &str) -> Option<usize> {
        self.items.iter().position(|i| i == item)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.items
            .iter()
            .map(String::as_str)
            .zip(self.weights.iter().copied())
    }
}

/// Normalized row geometric means of a crisp matrix.
pub fn row_geometric_mean(matrix: &CrispMatrix) -> Vec<f64> {
    let n = matrix.order();
    let exponent = 1.0 / n as f64;
    let means: Vec<f64> = (0..n)
        .map(|i| matrix.row(i).iter().product::<f64>().powf(exponent))
        .collect();
    let total: f64 = means.iter().sum();
    means.into_iter().map(|g| g / total).collect()
}

pub fn derive_gm_middle(node_id: &str, matrix: &FuzzyComparisonMatrix) -> WeightVector {
    let crisp = matrix.crispify(Defuzz::Middle);
    WeightVector {
        node_id: node_id.to_string(),
        origin: WeightOrigin::GmMiddle,
        items: matrix.item_ids().to_vec(),
        weights: row_geometric_mean(&crisp),
    }
}

pub fn derive_buckley(node_id: &str, matrix: &FuzzyComparisonMatrix) -> WeightVector {
    let n = matrix.order();
    let row_means: Vec<Tfn> = (0..n)
        .map(|i| {
            let product = matrix.row(i).iter().fold(Tfn::ONE, |acc, &t| acc * t);
            product.nth_root(n as u32).expect("order >= 2")
        })
        .collect();
    let (sl, sm, su) = row_means.iter().fold((0.0, 0.0, 0.0), |(l, m, u), t| {
        (l + t.l(), m + t.m(), u + t.u())
    });
    // Fuzzy division by the sum pairs each bound with the opposite bound of
    // the divisor.
    let centroids: Vec<f64> = row_means
        .iter()
        .map(|r| (r.l() / su + r.m() / sm + r.u() / sl) / 3.0)
        .collect();
    let total: f64 = centroids.iter().sum();
    WeightVector {
        node_id: node_id.to_string(),
        origin: WeightOrigin::Buckley,
        items: matrix.item_ids().to_vec(),
        weights: centroids.into_iter().map(|c| c / total).collect(),
    }
}

pub fn derive(
    node_id: &str,
    matrix: &FuzzyComparisonMatrix,
    method: DerivationMethod,
) -> WeightVector {
    match method {
        DerivationMethod::GmMiddle => derive_gm_middle(node_id, matrix),
        DerivationMethod::Buckley => derive_buckley(node_id, matrix),
    }
}
