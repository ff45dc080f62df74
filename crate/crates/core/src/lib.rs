//! Fuzzy AHP decision engine.
//!
//! Linguistic pairwise judgments become triangular fuzzy comparison
//! matrices; matrices are checked for consistency and turned into local
//! priority vectors; local vectors are synthesized down the hierarchy into
//! global alternative scores; and scenario analysis shows how the ranking
//! reacts when one criterion gains weight.
//!
//! ```
//! use fahp_core::{hierarchy, project};
//!
//! let fixture = project::turkiye();
//! let h = fixture.project.to_hierarchy().unwrap();
//! let result = hierarchy::evaluate(&h, &Default::default()).unwrap();
//! assert_eq!(result.ranking.order[0], "A2");
//! ```

pub mod consistency;
pub mod exec;
pub mod fuzzy;
pub mod hierarchy;
pub mod judgment;
pub mod project;
pub mod report;
pub mod sensitivity;
pub mod weights;

pub use consistency::{ConsistencyReport, InconsistentCell};
pub use exec::Execution;
pub use fuzzy::{Defuzz, PreciseScore, SignedScore, Tfn};
pub use hierarchy::{DecisionResult, EvalOptions, Hierarchy, Ranking};
pub use judgment::{CrispMatrix, ExpertJudgmentSet, FuzzyComparisonMatrix, PairScore};
pub use project::{ProjectFile, Settings};
pub use sensitivity::{Scenario, SensitivityReport};
pub use weights::{DerivationMethod, WeightVector};
