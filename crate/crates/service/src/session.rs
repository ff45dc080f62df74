use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use fahp_core::consistency::{self, ConsistencyReport};
use fahp_core::hierarchy::{self, consistency_reports, DecisionResult, Hierarchy, NodeJudgment};
use fahp_core::judgment::JudgmentError;
use fahp_core::project::{save_project_path, ProjectFile};
use fahp_core::{Execution, ExpertJudgmentSet, FuzzyComparisonMatrix, PairScore};
use serde::Serialize;

use crate::error::{ApiError, InconsistentNode};

/// Everything derived from the current project. Built lazily and dropped on
/// every edit.
#[derive(Debug)]
pub struct Computed {
    pub hierarchy: Hierarchy,
    /// Evaluated with inconsistent nodes allowed; gating is up to the caller.
    pub result: DecisionResult,
    pub consistency: BTreeMap<String, ConsistencyReport>,
}

impl Computed {
    pub fn inconsistent(&self) -> Vec<InconsistentNode> {
        self.consistency
            .iter()
            .filter(|(_, r)| !r.acceptable)
            .map(|(node, r)| InconsistentNode {
                node: node.clone(),
                cr: r.cr,
                threshold: r.threshold,
            })
            .collect()
    }
}

#[derive(Debug, Serialize)]
pub struct JudgmentUpdate {
    pub node: String,
    pub items: Vec<String>,
    #[serde(flatten)]
    pub report: ConsistencyReport,
}

/// The loaded project plus its result cache.
#[derive(Debug)]
pub struct Session {
    project: ProjectFile,
    path: Option<PathBuf>,
    dirty: bool,
    exec: Execution,
    cache: Mutex<Option<Arc<Computed>>>,
}

impl Session {
    /// Fails if the project does not validate.
    pub fn new(project: ProjectFile, path: Option<PathBuf>) -> Result<Self, ApiError> {
        project
            .to_hierarchy()
            .map_err(|r| ApiError::Unprocessable(r.to_string()))?;
        Ok(Session {
            project,
            path,
            dirty: false,
            exec: Execution::default(),
            cache: Mutex::new(None),
        })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn project(&self) -> &ProjectFile {
        &self.project
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty
    }

    pub fn is_cached(&self) -> bool {
        self.cache.lock().expect("cache lock").is_some()
    }

    /// Cached results, computing them first if needed.
    pub fn computed(&self) -> Result<Arc<Computed>, ApiError> {
        let mut cache = self.cache.lock().expect("cache lock");
        if let Some(c) = cache.as_ref() {
            return Ok(Arc::clone(c));
        }
        let c = Arc::new(self.compute()?);
        *cache = Some(Arc::clone(&c));
        Ok(c)
    }

    fn compute(&self) -> Result<Computed, ApiError> {
        let internal = |e: &dyn std::fmt::Display| ApiError::Internal(e.to_string());
        let hierarchy = self.project.to_hierarchy().map_err(|e| internal(&e))?;
        let settings = &self.project.settings;
        let opts = settings.eval_options(true, self.exec);
        let result = hierarchy::evaluate(&hierarchy, &opts).map_err(|e| internal(&e))?;
        let consistency = consistency_reports(
            &hierarchy,
            settings.defuzz,
            settings.cr_threshold,
            self.exec,
        )
        .map_err(|e| internal(&e))?;
        Ok(Computed {
            hierarchy,
            result,
            consistency,
        })
    }

    fn invalidate(&mut self) {
        *self.cache.get_mut().expect("cache lock") = None;
    }

    /// Replaces the judgments of `node` and reports the new matrix's
    /// consistency. The project is left untouched on error.
    pub fn set_judgment(
        &mut self,
        node: &str,
        expert: Option<String>,
        scores: Vec<PairScore>,
    ) -> Result<JudgmentUpdate, ApiError> {
        let current = self
            .project
            .to_hierarchy()
            .map_err(|e| ApiError::Internal(e.to_string()))?;
        let items: Vec<String> = current
            .node(node)
            .ok_or_else(|| ApiError::UnknownNode(node.to_string()))?
            .items
            .iter()
            .map(|s| s.to_string())
            .collect();
        if items.len() < 2 {
            return Err(ApiError::BadRequest(format!(
                "node {node:?} has a single item; there is nothing to compare"
            )));
        }
        let set = ExpertJudgmentSet {
            expert_id: expert.clone().unwrap_or_default(),
            node_id: node.to_string(),
            upper_triangle: scores.clone(),
        };
        FuzzyComparisonMatrix::from_scores(items.clone(), &set).map_err(|e| match e {
            JudgmentError::MissingPairs(missing) => ApiError::Incomplete {
                node: node.to_string(),
                missing,
            },
            other => ApiError::BadRequest(other.to_string()),
        })?;

        let mut next = self.project.clone();
        next.set_scores(node, expert, scores);
        let h = next
            .to_hierarchy()
            .map_err(|r| ApiError::BadRequest(r.to_string()))?;
        let Some(NodeJudgment::Fuzzy(m)) = h.judgments.get(node) else {
            return Err(ApiError::Internal(format!("{node} lost its judgments")));
        };
        let settings = &next.settings;
        let report = consistency::check(&m.crispify(settings.defuzz), settings.cr_threshold)
            .map_err(|e| ApiError::Internal(e.to_string()))?;

        self.project = next;
        self.dirty = true;
        self.invalidate();
        Ok(JudgmentUpdate {
            node: node.to_string(),
            items,
            report,
        })
    }

    /// Writes the project back to the file it was loaded from.
    pub fn save(&mut self) -> Result<PathBuf, ApiError> {
        let path = self
            .path
            .clone()
            .ok_or_else(|| ApiError::Unprocessable("session has no project path".into()))?;
        save_project_path(&self.project, &path).map_err(|e| ApiError::Io(e.to_string()))?;
        self.dirty = false;
        Ok(path)
    }
}
