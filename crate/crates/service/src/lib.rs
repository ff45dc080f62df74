//! Local HTTP service over one loaded project.
//!
//! | Method | Path | Response |
//! |---|---|---|
//! | GET | `/model` | hierarchy, alternatives, settings and the fuzzy scale |
//! | GET | `/judgments/{node}` | stored judgments and consistency for a node |
//! | PUT | `/judgments/{node}` | replace a node's scores; returns its consistency report |
//! | GET | `/weights` | local and global weights (`?node=` for one node) |
//! | GET | `/ranking` | final ranking; 422 while any matrix is inconsistent unless `?override=true` |
//! | POST | `/sensitivity` | scenario analysis for `{"factor": f}` |
//! | POST | `/save` | write the project back to its file |
//!
//! Edits take the write lock, so they are applied one at a time; reads share
//! the read lock and see a consistent snapshot. Every edit drops the result
//! cache.

mod error;
mod session;

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::routing::{get, post};
use axum::{Json, Router};
use fahp_core::consistency::ConsistencyReport;
use fahp_core::hierarchy::{Alternative, CriterionNode, NodeJudgment};
use fahp_core::project::{JudgmentEntry, Settings};
use fahp_core::sensitivity::{run_scenarios, SensitivityError, SensitivityReport};
use fahp_core::{PairScore, PreciseScore, Ranking, Tfn, WeightVector};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;
use tokio::sync::RwLock;

pub use error::{ApiError, InconsistentNode};
pub use session::{Computed, JudgmentUpdate, Session};

pub type AppState = Arc<RwLock<Session>>;

type ApiResult<T> = Result<Json<T>, ApiError>;

pub fn state(session: Session) -> AppState {
    Arc::new(RwLock::new(session))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/model", get(model))
        .route("/judgments/{node}", get(get_judgments).put(put_judgments))
        .route("/weights", get(weights))
        .route("/ranking", get(ranking))
        .route("/sensitivity", post(sensitivity))
        .route("/save", post(save))
        .with_state(state)
}

/// Serves until the listener fails.
pub async fn serve(listener: TcpListener, state: AppState) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(e.to_string()))
}

#[derive(Debug, Serialize)]
pub struct ScaleEntry {
    pub score: u8,
    pub term: &'static str,
    pub tfn: Tfn,
    pub reciprocal: Tfn,
}

#[derive(Debug, Serialize)]
pub struct NodeInfo {
    pub id: String,
    pub label: String,
    pub parent: Option<String>,
    pub items: Vec<String>,
    pub is_leaf: bool,
    /// `judgments`, `direct` or `none` (single child).
    pub source: &'static str,
}

#[derive(Debug, Serialize)]
pub struct ModelResponse {
    pub goal: String,
    pub criteria: Vec<CriterionNode>,
    pub alternatives: Vec<Alternative>,
    pub nodes: Vec<NodeInfo>,
    pub settings: Settings,
    pub scale: Vec<ScaleEntry>,
    pub dirty: bool,
}

async fn model(State(state): State<AppState>) -> ApiResult<ModelResponse> {
    let s = state.read().await;
    let c = s.computed()?;
    let h = &c.hierarchy;
    let nodes = h
        .decision_nodes()
        .into_iter()
        .map(|n| NodeInfo {
            id: n.id.to_string(),
            label: h.label(n.id).unwrap_or(&h.goal).to_string(),
            parent: n.parent.map(str::to_string),
            items: n.items.iter().map(|s| s.to_string()).collect(),
            is_leaf: n.is_leaf,
            source: match h.judgments.get(n.id) {
                Some(NodeJudgment::Fuzzy(_)) => "judgments",
                Some(NodeJudgment::Direct(_)) => "direct",
                None => "none",
            },
        })
        .collect();
    let scale = PreciseScore::all()
        .map(|p| {
            let tfn = fahp_core::fuzzy::scale_lookup(p);
            ScaleEntry {
                score: p.value(),
                term: p.linguistic_term(),
                tfn,
                reciprocal: tfn.reciprocal(),
            }
        })
        .collect();
    let p = s.project();
    Ok(Json(ModelResponse {
        goal: p.goal.clone(),
        criteria: p.criteria.clone(),
        alternatives: p.alternatives.clone(),
        nodes,
        settings: p.settings,
        scale,
        dirty: s.is_dirty(),
    }))
}

#[derive(Debug, Serialize)]
pub struct JudgmentsResponse {
    pub node: String,
    pub items: Vec<String>,
    pub entries: Vec<JudgmentEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direct_weights: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistency: Option<ConsistencyReport>,
}

async fn get_judgments(
    State(state): State<AppState>,
    Path(node): Path<String>,
) -> ApiResult<JudgmentsResponse> {
    let s = state.read().await;
    let c = s.computed()?;
    let info = c
        .hierarchy
        .node(&node)
        .ok_or_else(|| ApiError::UnknownNode(node.clone()))?;
    let p = s.project();
    Ok(Json(JudgmentsResponse {
        items: info.items.iter().map(|s| s.to_string()).collect(),
        entries: p
            .judgments
            .iter()
            .filter(|e| e.node == node)
            .cloned()
            .collect(),
        direct_weights: p.direct_weights.get(&node).cloned(),
        consistency: c.consistency.get(&node).cloned(),
        node,
    }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PutJudgments {
    scores: Vec<PairScore>,
    #[serde(default)]
    expert: Option<String>,
}

async fn put_judgments(
    State(state): State<AppState>,
    Path(node): Path<String>,
    body: Bytes,
) -> ApiResult<JudgmentUpdate> {
    let mut s = state.write().await;
    // Unknown nodes are reported before body problems.
    if s.computed()?.hierarchy.node(&node).is_none() {
        return Err(ApiError::UnknownNode(node));
    }
    let req: PutJudgments = parse_body(&body)?;
    Ok(Json(s.set_judgment(&node, req.expert, req.scores)?))
}

#[derive(Debug, Deserialize)]
struct WeightsQuery {
    node: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct NodeConsistency {
    pub cr: f64,
    pub acceptable: bool,
}

#[derive(Debug, Serialize)]
pub struct WeightsResponse {
    pub method: &'static str,
    pub defuzz: &'static str,
    pub local_weights: BTreeMap<String, WeightVector>,
    pub global_criterion_weights: BTreeMap<String, f64>,
    pub consistency: BTreeMap<String, NodeConsistency>,
}

async fn weights(
    State(state): State<AppState>,
    Query(q): Query<WeightsQuery>,
) -> ApiResult<WeightsResponse> {
    let s = state.read().await;
    let c = s.computed()?;
    let mut local = c.result.local_weights.clone();
    let mut consistency: BTreeMap<String, NodeConsistency> = c
        .consistency
        .iter()
        .map(|(k, r)| {
            (
                k.clone(),
                NodeConsistency {
                    cr: r.cr,
                    acceptable: r.acceptable,
                },
            )
        })
        .collect();
    if let Some(node) = &q.node {
        let w = local
            .remove(node)
            .ok_or_else(|| ApiError::UnknownNode(node.clone()))?;
        local = BTreeMap::from([(node.clone(), w)]);
        consistency.retain(|k, _| k == node);
    }
    let settings = s.project().settings;
    Ok(Json(WeightsResponse {
        method: settings.method.as_str(),
        defuzz: settings.defuzz.as_str(),
        local_weights: local,
        global_criterion_weights: c.result.global_criterion_weights.clone(),
        consistency,
    }))
}

#[derive(Debug, Default, Deserialize)]
struct OverrideQuery {
    #[serde(rename = "override", default)]
    allow: bool,
}

/// 422 unless every matrix passes or the caller overrides.
fn gate(c: &Computed, allow: bool) -> Result<Vec<InconsistentNode>, ApiError> {
    let bad = c.inconsistent();
    if bad.is_empty() || allow {
        Ok(bad)
    } else {
        Err(ApiError::Inconsistent(bad))
    }
}

#[derive(Debug, Serialize)]
pub struct RankingResponse {
    #[serde(flatten)]
    pub ranking: Ranking,
    pub alternatives: Vec<String>,
    pub global_scores: Vec<f64>,
    pub scores: BTreeMap<String, f64>,
    /// Per top-level criterion, in alternative order.
    pub criterion_scores: BTreeMap<String, Vec<f64>>,
    pub main_weights: WeightVector,
    /// Inconsistent nodes that were overridden; empty when all pass.
    pub overridden: Vec<InconsistentNode>,
}

async fn ranking(
    State(state): State<AppState>,
    Query(q): Query<OverrideQuery>,
) -> ApiResult<RankingResponse> {
    let s = state.read().await;
    let c = s.computed()?;
    let overridden = gate(&c, q.allow)?;
    let r = &c.result;
    Ok(Json(RankingResponse {
        ranking: r.ranking.clone(),
        alternatives: r.alternatives.clone(),
        global_scores: r.global_scores.clone(),
        scores: r
            .alternatives
            .iter()
            .cloned()
            .zip(r.global_scores.iter().copied())
            .collect(),
        criterion_scores: r
            .criterion_scores
            .iter()
            .map(|cs| (cs.criterion.clone(), cs.scores.clone()))
            .collect(),
        main_weights: r.main_weights().clone(),
        overridden,
    }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SensitivityRequest {
    factor: f64,
}

async fn sensitivity(
    State(state): State<AppState>,
    Query(q): Query<OverrideQuery>,
    body: Bytes,
) -> ApiResult<SensitivityReport> {
    let req: SensitivityRequest = parse_body(&body)?;
    let s = state.read().await;
    let c = s.computed()?;
    gate(&c, q.allow)?;
    let report = run_scenarios(&c.hierarchy, &c.result, req.factor, Default::default()).map_err(
        |e| match e {
            SensitivityError::InvalidFactor(_) => ApiError::BadRequest(e.to_string()),
            SensitivityError::Infeasible { .. } => ApiError::Unprocessable(e.to_string()),
            other => ApiError::Internal(other.to_string()),
        },
    )?;
    Ok(Json(report))
}

#[derive(Debug, Serialize)]
pub struct SaveResponse {
    pub path: String,
    pub dirty: bool,
}

async fn save(State(state): State<AppState>) -> ApiResult<SaveResponse> {
    let mut s = state.write().await;
    let path = s.save()?;
    Ok(Json(SaveResponse {
        path: path.display().to_string(),
        dirty: s.is_dirty(),
    }))
}
