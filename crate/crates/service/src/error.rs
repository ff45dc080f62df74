use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InconsistentNode {
    pub node: String,
    pub cr: f64,
    pub threshold: f64,
}

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("malformed request: {0}")]
    BadRequest(String),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("judgment set for {node:?} is incomplete: {} pairs missing", missing.len())]
    Incomplete {
        node: String,
        missing: Vec<(usize, usize)>,
    },
    #[error("consistency ratio above threshold at {} node(s); pass ?override=true to rank anyway", .0.len())]
    Inconsistent(Vec<InconsistentNode>),
    #[error("{0}")]
    Unprocessable(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::UnknownNode(_) => StatusCode::NOT_FOUND,
            ApiError::Incomplete { .. } => StatusCode::CONFLICT,
            ApiError::Inconsistent(_) | ApiError::Unprocessable(_) => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            ApiError::Io(_) | ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            ApiError::BadRequest(_) => "bad_request",
            ApiError::UnknownNode(_) => "unknown_node",
            ApiError::Incomplete { .. } => "incomplete",
            ApiError::Inconsistent(_) => "inconsistent",
            ApiError::Unprocessable(_) => "unprocessable",
            ApiError::Io(_) => "io",
            ApiError::Internal(_) => "internal",
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.kind(), "message": self.to_string() });
        match &self {
            ApiError::UnknownNode(node) => body["node"] = json!(node),
            ApiError::Incomplete { node, missing } => {
                body["node"] = json!(node);
                body["missing_pairs"] = json!(missing);
            }
            ApiError::Inconsistent(nodes) => body["nodes"] = json!(nodes),
            _ => {}
        }
        (self.status(), Json(body)).into_response()
    }
}
