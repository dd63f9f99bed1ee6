use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use ges_core::engine::EngineError;
use ges_core::inventory::Finding;
use serde_json::{json, Value};

use crate::store::StoreError;

/// An HTTP error with a JSON body of the form `{"error": "...", ...}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: Value,
}

impl ApiError {
    pub fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, body: json!({ "error": message.into() }) }
    }

    pub fn findings(findings: Vec<Finding>) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, body: json!({ "error": "invalid inventory", "findings": findings }) }
    }

    pub fn not_found() -> Self {
        Self::new(StatusCode::NOT_FOUND, "no such inventory")
    }

    pub fn unauthorized() -> Self {
        Self::new(StatusCode::UNAUTHORIZED, "missing or invalid bearer token")
    }

    pub fn forbidden() -> Self {
        Self::new(StatusCode::FORBIDDEN, "inventory belongs to another account")
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        tracing::error!("{e}");
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let message = e.to_string();
        match e.root() {
            EngineError::MissingFactor { category, selector } => ApiError {
                status: StatusCode::CONFLICT,
                body: json!({ "error": message, "category": category, "selector": selector }),
            },
            EngineError::FactorVersionMismatch { .. } => Self::new(StatusCode::CONFLICT, message),
            EngineError::InvalidInventory(findings) => ApiError {
                status: StatusCode::BAD_REQUEST,
                body: json!({ "error": "invalid inventory", "findings": findings }),
            },
            _ => Self::new(StatusCode::UNPROCESSABLE_ENTITY, message),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}
