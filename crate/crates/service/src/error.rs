use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use ccsabst_core::{AbstractionError, CcsError, LogicError, ParseError, SimulationError};
use serde_json::json;
use thiserror::Error;

/// An error with the HTTP status it maps to.
#[derive(Debug, Error)]
#[error("{message}")]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

impl ApiError {
    pub fn bad_request(message: impl Into<String>) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, message: message.into() }
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        ApiError { status: StatusCode::NOT_FOUND, message: message.into() }
    }

    pub fn conflict(message: impl Into<String>) -> Self {
        ApiError { status: StatusCode::CONFLICT, message: message.into() }
    }

    pub fn truncated(message: impl Into<String>) -> Self {
        ApiError { status: StatusCode::UNPROCESSABLE_ENTITY, message: message.into() }
    }

    pub fn parse(what: &str, e: ParseError) -> Self {
        ApiError::bad_request(format!("{what}: {e}"))
    }
}

impl From<AbstractionError> for ApiError {
    fn from(e: AbstractionError) -> Self {
        match e {
            AbstractionError::BadPath(_) => ApiError::not_found(e.to_string()),
            AbstractionError::BadParams { .. } => ApiError::bad_request(e.to_string()),
            AbstractionError::Mismatch { .. } | AbstractionError::SideCondition { .. } | AbstractionError::Ccs(_) => {
                ApiError::conflict(e.to_string())
            }
        }
    }
}

impl From<CcsError> for ApiError {
    fn from(e: CcsError) -> Self {
        ApiError::bad_request(e.to_string())
    }
}

impl From<LogicError> for ApiError {
    fn from(e: LogicError) -> Self {
        match e {
            LogicError::Truncated => ApiError::truncated(e.to_string()),
            _ => ApiError::bad_request(e.to_string()),
        }
    }
}

impl From<SimulationError> for ApiError {
    fn from(e: SimulationError) -> Self {
        match e {
            SimulationError::Truncated => ApiError::truncated(e.to_string()),
            SimulationError::Ccs(e) => e.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}
