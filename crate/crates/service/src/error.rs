use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use ragscope_core::CoreError;
use serde_json::{json, Value};

/// Error returned by a handler, rendered as `{"error": code, "message": ..}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub details: Option<Value>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            details: None,
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn session_not_found() -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "session_not_found",
            "unknown or expired session",
        )
    }
}

impl From<CoreError> for ApiError {
    fn from(err: CoreError) -> Self {
        let message = err.to_string();
        match err {
            CoreError::UnknownTask(_) => Self::new(StatusCode::NOT_FOUND, "unknown_task", message),
            CoreError::UnknownModel(_) => {
                Self::new(StatusCode::BAD_REQUEST, "unknown_model", message)
            }
            CoreError::UnknownMetric(_) => {
                Self::new(StatusCode::BAD_REQUEST, "unknown_metric", message)
            }
            CoreError::UnknownMetadataKey(_) => {
                Self::new(StatusCode::BAD_REQUEST, "unknown_metadata_key", message)
            }
            CoreError::TooFew { .. } => Self::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "insufficient_instances",
                message,
            ),
            CoreError::Parse(errors) => ApiError {
                details: Some(json!(errors)),
                ..Self::new(StatusCode::BAD_REQUEST, "parse_error", message)
            },
            CoreError::Invalid(report) => ApiError {
                details: Some(json!(report)),
                ..Self::new(
                    StatusCode::UNPROCESSABLE_ENTITY,
                    "validation_failed",
                    message,
                )
            },
            CoreError::EmptyInput
            | CoreError::LengthMismatch { .. }
            | CoreError::InvalidArgument(_) => {
                Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
            }
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = match self.details {
            // A rejected upload answers with the validation report itself.
            Some(report) if self.code == "validation_failed" => report,
            Some(details) => {
                json!({"error": self.code, "message": self.message, "details": details})
            }
            None => json!({"error": self.code, "message": self.message}),
        };
        (self.status, Json(body)).into_response()
    }
}
