use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, RawQuery, State};
use axum::http::StatusCode;
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use chrono::Utc;
use ragscope_core::analysis::{
    annotator_report, compare_models, dataset_view, instance_detail, list_predictions,
    metric_behavior, model_behavior, overview, AnnotationExport, AnnotationKind, BehaviorSort,
    CompareConfig, InstanceAnnotation, InstanceFilter, MetricType, PredictionSort, SortOrder,
    DEFAULT_EXTREMES,
};
use ragscope_core::model::{parse_experiment, Issue};
use ragscope_core::stats::RandomizationConfig;
use ragscope_core::{augment, AugmentConfig, CoreError};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::ApiError;
use crate::query::Query;
use crate::session::Session;
use crate::AppState;

type ApiResult<T> = Result<T, ApiError>;

pub(crate) fn api_routes() -> Router<AppState> {
    Router::new()
        .route("/api/experiments", post(upload))
        .route("/api/experiments/{sid}", delete(remove))
        .route("/api/experiments/{sid}/overview", get(overview_view))
        .route("/api/experiments/{sid}/predictions", get(predictions_view))
        .route("/api/experiments/{sid}/model-behavior", get(behavior_view))
        .route(
            "/api/experiments/{sid}/instances/{task_id}",
            get(instance_view),
        )
        .route("/api/experiments/{sid}/compare", get(compare_view))
        .route("/api/experiments/{sid}/metrics", get(metrics_view))
        .route("/api/experiments/{sid}/annotators", get(annotators_view))
        .route("/api/experiments/{sid}/dataset", get(dataset_view_handler))
        .route("/api/experiments/{sid}/annotations", post(annotate))
        .route("/api/experiments/{sid}/annotations/export", get(export))
}

fn session(state: &AppState, sid: &str) -> ApiResult<Arc<Session>> {
    state
        .sessions
        .get(sid)
        .ok_or_else(ApiError::session_not_found)
}

/// Runs CPU-bound work off the async executor.
async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    F: FnOnce() -> ApiResult<T> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
}

#[derive(Debug, Serialize)]
struct Created {
    session_id: String,
    warnings: Vec<Issue>,
    ttl_seconds: u64,
}

async fn upload(
    State(state): State<AppState>,
    RawQuery(raw): RawQuery,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<Created>)> {
    let q = Query::parse(raw.as_deref());
    let defaults = AugmentConfig {
        iterations: state.config.default_iterations,
        ..AugmentConfig::default()
    };
    let config = AugmentConfig {
        seed: q.number("seed")?.unwrap_or(defaults.seed),
        iterations: q.number("iterations")?.unwrap_or(defaults.iterations),
        exhaustive_threshold: q
            .number("exhaustive_threshold")?
            .unwrap_or(defaults.exhaustive_threshold),
    };
    let size = body.len();
    let aug = blocking(move || {
        let text = std::str::from_utf8(&body).map_err(|e| {
            ApiError::new(
                StatusCode::BAD_REQUEST,
                "parse_error",
                format!("body is not UTF-8: {e}"),
            )
        })?;
        let file = parse_experiment(text).map_err(CoreError::Parse)?;
        Ok(augment(file, config)?)
    })
    .await?;
    let warnings = aug.derived.validation_warnings.clone();
    let session = state.sessions.insert(aug, size);
    tracing::info!(session = %session.id, bytes = size, "session created");
    Ok((
        StatusCode::CREATED,
        Json(Created {
            session_id: session.id.clone(),
            warnings,
            ttl_seconds: state.sessions.ttl().as_secs(),
        }),
    ))
}

async fn remove(State(state): State<AppState>, Path(sid): Path<String>) -> ApiResult<StatusCode> {
    if state.sessions.remove(&sid) {
        tracing::info!(session = %sid, "session deleted");
        Ok(StatusCode::NO_CONTENT)
    } else {
        Err(ApiError::session_not_found())
    }
}

fn parse_order(q: &Query) -> ApiResult<SortOrder> {
    match q.get("order") {
        None | Some("asc") => Ok(SortOrder::Asc),
        Some("desc") => Ok(SortOrder::Desc),
        Some(o) => Err(ApiError::bad_request(format!(
            "order must be asc or desc, got '{o}'"
        ))),
    }
}

async fn overview_view(
    State(state): State<AppState>,
    Path(sid): Path<String>,
    RawQuery(raw): RawQuery,
) -> ApiResult<Json<Value>> {
    let s = session(&state, &sid)?;
    let q = Query::parse(raw.as_deref());
    let metric_type = match q.get("type") {
        None | Some("all") => MetricType::All,
        Some("human") => MetricType::Human,
        Some("algorithmic") => MetricType::Algorithmic,
        Some(t) => return Err(ApiError::bad_request(format!("unknown metric type '{t}'"))),
    };
    Ok(Json(
        serde_json::to_value(overview(&s.augmented, metric_type)).unwrap(),
    ))
}

async fn predictions_view(
    State(state): State<AppState>,
    Path(sid): Path<String>,
    RawQuery(raw): RawQuery,
) -> ApiResult<Json<Value>> {
    let s = session(&state, &sid)?;
    let q = Query::parse(raw.as_deref());
    let page = q.number("page")?.unwrap_or(1);
    let page_size = q.number("page_size")?.unwrap_or(25);
    let sort = match q.get("sort") {
        None | Some("task_id") => PredictionSort::TaskId,
        Some("response_length") => PredictionSort::ResponseLength {
            model_id: q.require("model")?.to_string(),
        },
        Some(s) => return Err(ApiError::bad_request(format!("unknown sort '{s}'"))),
    };
    let page = list_predictions(&s.augmented, page, page_size, &sort, parse_order(&q)?)?;
    Ok(Json(serde_json::to_value(page).unwrap()))
}

async fn behavior_view(
    State(state): State<AppState>,
    Path(sid): Path<String>,
    RawQuery(raw): RawQuery,
) -> ApiResult<Json<Value>> {
    let s = session(&state, &sid)?;
    let q = Query::parse(raw.as_deref());
    let model = q.require("model")?;
    let metric = q.require("metric")?;
    let filter = InstanceFilter::new(&s.augmented, q.predicates()?)?;
    let sort = match q.get("sort") {
        None | Some("task_id") => BehaviorSort::TaskId,
        Some("score") => BehaviorSort::Score,
        Some("agreement") => BehaviorSort::Agreement,
        Some(s) => return Err(ApiError::bad_request(format!("unknown sort '{s}'"))),
    };
    let view = model_behavior(&s.augmented, model, metric, &filter, sort, parse_order(&q)?)?;
    Ok(Json(serde_json::to_value(view).unwrap()))
}

async fn instance_view(
    State(state): State<AppState>,
    Path((sid, task_id)): Path<(String, String)>,
) -> ApiResult<Json<Value>> {
    let s = session(&state, &sid)?;
    Ok(Json(
        serde_json::to_value(instance_detail(&s.augmented, &task_id)?).unwrap(),
    ))
}

async fn compare_view(
    State(state): State<AppState>,
    Path(sid): Path<String>,
    RawQuery(raw): RawQuery,
) -> ApiResult<Json<Value>> {
    let s = session(&state, &sid)?;
    let q = Query::parse(raw.as_deref());
    let a = q.require("a")?.to_string();
    let b = q.require("b")?.to_string();
    let metric = q.require("metric")?.to_string();
    let base = s.augmented.derived.config;
    let config = CompareConfig {
        randomization: RandomizationConfig {
            iterations: q.number("iterations")?.unwrap_or(base.iterations),
            seed: q.number("seed")?.unwrap_or(base.seed),
            exhaustive_threshold: q
                .number("exhaustive_threshold")?
                .unwrap_or(base.exhaustive_threshold),
        },
        extremes: q.number("k")?.unwrap_or(DEFAULT_EXTREMES),
    };
    if config.randomization.iterations == 0 {
        return Err(ApiError::bad_request("iterations must be positive"));
    }
    blocking(move || {
        let cmp = compare_models(&s.augmented, &a, &b, &metric, &config)?;
        Ok(Json(serde_json::to_value(cmp).unwrap()))
    })
    .await
}

async fn metrics_view(
    State(state): State<AppState>,
    Path(sid): Path<String>,
) -> ApiResult<Json<Value>> {
    let s = session(&state, &sid)?;
    Ok(Json(
        serde_json::to_value(metric_behavior(&s.augmented)?).unwrap(),
    ))
}

async fn annotators_view(
    State(state): State<AppState>,
    Path(sid): Path<String>,
) -> ApiResult<Json<Value>> {
    let s = session(&state, &sid)?;
    Ok(Json(
        serde_json::to_value(annotator_report(&s.augmented)).unwrap(),
    ))
}

async fn dataset_view_handler(
    State(state): State<AppState>,
    Path(sid): Path<String>,
) -> ApiResult<Json<Value>> {
    let s = session(&state, &sid)?;
    Ok(Json(
        serde_json::to_value(dataset_view(&s.augmented)).unwrap(),
    ))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnnotationRequest {
    task_id: String,
    kind: AnnotationKind,
    #[serde(default)]
    text: Option<String>,
    #[serde(default)]
    author: Option<String>,
}

async fn annotate(
    State(state): State<AppState>,
    Path(sid): Path<String>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<AnnotationExport>)> {
    let s = session(&state, &sid)?;
    let req: AnnotationRequest = serde_json::from_slice(&body)
        .map_err(|e| ApiError::bad_request(format!("malformed annotation: {e}")))?;
    let annotation = InstanceAnnotation {
        task_id: req.task_id,
        kind: req.kind,
        text: req.text,
        author: req.author,
        created_at: Utc::now(),
    };
    let mut store = s.annotations.lock().unwrap();
    store.annotate(&s.augmented, annotation)?;
    Ok((StatusCode::CREATED, Json(store.export(&s.augmented))))
}

async fn export(
    State(state): State<AppState>,
    Path(sid): Path<String>,
) -> ApiResult<Json<AnnotationExport>> {
    let s = session(&state, &sid)?;
    let store = s.annotations.lock().unwrap();
    Ok(Json(store.export(&s.augmented)))
}
