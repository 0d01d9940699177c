//! HTTP facade over the analysis views. Uploaded experiments live in
//! in-memory sessions only; nothing is written to disk.

mod error;
mod query;
mod routes;
pub mod session;

use std::future::Future;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::DefaultBodyLimit;
use axum::Router;
use tokio::net::TcpListener;
use tower_http::cors::CorsLayer;
use tower_http::trace::TraceLayer;

pub use error::ApiError;
pub use query::Query;
pub use session::{Session, SessionStore};

pub const DEFAULT_MAX_UPLOAD_BYTES: usize = 512 * 1024 * 1024;
pub const DEFAULT_SESSION_TTL: Duration = Duration::from_secs(2 * 60 * 60);
pub const DEFAULT_MEMORY_BUDGET_BYTES: usize = 4 * 1024 * 1024 * 1024;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub max_upload_bytes: usize,
    pub session_ttl: Duration,
    /// Total upload bytes kept across sessions before LRU eviction.
    pub memory_budget_bytes: usize,
    /// Monte Carlo iterations used when a request does not set them.
    pub default_iterations: usize,
    /// Allow any origin; meant for local UI development.
    pub permissive_cors: bool,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            max_upload_bytes: DEFAULT_MAX_UPLOAD_BYTES,
            session_ttl: DEFAULT_SESSION_TTL,
            memory_budget_bytes: DEFAULT_MEMORY_BUDGET_BYTES,
            default_iterations: ragscope_core::stats::RandomizationConfig::default().iterations,
            permissive_cors: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AppState {
    pub config: Arc<ServiceConfig>,
    pub sessions: Arc<SessionStore>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        let sessions = Arc::new(SessionStore::new(
            config.session_ttl,
            config.memory_budget_bytes,
        ));
        AppState {
            config: Arc::new(config),
            sessions,
        }
    }
}

pub fn router(state: AppState) -> Router {
    let mut app = routes::api_routes()
        .layer(DefaultBodyLimit::max(state.config.max_upload_bytes))
        .layer(TraceLayer::new_for_http())
        .with_state(state.clone());
    if state.config.permissive_cors {
        app = app.layer(CorsLayer::very_permissive());
    }
    app
}

/// Serves until `shutdown` resolves. Idle sessions are swept periodically.
pub async fn serve(
    listener: TcpListener,
    config: ServiceConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let state = AppState::new(config);
    let sessions = state.sessions.clone();
    let period = state
        .config
        .session_ttl
        .min(Duration::from_secs(60))
        .max(Duration::from_millis(10));
    let sweeper = tokio::spawn(async move {
        let mut tick = tokio::time::interval(period);
        loop {
            tick.tick().await;
            let n = sessions.sweep();
            if n > 0 {
                tracing::info!(expired = n, "swept idle sessions");
            }
        }
    });
    if let Ok(addr) = listener.local_addr() {
        tracing::info!(%addr, "listening");
    }
    let result = axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await;
    sweeper.abort();
    result
}
