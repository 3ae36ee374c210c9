//! HTTP JSON API over the friendrec pipeline.
//!
//! Reads pin the latest immutable [`Snapshot`]; mutations (book edits, user
//! creation, training, cached evaluation reports) go through a single writer
//! and publish a new snapshot with the next version number, which every
//! response carries in the `X-Snapshot-Version` header.
//!
//! State lives as flat files under the data directory: `edges.csv`
//! (annotated), `profiles.json`, `model.json`, `report.json` and `meta.json`.
//! Each is replaced atomically.

pub mod api;
pub mod state;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::routing::{any, get, post};
use axum::Router;
use tokio::net::TcpListener;
use tower_http::services::ServeDir;

pub use api::{ApiError, SNAPSHOT_HEADER};
pub use state::{AppState, Snapshot, Store, SPLIT_RATIO};

pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone)]
pub struct Config {
    pub data_dir: PathBuf,
    pub seed: u64,
    /// Raw two-column edge list; the bundled one when `None`.
    pub edges: Option<PathBuf>,
    pub catalog: Option<PathBuf>,
    /// Directory served for non-`/api` paths.
    pub static_dir: Option<PathBuf>,
}

impl Config {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        Self {
            data_dir: data_dir.into(),
            seed: DEFAULT_SEED,
            edges: None,
            catalog: None,
            static_dir: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error(transparent)]
    Core(#[from] friendrec_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("cannot listen on {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        source: std::io::Error,
    },

    #[error("a training run is already in progress")]
    TrainingInProgress,

    #[error("{0}")]
    Internal(String),
}

pub fn router(state: Arc<AppState>) -> Router {
    let static_dir = state.static_dir().map(ServeDir::new);
    let router = Router::new()
        .route("/api/health", get(api::health))
        .route("/api/books", get(api::books))
        .route("/api/users", get(api::list_users).post(api::create_user))
        .route("/api/users/{id}", get(api::get_user))
        .route("/api/users/{id}/recommendations", get(api::recommendations))
        .route("/api/users/{id}/books", post(api::edit_books))
        .route("/api/train", post(api::train))
        .route("/api/evaluation", get(api::evaluation))
        .route("/api/{*rest}", any(api::not_found))
        .method_not_allowed_fallback(api::method_not_allowed)
        .with_state(state);
    match static_dir {
        Some(dir) => router.fallback_service(dir),
        None => router.fallback(api::not_found),
    }
}

/// Binds `addr`. Call after [`AppState::open`] so the port only accepts
/// connections once the dataset is loaded.
pub async fn bind(addr: SocketAddr) -> Result<TcpListener, ServiceError> {
    TcpListener::bind(addr)
        .await
        .map_err(|source| ServiceError::Bind { addr, source })
}

pub async fn serve(listener: TcpListener, state: Arc<AppState>) -> Result<(), ServiceError> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
