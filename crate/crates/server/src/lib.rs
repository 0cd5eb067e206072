//! HTTP/JSON session service driving the elicitation workflow.
//!
//! | method | path | effect |
//! |---|---|---|
//! | POST | `/api/sessions` | create a session, round one scheduled |
//! | GET | `/api/sessions/{id}` or `/pairings` | current round |
//! | POST | `/api/sessions/{id}/pairings` | supply a round's pairs (explicit policy) |
//! | POST | `/api/sessions/{id}/matches` | record a judgment; rounds advance automatically |
//! | GET | `/api/sessions/{id}/results` | results, tournament results and revision |
//! | GET | `/api/sessions/{id}/results.json` | bare results document |
//! | GET | `/api/sessions/{id}/match-matrix.csv` | match matrix |
//! | POST | `/api/sessions/{id}/ranking` | override the order, cards reset |
//! | POST | `/api/sessions/{id}/cards` | set the cards of one gap |
//! | POST | `/api/sessions/{id}/ties` | tie or untie one gap |
//! | DELETE | `/api/sessions/{id}/revision` | drop the edits |
//! | POST | `/api/sessions/{id}/accept` | close the session |
//!
//! Writes may carry `If-Match: "<version>"`; every response carries the
//! session version in its body and `ETag`.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::routing::{delete, get, post};
use axum::Router;
use tower_http::services::ServeDir;
use ttm_session::{SessionId, SessionStore};

pub mod api;
pub mod error;

pub use error::ApiError;

pub const DEFAULT_MAX_OBJECTS: usize = 64;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub max_objects: usize,
    /// Directory with the built web UI, served at `/`.
    pub web_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self { max_objects: DEFAULT_MAX_OBJECTS, web_dir: None }
    }
}

#[derive(Clone)]
pub struct AppState {
    pub(crate) store: Arc<dyn SessionStore>,
    pub(crate) config: Arc<ServiceConfig>,
    locks: Arc<parking_lot::Mutex<HashMap<SessionId, Arc<tokio::sync::Mutex<()>>>>>,
}

impl AppState {
    pub fn new(store: Arc<dyn SessionStore>, config: ServiceConfig) -> Self {
        Self { store, config: Arc::new(config), locks: Default::default() }
    }

    pub(crate) fn lock_for(&self, id: &SessionId) -> Arc<tokio::sync::Mutex<()>> {
        self.locks.lock().entry(id.clone()).or_default().clone()
    }
}

pub fn router(state: AppState) -> Router {
    let web_dir = state.config.web_dir.clone();
    let api = Router::new()
        .route("/api/sessions", post(api::create_session))
        .route("/api/sessions/{id}", get(api::get_session))
        .route("/api/sessions/{id}/pairings", get(api::get_pairings).post(api::set_pairings))
        .route("/api/sessions/{id}/matches", post(api::submit_match))
        .route("/api/sessions/{id}/results", get(api::get_results))
        .route("/api/sessions/{id}/results.json", get(api::export_results))
        .route("/api/sessions/{id}/match-matrix.csv", get(api::export_match_matrix))
        .route("/api/sessions/{id}/ranking", post(api::override_ranking))
        .route("/api/sessions/{id}/cards", post(api::set_cards))
        .route("/api/sessions/{id}/ties", post(api::set_tie))
        .route("/api/sessions/{id}/revision", delete(api::discard_revision))
        .route("/api/sessions/{id}/accept", post(api::accept))
        .with_state(state);
    match web_dir {
        Some(dir) if dir.is_dir() => api.fallback_service(ServeDir::new(dir)),
        _ => api,
    }
}

pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, router(state)).await
}
