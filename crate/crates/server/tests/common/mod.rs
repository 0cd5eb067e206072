#![allow(dead_code)]

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;
use ttm_server::{router, AppState, ServiceConfig};
use ttm_session::{MemoryStore, SessionStore};

pub struct Reply {
    pub status: StatusCode,
    pub etag: Option<String>,
    pub text: String,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.text).unwrap_or_else(|e| panic!("bad json {e}: {}", self.text))
    }

    pub fn error_code(&self) -> String {
        self.json()["error"]["code"].as_str().unwrap_or_default().to_string()
    }
}

pub fn app() -> Router {
    app_with(Arc::new(MemoryStore::new()))
}

pub fn app_with(store: Arc<dyn SessionStore>) -> Router {
    router(AppState::new(store, ServiceConfig::default()))
}

pub async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>, if_match: Option<u64>) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(v) = if_match {
        req = req.header("if-match", format!("\"{v}\""));
    }
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let etag = resp.headers().get("etag").map(|v| v.to_str().unwrap().to_string());
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    Reply { status, etag, text: String::from_utf8(bytes.to_vec()).unwrap() }
}

pub async fn post(app: &Router, uri: &str, body: Value) -> Reply {
    call(app, Method::POST, uri, Some(body), None).await
}

pub async fn get(app: &Router, uri: &str) -> Reply {
    call(app, Method::GET, uri, None, None).await
}

pub async fn create(app: &Router, names: &[&str]) -> String {
    let reply = post(app, "/api/sessions", json!({ "objects": names })).await;
    assert_eq!(reply.status, StatusCode::CREATED, "{}", reply.text);
    reply.json()["session_id"].as_str().unwrap().to_string()
}

/// Replays the worked example: a1 > a2 (1 card), a3 > a4 (0), a1 > a3 (3).
pub async fn play_example(app: &Router) -> String {
    let id = create(app, &["a1", "a2", "a3", "a4"]).await;
    for (pairing_id, winner, cards) in [(0, "a1", 1), (1, "a3", 0), (2, "a1", 3)] {
        let reply = post(
            app,
            &format!("/api/sessions/{id}/matches"),
            json!({ "pairing_id": pairing_id, "winner": winner, "cards": cards }),
        )
        .await;
        assert_eq!(reply.status, StatusCode::OK, "{}", reply.text);
    }
    id
}
