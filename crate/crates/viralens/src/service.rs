//! HTTP facade over a loaded archive.
//!
//! `POST /api/score` (multipart field `image`), `POST /api/compare`
//! (`image_a`, `image_b`), `GET /api/clusters`, `GET /healthz`.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::multipart::{Multipart, MultipartRejection};
use axum::extract::{DefaultBodyLimit, State};
use axum::http::{Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use tower_http::cors::{Any, CorsLayer};

use crate::error::Error;
use crate::pipeline::Scorer;
use crate::report::{cluster_rows, ApiCompareResponse, ApiScoreResponse};

/// Largest accepted request body.
pub const MAX_UPLOAD_BYTES: usize = 20 * 1024 * 1024;

#[derive(Clone)]
pub struct AppState {
    scorer: Option<Arc<Scorer>>,
}

#[derive(Debug, Serialize)]
struct ApiError {
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    stage: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    variant: Option<&'static str>,
}

struct Failure(StatusCode, ApiError);

impl Failure {
    fn new(status: StatusCode, error: impl Into<String>) -> Self {
        Failure(status, ApiError { error: error.into(), stage: None, variant: None })
    }

    fn unavailable() -> Self {
        Failure::new(StatusCode::SERVICE_UNAVAILABLE, "no model archive loaded")
    }

    fn from_scoring(err: &Error) -> Self {
        let variant = match err {
            Error::Variant { variant, .. } => Some(*variant),
            _ => None,
        };
        let stage = err.pipeline_stage();
        let status = match stage {
            Some(_) => StatusCode::UNPROCESSABLE_ENTITY,
            None => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Failure(status, ApiError { error: err.to_string(), stage: stage.map(|s| s.to_string()), variant })
    }
}

impl IntoResponse for Failure {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

pub fn router(scorer: Option<Arc<Scorer>>) -> Router {
    let cors = CorsLayer::new().allow_origin(Any).allow_methods([Method::GET, Method::POST]).allow_headers(Any);
    Router::new()
        .route("/healthz", get(healthz))
        .route("/api/clusters", get(clusters))
        .route("/api/score", post(score))
        .route("/api/compare", post(compare))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD_BYTES))
        .layer(cors)
        .with_state(AppState { scorer })
}

pub async fn serve(addr: SocketAddr, scorer: Option<Arc<Scorer>>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(scorer)).await
}

async fn healthz(State(state): State<AppState>) -> impl IntoResponse {
    Json(serde_json::json!({
        "status": "ok",
        "archive_loaded": state.scorer.is_some(),
        "model_version": state.scorer.as_ref().map(|s| s.model_version().to_string()),
    }))
}

async fn clusters(State(state): State<AppState>) -> Result<impl IntoResponse, Failure> {
    let scorer = state.scorer.ok_or_else(Failure::unavailable)?;
    Ok(Json(cluster_rows(scorer.stats(), scorer.viral())))
}

async fn score(
    State(state): State<AppState>,
    multipart: Result<Multipart, MultipartRejection>,
) -> Result<Json<ApiScoreResponse>, Failure> {
    let scorer = state.scorer.ok_or_else(Failure::unavailable)?;
    let mut fields = read_fields(multipart, &["image"]).await?;
    let image = fields.remove(0);
    let s = Arc::clone(&scorer);
    let report = tokio::task::spawn_blocking(move || s.score(&image))
        .await
        .map_err(|e| Failure::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
        .map_err(|e| Failure::from_scoring(&e))?;
    Ok(Json(ApiScoreResponse::new(&report, scorer.model_version())))
}

async fn compare(
    State(state): State<AppState>,
    multipart: Result<Multipart, MultipartRejection>,
) -> Result<Json<ApiCompareResponse>, Failure> {
    let scorer = state.scorer.ok_or_else(Failure::unavailable)?;
    let mut fields = read_fields(multipart, &["image_a", "image_b"]).await?;
    let b = fields.pop().unwrap_or_default();
    let a = fields.pop().unwrap_or_default();
    let s = Arc::clone(&scorer);
    let cmp = tokio::task::spawn_blocking(move || s.compare(&a, &b))
        .await
        .map_err(|e| Failure::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
        .map_err(|e| Failure::from_scoring(&e))?;
    Ok(Json(ApiCompareResponse::new(&cmp, scorer.model_version())))
}

/// Collects the named multipart fields in order. Oversized bodies map to
/// 413; anything else malformed or missing to 422.
async fn read_fields(
    multipart: Result<Multipart, MultipartRejection>,
    names: &[&'static str],
) -> Result<Vec<Vec<u8>>, Failure> {
    let mut multipart = multipart.map_err(|e| {
        let mut f = Failure::new(StatusCode::UNPROCESSABLE_ENTITY, format!("expected multipart/form-data: {e}"));
        f.1.stage = Some("read".into());
        f
    })?;
    let mut found: Vec<Option<Vec<u8>>> = vec![None; names.len()];
    loop {
        let field = match multipart.next_field().await {
            Ok(Some(field)) => field,
            Ok(None) => break,
            Err(e) => return Err(multipart_failure(e.status(), e.body_text())),
        };
        let Some(slot) = field.name().and_then(|n| names.iter().position(|&m| m == n)) else {
            continue;
        };
        let bytes = field.bytes().await.map_err(|e| multipart_failure(e.status(), e.body_text()))?;
        found[slot] = Some(bytes.to_vec());
    }
    names
        .iter()
        .zip(found)
        .map(|(&name, bytes)| {
            bytes.ok_or_else(|| {
                let mut f = Failure::new(StatusCode::UNPROCESSABLE_ENTITY, format!("missing multipart field `{name}`"));
                f.1.stage = Some("read".into());
                f.1.variant = (names.len() > 1).then_some(name);
                f
            })
        })
        .collect()
}

fn multipart_failure(status: StatusCode, text: String) -> Failure {
    if status == StatusCode::PAYLOAD_TOO_LARGE {
        Failure::new(StatusCode::PAYLOAD_TOO_LARGE, format!("upload exceeds {MAX_UPLOAD_BYTES} bytes"))
    } else {
        let mut f = Failure::new(StatusCode::UNPROCESSABLE_ENTITY, text);
        f.1.stage = Some("read".into());
        f
    }
}
