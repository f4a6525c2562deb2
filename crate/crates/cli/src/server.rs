//! JSON-over-HTTP API. The bundle is immutable for the process lifetime;
//! ratings go through the session store and hit disk before the response.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use topicrec::{recommend, Error as CoreError, ItemRecord, Recommendation, UserProfile};

use crate::bundle::EngineBundle;
use crate::session::{RateError, SessionStore};

pub const DEFAULT_K: usize = 10;
pub const DEFAULT_TOPIC_WORDS: usize = 10;

#[derive(Clone)]
pub struct AppState {
    pub bundle: Arc<EngineBundle>,
    pub sessions: Arc<SessionStore>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        let status = match e {
            CoreError::UnknownItem(_) => StatusCode::NOT_FOUND,
            CoreError::RatingOutOfRange(_) | CoreError::Invalid(_) => StatusCode::UNPROCESSABLE_ENTITY,
            CoreError::EmptyProfile | CoreError::NothingToRecommend => StatusCode::CONFLICT,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.to_string())
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/items", get(items))
        .route("/api/items/{id}", get(item))
        .route("/api/topics", get(topics))
        .route("/api/topic-map", get(topic_map))
        .route("/api/users/{uid}/ratings", get(ratings))
        .route("/api/users/{uid}/ratings/{item_id}", put(rate))
        .route("/api/users/{uid}/recommendations", get(recommendations))
        .with_state(state)
}

async fn health(State(s): State<AppState>) -> Json<serde_json::Value> {
    let mut arms = vec!["lda"];
    if s.bundle.feature_similarity().is_some() {
        arms.push("features");
    }
    Json(json!({
        "status": "ok",
        "items": s.bundle.items().len(),
        "topics": s.bundle.model().topics(),
        "arms": arms,
    }))
}

async fn items(State(s): State<AppState>) -> Json<Vec<ItemRecord>> {
    Json(s.bundle.items().to_vec())
}

async fn item(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<ItemRecord> {
    s.bundle
        .item(&id)
        .cloned()
        .map(Json)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown item {id:?}")))
}

#[derive(Debug, Deserialize)]
struct TopicsQuery {
    n: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TopicWords {
    pub topic: usize,
    pub prevalence: Option<f64>,
    pub coherence: Option<f64>,
    pub words: Vec<WordWeight>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WordWeight {
    pub term: String,
    pub weight: f64,
}

async fn topics(State(s): State<AppState>, Query(q): Query<TopicsQuery>) -> ApiResult<Vec<TopicWords>> {
    let n = q.n.unwrap_or(DEFAULT_TOPIC_WORDS);
    let model = s.bundle.model();
    (0..model.topics())
        .map(|k| {
            Ok(TopicWords {
                topic: k,
                prevalence: s.bundle.topic_map().map(|m| m.prevalence[k]),
                coherence: s.bundle.coherence().map(|c| c.per_topic[k]),
                words: model
                    .top_words(k, n)?
                    .into_iter()
                    .map(|(term, weight)| WordWeight { term, weight })
                    .collect(),
            })
        })
        .collect::<Result<_, CoreError>>()
        .map(Json)
        .map_err(ApiError::from)
}

async fn topic_map(State(s): State<AppState>) -> ApiResult<topicrec::TopicMap> {
    s.bundle
        .topic_map()
        .cloned()
        .map(Json)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "topic map needs at least two topics"))
}

async fn ratings(State(s): State<AppState>, Path(uid): Path<String>) -> Json<UserProfile> {
    Json(s.sessions.profile(&uid))
}

#[derive(Debug, Deserialize)]
struct RatingBody {
    rating: i64,
}

async fn rate(
    State(s): State<AppState>,
    Path((uid, item_id)): Path<(String, String)>,
    body: Result<Json<RatingBody>, JsonRejection>,
) -> ApiResult<UserProfile> {
    let Json(body) = body.map_err(|e| ApiError::new(e.status(), e.body_text()))?;
    let sessions = s.sessions.clone();
    let profile = tokio::task::spawn_blocking(move || sessions.rate(&uid, &item_id, body.rating))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
        .map_err(|e| match e {
            RateError::OutOfRange(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
            RateError::UnknownItem(_) => ApiError::new(StatusCode::NOT_FOUND, e.to_string()),
            RateError::Io(_) => {
                log::error!("{e}");
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
            }
        })?;
    Ok(Json(profile))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arm {
    #[default]
    Lda,
    Features,
}

#[derive(Debug, Deserialize)]
struct RecommendQuery {
    k: Option<usize>,
    #[serde(default)]
    arm: Arm,
}

async fn recommendations(
    State(s): State<AppState>,
    Path(uid): Path<String>,
    Query(q): Query<RecommendQuery>,
) -> ApiResult<Recommendation> {
    let sim = match q.arm {
        Arm::Lda => s.bundle.lda_similarity(),
        Arm::Features => s
            .bundle
            .feature_similarity()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "features arm not loaded"))?,
    };
    let profile = s.sessions.profile(&uid);
    Ok(Json(recommend(
        &profile,
        sim,
        s.bundle.model(),
        q.k.unwrap_or(DEFAULT_K),
    )?))
}

/// Serves until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, state: AppState) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
