//! JSON-over-HTTP API. Every response carries the snapshot's detection time.

use std::path::Path;

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use ghm_core::api::{query_events, EventQuery, EventSet, StoryRef};
use serde_json::{json, Value};
use tower_http::services::ServeDir;

use crate::state::AppState;

pub fn router(state: AppState, ui_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/api/v1/health", get(health))
        .route("/api/v1/events", get(events))
        .route("/api/v1/diseases", get(diseases))
        .route("/api/v1/locations", get(locations))
        .route("/api/v1/stories/{id}", get(story))
        .with_state(state);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

fn stamp(set: &EventSet) -> Option<DateTime<Utc>> {
    set.detected_at
}

fn reply(status: StatusCode, set: &EventSet, mut body: Value) -> Response {
    body["detected_at"] = json!(stamp(set));
    (status, Json(body)).into_response()
}

async fn health(State(state): State<AppState>) -> Response {
    let set = state.events.load();
    let stories = state.stories.read().map(|s| s.len()).unwrap_or(0);
    reply(
        StatusCode::OK,
        &set,
        json!({ "status": "ok", "events": set.events.len(), "stories": stories }),
    )
}

async fn events(State(state): State<AppState>, Query(params): Query<Vec<(String, String)>>) -> Response {
    let set = state.events.load();
    let query = match EventQuery::from_params(params.iter().map(|(k, v)| (k.as_str(), v.as_str()))) {
        Ok(q) => q,
        Err(e) => return reply(StatusCode::BAD_REQUEST, &set, json!({ "error": e })),
    };
    let now = state.now(&set);
    match query_events(&set, &query, state.ontology, now) {
        Ok(views) => reply(StatusCode::OK, &set, json!({ "events": views })),
        Err(e) => reply(StatusCode::BAD_REQUEST, &set, json!({ "error": e })),
    }
}

async fn diseases(State(state): State<AppState>) -> Response {
    let set = state.events.load();
    let list: Vec<Value> = state
        .ontology
        .diseases()
        .map(|d| {
            json!({
                "id": d.id,
                "name": d.root_name,
                "synonyms": d.synonyms,
                "syndromes": d.syndromes,
                "external_refs": d.external_refs.iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>(),
            })
        })
        .collect();
    reply(StatusCode::OK, &set, json!({ "diseases": list }))
}

async fn locations(State(state): State<AppState>, Query(params): Query<Vec<(String, String)>>) -> Response {
    let set = state.events.load();
    let Some((_, name)) = params.iter().find(|(k, _)| k == "name") else {
        return reply(
            StatusCode::BAD_REQUEST,
            &set,
            json!({ "error": { "field": "name", "message": "required" } }),
        );
    };
    let list: Vec<Value> = state
        .ontology
        .lookup_location_candidates(name)
        .into_iter()
        .map(|l| {
            json!({
                "id": l.id,
                "name": l.name,
                "kind": l.kind,
                "country_id": l.parent_country_id,
                "latitude": l.latitude,
                "longitude": l.longitude,
            })
        })
        .collect();
    reply(StatusCode::OK, &set, json!({ "locations": list }))
}

async fn story(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> Response {
    let set = state.events.load();
    let found = {
        let store = state.stories.read().ok();
        store
            .as_ref()
            .and_then(|s| s.get(&id).cloned())
            .or_else(|| set.stories.get(&id).cloned())
    };
    match found {
        Some(s) => reply(
            StatusCode::OK,
            &set,
            json!({ "story": StoryRef::from(&s), "body": s.body }),
        ),
        None => reply(
            StatusCode::NOT_FOUND,
            &set,
            json!({ "error": { "field": "id", "message": format!("no story `{id}`") } }),
        ),
    }
}
