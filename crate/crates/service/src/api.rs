//! HTTP handlers for `/api/*`.

use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use friendrec_core::{
    default_k_range, recommend, sweep, EvaluationReport, KnnModel, Recommendation, UserId,
    UserProfile, DEFAULT_K,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::state::{AppState, Dirty, Snapshot};
use crate::ServiceError;

pub const SNAPSHOT_HEADER: &str = "x-snapshot-version";

/// Result count when `limit` is not given.
pub const DEFAULT_LIMIT: usize = 10;

type App = State<Arc<AppState>>;

/// JSON body tagged with the snapshot version it was computed from.
pub struct Versioned<T> {
    version: u64,
    status: StatusCode,
    body: T,
}

impl<T> Versioned<T> {
    fn ok(snap: &Snapshot, body: T) -> Self {
        Self {
            version: snap.version,
            status: StatusCode::OK,
            body,
        }
    }

    fn created(snap: &Snapshot, body: T) -> Self {
        Self {
            status: StatusCode::CREATED,
            ..Self::ok(snap, body)
        }
    }
}

impl<T: Serialize> IntoResponse for Versioned<T> {
    fn into_response(self) -> Response {
        let mut resp = (self.status, Json(self.body)).into_response();
        resp.headers_mut()
            .insert(SNAPSHOT_HEADER, HeaderValue::from(self.version));
        resp
    }
}

/// Error response: `{"error": <code>, "detail": <message>}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    detail: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, detail: impl Into<String>) -> Self {
        Self {
            status,
            code,
            detail: detail.into(),
        }
    }

    fn bad_request(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", detail)
    }

    fn not_found(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", detail)
    }

    fn unknown_user(user: UserId) -> Self {
        Self::not_found(format!("unknown user {user}"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": self.code, "detail": self.detail });
        (self.status, Json(body)).into_response()
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        match e {
            ServiceError::TrainingInProgress => {
                Self::new(StatusCode::CONFLICT, "conflict", e.to_string())
            }
            other => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", other.to_string()),
        }
    }
}

impl From<friendrec_core::Error> for ApiError {
    fn from(e: friendrec_core::Error) -> Self {
        use friendrec_core::Error as E;
        match e {
            E::InvalidK { .. } | E::InvalidRange { .. } | E::InvalidLimit => {
                Self::bad_request(e.to_string())
            }
            E::UnknownUser(u) => Self::unknown_user(u),
            E::UnknownBook(_) => Self::not_found(e.to_string()),
            other => Self::from(ServiceError::from(other)),
        }
    }
}

pub async fn not_found() -> ApiError {
    ApiError::not_found("no such route")
}

pub async fn method_not_allowed() -> ApiError {
    ApiError::new(
        StatusCode::METHOD_NOT_ALLOWED,
        "method_not_allowed",
        "method not allowed for this route",
    )
}

fn parse_user(raw: &str) -> Result<UserId, ApiError> {
    raw.parse()
        .map_err(|_| ApiError::bad_request(format!("malformed user id {raw:?}")))
}

fn positive_param(query: &HashMap<String, String>, name: &str) -> Result<Option<usize>, ApiError> {
    match query.get(name) {
        None => Ok(None),
        Some(raw) => match raw.parse::<usize>() {
            Ok(v) if v > 0 => Ok(Some(v)),
            _ => Err(ApiError::bad_request(format!(
                "{name} must be a positive integer, got {raw:?}"
            ))),
        },
    }
}

fn json_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("invalid JSON body: {e}")))
}

pub async fn health(State(app): App) -> Versioned<Value> {
    let snap = app.snapshot();
    let body = json!({
        "status": "ok",
        "dataset_rows": snap.edges.len(),
        "trained": snap.model.is_some(),
    });
    Versioned::ok(&snap, body)
}

pub async fn books(State(app): App) -> Versioned<Vec<String>> {
    let snap = app.snapshot();
    let labels = snap.catalog.labels().to_vec();
    Versioned::ok(&snap, labels)
}

pub async fn list_users(State(app): App) -> Versioned<Vec<UserId>> {
    let snap = app.snapshot();
    let users = snap.profiles.keys().copied().collect();
    Versioned::ok(&snap, users)
}

#[derive(Serialize)]
pub struct UserView {
    user: UserId,
    incidence: Vec<u32>,
    books: Vec<String>,
    friends: Vec<UserId>,
    cold_start: bool,
}

pub async fn get_user(State(app): App, Path(id): Path<String>) -> Result<Versioned<UserView>, ApiError> {
    let snap = app.snapshot();
    let user = parse_user(&id)?;
    let profile = snap.profiles.get(&user).ok_or_else(|| ApiError::unknown_user(user))?;
    let view = UserView {
        user,
        incidence: profile.incidence.clone(),
        books: profile.books(&snap.catalog).map(str::to_owned).collect(),
        friends: snap.adjacency.friends(user).collect(),
        cold_start: profile.is_cold(),
    };
    Ok(Versioned::ok(&snap, view))
}

/// Creates a user with an all-zero profile and no friends.
pub async fn create_user(State(app): App) -> Result<Versioned<UserProfile>, ApiError> {
    let (snap, profile) = app
        .mutate(|cur| {
            let next_id = cur
                .profiles
                .keys()
                .copied()
                .chain(cur.adjacency.users())
                .max()
                .map_or(0, |m| m + 1);
            let profile = UserProfile::empty(next_id, cur.catalog.len());
            let mut next = cur.clone();
            Arc::make_mut(&mut next.profiles).insert(next_id, profile.clone());
            let dirty = Dirty {
                profiles: true,
                ..Dirty::default()
            };
            Ok::<_, ApiError>((next, dirty, profile))
        })
        .await?;
    Ok(Versioned::created(&snap, profile))
}

pub async fn recommendations(
    State(app): App,
    Path(id): Path<String>,
    Query(query): Query<HashMap<String, String>>,
) -> Result<Versioned<Vec<Recommendation>>, ApiError> {
    let snap = app.snapshot();
    let user = parse_user(&id)?;
    let k = positive_param(&query, "k")?;
    let limit = positive_param(&query, "limit")?.unwrap_or(DEFAULT_LIMIT);
    let profile = snap.profiles.get(&user).ok_or_else(|| ApiError::unknown_user(user))?;
    if profile.is_cold() {
        return Err(ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "cold_start",
            format!("user {user} has no books read"),
        ));
    }
    let k = k.unwrap_or_else(|| snap.model.as_ref().map_or(DEFAULT_K, |m| m.k()));
    let recs = recommend(&snap.profiles, &snap.adjacency, &snap.catalog, user, k, limit)?;
    Ok(Versioned::ok(&snap, recs))
}

#[derive(Deserialize)]
pub struct BookEdit {
    book: String,
    action: String,
}

pub async fn edit_books(
    State(app): App,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Versioned<UserProfile>, ApiError> {
    let user = parse_user(&id)?;
    let edit: BookEdit = json_body(&body)?;
    let delta: i64 = match edit.action.as_str() {
        "add" => 1,
        "remove" => -1,
        other => {
            return Err(ApiError::bad_request(format!(
                "action must be \"add\" or \"remove\", got {other:?}"
            )))
        }
    };
    let (snap, profile) = app
        .mutate(|cur| {
            if !cur.profiles.contains_key(&user) {
                return Err(ApiError::unknown_user(user));
            }
            let position = cur
                .catalog
                .position(&edit.book)
                .map_err(|_| ApiError::not_found(format!("unknown book {:?}", edit.book)))?;
            let mut next = cur.clone();
            let profile = Arc::make_mut(&mut next.profiles)
                .get_mut(&user)
                .expect("checked above");
            let count = &mut profile.incidence[position];
            if delta < 0 && *count == 0 {
                return Err(ApiError::new(
                    StatusCode::CONFLICT,
                    "conflict",
                    format!("user {user} has no copy of {} to remove", edit.book),
                ));
            }
            *count = if delta > 0 { *count + 1 } else { *count - 1 };
            let profile = profile.clone();
            let dirty = Dirty {
                profiles: true,
                ..Dirty::default()
            };
            Ok((next, dirty, profile))
        })
        .await?;
    Ok(Versioned::ok(&snap, profile))
}

#[derive(Serialize)]
pub struct TrainSummary {
    k_used: usize,
    train_rows: usize,
    test_rows: usize,
}

pub async fn train(State(app): App, body: Bytes) -> Result<Versioned<TrainSummary>, ApiError> {
    let k = if body.iter().all(u8::is_ascii_whitespace) {
        DEFAULT_K
    } else {
        let value: Value = json_body(&body)?;
        match value.get("k") {
            None | Some(Value::Null) => DEFAULT_K,
            Some(v) => match v.as_u64() {
                Some(k) if k > 0 => k as usize,
                _ => return Err(ApiError::bad_request(format!("k must be a positive integer, got {v}"))),
            },
        }
    };
    let train_len = app.snapshot().train_len();
    if k > train_len {
        return Err(ApiError::bad_request(format!(
            "k = {k} exceeds the {train_len} training rows"
        )));
    }
    let snap = app
        .train(move |base| {
            let parts = base.split()?;
            Ok::<_, ApiError>(KnnModel::fit(&parts.train, k)?)
        })
        .await?;
    let model = snap.model.as_ref().expect("just trained");
    let summary = TrainSummary {
        k_used: model.k(),
        train_rows: model.len(),
        test_rows: snap.edges.len() - model.len(),
    };
    Ok(Versioned::ok(&snap, summary))
}

pub async fn evaluation(
    State(app): App,
    Query(query): Query<HashMap<String, String>>,
) -> Result<Versioned<EvaluationReport>, ApiError> {
    let base = app.snapshot();
    let train_len = base.train_len();
    let (default_min, default_max) = default_k_range(train_len);
    let kmin = positive_param(&query, "kmin")?.unwrap_or(default_min);
    let kmax = positive_param(&query, "kmax")?.unwrap_or(default_max);
    if kmin > kmax || kmax > train_len {
        return Err(ApiError::bad_request(format!(
            "invalid k range {kmin}..={kmax}: need kmin <= kmax <= {train_len}"
        )));
    }
    let report = tokio::task::spawn_blocking(move || -> Result<EvaluationReport, ApiError> {
        Ok(sweep(&base.split()?, kmin, kmax)?)
    })
    .await
    .map_err(|e| ApiError::from(ServiceError::Internal(e.to_string())))??;
    let report = Arc::new(report);
    let (snap, ()) = app
        .mutate(|cur| {
            let mut next = cur.clone();
            next.last_report = Some(report.clone());
            let dirty = Dirty {
                report: true,
                ..Dirty::default()
            };
            Ok::<_, ApiError>((next, dirty, ()))
        })
        .await?;
    Ok(Versioned::ok(&snap, (*report).clone()))
}
