//! HTTP routes under `/api`.

use std::collections::BTreeMap;
use std::sync::Arc;

use argon2::password_hash::rand_core::OsRng;
use argon2::password_hash::{PasswordHash, PasswordHasher, PasswordVerifier, SaltString};
use argon2::Argon2;
use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Multipart, Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use ges_core::engine::{compute_inventory, EngineConfig, FootprintResult};
use ges_core::factors::FactorSet;
use ges_core::ingestion::{normalize_trips, parse_commute_csv, parse_travel_tsv, Gazetteer, RowError};
use ges_core::inventory::{validate_inventory, Inventory};
use ges_core::report::{
    file_name, render_bar_svg, render_pie_svg, render_regulatory_csv, render_synthetic, Locale,
};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::ApiError;
use crate::store::{now, Account, CachedResult, Store, StoredInventory};

pub struct AppState {
    pub store: Store,
    pub factors: FactorSet,
    pub gazetteer: Gazetteer,
    pub engine: EngineConfig,
}

pub type SharedState = Arc<AppState>;

pub fn router(state: SharedState, body_limit_bytes: usize) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/inventories", post(create_inventory).get(list_inventories))
        .route("/api/inventories/:id", get(read_inventory).put(replace_inventory))
        .route("/api/inventories/:id/travel", post(upload_travel))
        .route("/api/inventories/:id/commutes", post(upload_commutes))
        .route("/api/inventories/:id/compute", post(compute))
        .route("/api/inventories/:id/report", get(report))
        .route("/api/inventories/:id/claim", post(claim))
        .route("/api/accounts", post(create_account))
        .route("/api/sessions", post(create_session))
        .layer(DefaultBodyLimit::max(body_limit_bytes))
        .with_state(state)
}

/// 128 random bits, hex encoded.
fn random_id() -> String {
    hex::encode(rand::random::<[u8; 16]>())
}

fn token() -> String {
    hex::encode(rand::random::<[u8; 32]>())
}

/// `Ok(None)` without an Authorization header, 401 for an unknown token.
fn account_of(st: &AppState, headers: &HeaderMap) -> Result<Option<String>, ApiError> {
    let Some(value) = headers.get(header::AUTHORIZATION) else { return Ok(None) };
    let token = value
        .to_str()
        .ok()
        .and_then(|v| v.strip_prefix("Bearer "))
        .map(str::trim)
        .ok_or_else(ApiError::unauthorized)?;
    st.store.session_account(token)?.map(Some).ok_or_else(ApiError::unauthorized)
}

fn require_account(st: &AppState, headers: &HeaderMap) -> Result<String, ApiError> {
    account_of(st, headers)?.ok_or_else(ApiError::unauthorized)
}

/// Anonymous inventories are open to whoever holds the id.
fn authorize(st: &AppState, headers: &HeaderMap, stored: &StoredInventory) -> Result<(), ApiError> {
    let Some(owner) = &stored.owner else { return Ok(()) };
    match account_of(st, headers)? {
        None => Err(ApiError::unauthorized()),
        Some(a) if &a == owner => Ok(()),
        Some(_) => Err(ApiError::forbidden()),
    }
}

fn load(st: &AppState, headers: &HeaderMap, id: &str) -> Result<StoredInventory, ApiError> {
    let stored = st.store.get_inventory(id)?.ok_or_else(ApiError::not_found)?;
    authorize(st, headers, &stored)?;
    Ok(stored)
}

/// An account holds at most one inventory per (lab, year).
fn ensure_free_slot(st: &AppState, owner: &str, inv: &Inventory, except: Option<&str>) -> Result<(), ApiError> {
    let taken = st.store.inventories_owned_by(owner)?.into_iter().find(|s| {
        Some(s.id.as_str()) != except && s.inventory.lab.name == inv.lab.name && s.inventory.lab.year == inv.lab.year
    });
    match taken {
        Some(s) => Err(ApiError {
            status: StatusCode::CONFLICT,
            body: json!({
                "error": format!("account already has an inventory for {} {}", inv.lab.name, inv.lab.year),
                "id": s.id,
            }),
        }),
        None => Ok(()),
    }
}

fn parse_inventory(body: &[u8]) -> Result<Inventory, ApiError> {
    let inv = Inventory::from_json(body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("malformed inventory JSON: {e}")))?;
    let findings = validate_inventory(&inv);
    if findings.is_empty() {
        Ok(inv)
    } else {
        Err(ApiError::findings(findings))
    }
}

async fn health(State(st): State<SharedState>) -> Json<Value> {
    Json(json!({ "status": "ok", "factor_set_version": st.factors.version() }))
}

async fn create_inventory(
    State(st): State<SharedState>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    let owner = account_of(&st, &headers)?;
    let inv = parse_inventory(&body)?;
    if let Some(owner) = &owner {
        ensure_free_slot(&st, owner, &inv, None)?;
    }
    let stored = StoredInventory::new(random_id(), owner, inv);
    st.store.put_inventory(&stored)?;
    Ok((StatusCode::CREATED, Json(json!({ "id": stored.id }))))
}

fn summary(s: &StoredInventory, factors: &FactorSet) -> Value {
    json!({
        "id": s.id,
        "owner": s.owner,
        "revision": s.revision,
        "computed": s.fresh_result(factors.version()).is_some(),
        "created_at": s.created_at,
        "updated_at": s.updated_at,
    })
}

async fn read_inventory(
    State(st): State<SharedState>,
    headers: HeaderMap,
    Path(id): Path<String>,
) -> Result<Json<Value>, ApiError> {
    let stored = load(&st, &headers, &id)?;
    let mut body = summary(&stored, &st.factors);
    body["inventory"] = serde_json::to_value(&stored.inventory).expect("inventory serializes");
    Ok(Json(body))
}

fn touch(s: &mut StoredInventory) {
    s.revision += 1;
    s.result = None;
    s.updated_at = now();
}

async fn replace_inventory(
    State(st): State<SharedState>,
    headers: HeaderMap,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let stored = load(&st, &headers, &id)?;
    let inv = parse_inventory(&body)?;
    if let Some(owner) = &stored.owner {
        ensure_free_slot(&st, owner, &inv, Some(&id))?;
    }
    let revision = st
        .store
        .update_inventory(&id, |s| {
            s.inventory = inv;
            touch(s);
            Ok::<_, ApiError>(s.revision)
        })?
        .ok_or_else(ApiError::not_found)?;
    Ok(Json(json!({ "id": id, "revision": revision })))
}

async fn list_inventories(State(st): State<SharedState>, headers: HeaderMap) -> Result<Json<Value>, ApiError> {
    let account = require_account(&st, &headers)?;
    let mut labs: BTreeMap<String, Vec<Value>> = BTreeMap::new();
    let mut owned = st.store.inventories_owned_by(&account)?;
    owned.sort_by(|a, b| (a.inventory.lab.year, &a.id).cmp(&(b.inventory.lab.year, &b.id)));
    for s in &owned {
        let mut entry = summary(s, &st.factors);
        entry["year"] = json!(s.inventory.lab.year);
        labs.entry(s.inventory.lab.name.clone()).or_default().push(entry);
    }
    let labs: Vec<Value> = labs.into_iter().map(|(lab, years)| json!({ "lab": lab, "inventories": years })).collect();
    Ok(Json(json!({ "labs": labs })))
}

async fn file_field(mut multipart: Multipart) -> Result<Bytes, ApiError> {
    let bad = |e: axum::extract::multipart::MultipartError| ApiError::new(e.status(), e.body_text());
    while let Some(field) = multipart.next_field().await.map_err(bad)? {
        if field.file_name().is_some() || field.name() == Some("file") {
            return field.bytes().await.map_err(bad);
        }
    }
    Err(ApiError::new(StatusCode::BAD_REQUEST, "multipart body has no file field"))
}

fn import_response(imported: usize, errors: Vec<RowError>, warnings: Vec<RowError>) -> (StatusCode, Json<Value>) {
    let status = if imported == 0 { StatusCode::UNPROCESSABLE_ENTITY } else { StatusCode::OK };
    (status, Json(json!({ "imported": imported, "errors": errors, "warnings": warnings })))
}

/// Uploads replace the whole section: last writer wins.
async fn upload_travel(
    State(st): State<SharedState>,
    headers: HeaderMap,
    Path(id): Path<String>,
    multipart: Multipart,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    load(&st, &headers, &id)?;
    let bytes = file_field(multipart).await?;
    let (rows, mut errors) =
        parse_travel_tsv(&bytes).map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
    let travel = normalize_trips(&rows, &st.gazetteer, &st.engine.route_correction);
    errors.extend(travel.errors.iter().cloned());
    errors.sort_by_key(|e| e.line);
    let imported = travel.leg_count();
    if imported > 0 {
        st.store
            .update_inventory(&id, |s| {
                s.inventory.trips = travel.trips;
                touch(s);
                Ok::<_, ApiError>(())
            })?
            .ok_or_else(ApiError::not_found)?;
    }
    Ok(import_response(imported, errors, travel.warnings))
}

async fn upload_commutes(
    State(st): State<SharedState>,
    headers: HeaderMap,
    Path(id): Path<String>,
    multipart: Multipart,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    load(&st, &headers, &id)?;
    let bytes = file_field(multipart).await?;
    let (responses, errors) =
        parse_commute_csv(&bytes).map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
    let imported = responses.len();
    if imported > 0 {
        st.store
            .update_inventory(&id, |s| {
                s.inventory.commute_responses = responses;
                touch(s);
                Ok::<_, ApiError>(())
            })?
            .ok_or_else(ApiError::not_found)?;
    }
    Ok(import_response(imported, errors, Vec::new()))
}

fn json_response(bytes: Vec<u8>) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], bytes).into_response()
}

async fn compute(
    State(st): State<SharedState>,
    headers: HeaderMap,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let stored = load(&st, &headers, &id)?;
    let result = compute_inventory(&stored.inventory, &st.factors, &st.engine)?;
    let bytes = result.to_json_bytes();
    let cache = CachedResult {
        revision: stored.revision,
        factor_set_version: st.factors.version().to_owned(),
        json: String::from_utf8(bytes.clone()).expect("JSON is UTF-8"),
    };
    // A concurrent edit makes this result stale: keep it out of the cache.
    st.store.update_inventory(&id, |s| {
        if s.revision == cache.revision {
            s.result = Some(cache);
        }
        Ok::<_, ApiError>(())
    })?;
    Ok(json_response(bytes))
}

#[derive(Debug, Deserialize)]
struct ReportQuery {
    format: Option<String>,
    locale: Option<String>,
}

pub const REPORT_FORMATS: [&str; 7] = [
    "result_json",
    "regulatory_csv",
    "synthetic_json",
    "synthetic_text",
    "pie_svg",
    "travel_purpose_svg",
    "travel_status_svg",
];

async fn report(
    State(st): State<SharedState>,
    headers: HeaderMap,
    Path(id): Path<String>,
    Query(q): Query<ReportQuery>,
) -> Result<Response, ApiError> {
    let format = q.format.as_deref().unwrap_or("");
    if !REPORT_FORMATS.contains(&format) {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            format!("unknown report format '{format}', expected one of: {}", REPORT_FORMATS.join(", ")),
        ));
    }
    let locale = match q.locale.as_deref() {
        None => Locale::default(),
        Some(l) => l.parse().map_err(|e: String| ApiError::new(StatusCode::BAD_REQUEST, e))?,
    };
    let stored = load(&st, &headers, &id)?;
    let cached = stored
        .fresh_result(st.factors.version())
        .ok_or_else(|| ApiError::new(StatusCode::CONFLICT, "compute first"))?;
    let result = FootprintResult::from_json(cached.json.as_bytes()).map_err(|e| {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, format!("cached result is unreadable: {e}"))
    })?;

    let empty = |e: ges_core::report::ChartError| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string());
    let (bytes, content_type, report, ext) = match format {
        "result_json" => (cached.json.clone().into_bytes(), "application/json", "result", "json"),
        "regulatory_csv" => (render_regulatory_csv(&result.regulatory, locale), "text/csv; charset=utf-8", "regulatory", "csv"),
        "synthetic_json" => (render_synthetic(&result.synthetic, locale).0, "application/json", "synthetic", "json"),
        "synthetic_text" => {
            (render_synthetic(&result.synthetic, locale).1.into_bytes(), "text/plain; charset=utf-8", "synthetic", "txt")
        }
        "pie_svg" => (render_pie_svg(&result.synthetic, locale).map_err(empty)?, "image/svg+xml", "pie", "svg"),
        "travel_purpose_svg" => {
            (render_bar_svg(&result.breakdowns.purpose).map_err(empty)?, "image/svg+xml", "travel_purpose", "svg")
        }
        _ => (render_bar_svg(&result.breakdowns.status).map_err(empty)?, "image/svg+xml", "travel_status", "svg"),
    };
    let disposition = format!("inline; filename=\"{}\"", file_name(&result.lab, result.year, report, ext));
    Ok(([(header::CONTENT_TYPE, content_type.to_owned()), (header::CONTENT_DISPOSITION, disposition)], bytes)
        .into_response())
}

async fn claim(
    State(st): State<SharedState>,
    headers: HeaderMap,
    Path(id): Path<String>,
) -> Result<Json<Value>, ApiError> {
    let account = require_account(&st, &headers)?;
    let stored = st.store.get_inventory(&id)?.ok_or_else(ApiError::not_found)?;
    match &stored.owner {
        Some(o) if o == &account => return Ok(Json(json!({ "id": id, "owner": account }))),
        Some(_) => return Err(ApiError::forbidden()),
        None => {}
    }
    ensure_free_slot(&st, &account, &stored.inventory, Some(&id))?;
    st.store
        .update_inventory(&id, |s| match &s.owner {
            None => {
                s.owner = Some(account.clone());
                s.updated_at = now();
                Ok(())
            }
            Some(o) if o == &account => Ok(()),
            Some(_) => Err(ApiError::forbidden()),
        })?
        .ok_or_else(ApiError::not_found)?;
    Ok(Json(json!({ "id": id, "owner": account })))
}

#[derive(Debug, Deserialize)]
struct Credentials {
    username: String,
    password: String,
    #[serde(default)]
    lab: String,
}

fn parse_credentials(body: &[u8]) -> Result<Credentials, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("malformed credentials: {e}")))
}

pub const MIN_PASSWORD_LEN: usize = 8;

async fn create_account(State(st): State<SharedState>, body: Bytes) -> Result<(StatusCode, Json<Value>), ApiError> {
    let c = parse_credentials(&body)?;
    let username = c.username.trim().to_owned();
    if username.is_empty() {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "username must not be empty"));
    }
    if c.password.chars().count() < MIN_PASSWORD_LEN {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            format!("password must have at least {MIN_PASSWORD_LEN} characters"),
        ));
    }
    let password = c.password;
    let hash = tokio::task::spawn_blocking(move || {
        let salt = SaltString::generate(&mut OsRng);
        Argon2::default().hash_password(password.as_bytes(), &salt).map(|h| h.to_string())
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    let account = Account { id: random_id(), username, lab: c.lab, credential_hash: hash, created_at: now() };
    match st.store.create_account(&account) {
        Ok(()) => {}
        Err(e @ crate::store::StoreError::UsernameTaken(_)) => return Err(ApiError::new(StatusCode::CONFLICT, e.to_string())),
        Err(e) => return Err(e.into()),
    }
    Ok((StatusCode::CREATED, Json(json!({ "account_id": account.id, "username": account.username }))))
}

async fn create_session(State(st): State<SharedState>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let c = parse_credentials(&body)?;
    let wrong = || ApiError::new(StatusCode::UNAUTHORIZED, "wrong username or password");
    let account = st.store.account_by_username(c.username.trim())?.ok_or_else(wrong)?;
    let hash = account.credential_hash.clone();
    let ok = tokio::task::spawn_blocking(move || {
        PasswordHash::new(&hash).is_ok_and(|h| Argon2::default().verify_password(c.password.as_bytes(), &h).is_ok())
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    if !ok {
        return Err(wrong());
    }
    let token = token();
    st.store.put_session(&token, &account.id)?;
    Ok(Json(json!({ "token": token, "account_id": account.id })))
}
