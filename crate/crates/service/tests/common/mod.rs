#![allow(dead_code)]

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use ges_service::{router, AppState, ServiceConfig, SharedState};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

pub const BOUNDARY: &str = "ges-test-boundary";

pub struct TestApp {
    pub dir: tempfile::TempDir,
    pub state: SharedState,
    pub app: Router,
}

pub fn config(dir: &std::path::Path) -> ServiceConfig {
    ServiceConfig { data_dir: dir.to_owned(), ..ServiceConfig::default() }
}

impl TestApp {
    pub fn new() -> Self {
        Self::with_limit(ServiceConfig::default().body_limit_bytes)
    }

    pub fn with_limit(limit: usize) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let state = AppState::from_config(&config(dir.path())).unwrap();
        let app = router(state.clone(), limit);
        TestApp { dir, state, app }
    }

    /// Drops the store and opens it again from the same directory.
    pub fn restart(self) -> Self {
        let TestApp { dir, state, app } = self;
        drop(app);
        drop(state);
        let state = AppState::from_config(&config(dir.path())).unwrap();
        let app = router(state.clone(), ServiceConfig::default().body_limit_bytes);
        TestApp { dir, state, app }
    }

    pub async fn send(&self, req: Request<Body>) -> (StatusCode, Vec<u8>, Option<String>) {
        let resp = self.app.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let content_type = resp.headers().get(header::CONTENT_TYPE).map(|v| v.to_str().unwrap().to_owned());
        let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
        (status, bytes, content_type)
    }

    pub async fn json(&self, req: Request<Body>) -> (StatusCode, Value) {
        let (status, bytes, _) = self.send(req).await;
        let v = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap_or(Value::Null) };
        (status, v)
    }

    pub async fn create(&self, body: &str, token: Option<&str>) -> (StatusCode, Value) {
        self.json(request(Method::POST, "/api/inventories", token, body.as_bytes().to_vec(), "application/json")).await
    }

    pub async fn upload(&self, id: &str, section: &str, file: &str, token: Option<&str>) -> (StatusCode, Value) {
        let (ct, body) = multipart("upload.txt", file.as_bytes());
        self.json(request(Method::POST, &format!("/api/inventories/{id}/{section}"), token, body, &ct)).await
    }

    pub async fn account(&self, username: &str, password: &str) -> String {
        let body = format!(r#"{{"username":"{username}","password":"{password}"}}"#);
        let (status, _) = self.json(request(Method::POST, "/api/accounts", None, body.clone().into_bytes(), "application/json")).await;
        assert_eq!(status, StatusCode::CREATED);
        let (status, v) = self.json(request(Method::POST, "/api/sessions", None, body.into_bytes(), "application/json")).await;
        assert_eq!(status, StatusCode::OK);
        v["token"].as_str().unwrap().to_owned()
    }
}

pub fn request(method: Method, uri: &str, token: Option<&str>, body: Vec<u8>, content_type: &str) -> Request<Body> {
    let mut b = Request::builder().method(method).uri(uri).header(header::CONTENT_TYPE, content_type);
    if let Some(t) = token {
        b = b.header(header::AUTHORIZATION, format!("Bearer {t}"));
    }
    b.body(Body::from(body)).unwrap()
}

pub fn get(uri: &str, token: Option<&str>) -> Request<Body> {
    request(Method::GET, uri, token, Vec::new(), "application/json")
}

pub fn post(uri: &str, token: Option<&str>) -> Request<Body> {
    request(Method::POST, uri, token, Vec::new(), "application/json")
}

pub fn multipart(filename: &str, data: &[u8]) -> (String, Vec<u8>) {
    let mut body = format!(
        "--{BOUNDARY}\r\nContent-Disposition: form-data; name=\"file\"; filename=\"{filename}\"\r\nContent-Type: text/plain\r\n\r\n"
    )
    .into_bytes();
    body.extend_from_slice(data);
    body.extend_from_slice(format!("\r\n--{BOUNDARY}--\r\n").as_bytes());
    (format!("multipart/form-data; boundary={BOUNDARY}"), body)
}

pub fn base_json() -> String {
    ges_core::demo::base_inventory().to_json()
}

pub fn travel_file(rows: &[&str]) -> String {
    let mut s = ges_core::ingestion::travel::TRAVEL_HEADER.join("\t");
    s.push('\n');
    for r in rows {
        s.push_str(r);
        s.push('\n');
    }
    s
}

pub const TRAIN_ROW: &str = "1\t12/03/2019\tToulouse\tFrance\tParis\tFrance\tTrain\t\tOUI\tColloque-Congrès\tChercheur.e-EC";
pub const PLANE_ROW: &str = "2\t02/05/2019\tToulouse\tFR\tBerlin\tAllemagne\tAvion\t\tOUI\tSéminaire\tITA";
pub const CAR_ROW: &str = "3\t20/09/2019\tToulouse\tFR\tPau\tFR\tVoiture\t2\tNON\tEtude terrain\tDoc-Post doc";
