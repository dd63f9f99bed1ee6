//! HTTP service over the footprint engine: inventory storage, file uploads,
//! computation and report downloads, with anonymous capability ids or
//! account-owned inventories.

pub mod api;
pub mod config;
pub mod error;
pub mod store;

use std::future::Future;
use std::sync::Arc;

use ges_core::engine::EngineConfig;
use ges_core::factors::FactorSet;
use ges_core::ingestion::Gazetteer;
use thiserror::Error;
use tokio::net::TcpListener;

pub use api::{router, AppState, SharedState};
pub use config::{ConfigError, ServiceConfig};
pub use error::ApiError;
pub use store::{Store, StoreError};

#[derive(Debug, Error)]
pub enum ServeError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("cannot load factor set {path}: {message}")]
    Factors { path: String, message: String },
    #[error("cannot load gazetteer {path}: {message}")]
    Gazetteer { path: String, message: String },
    #[error("cannot listen on {addr}: {message}")]
    Bind { addr: String, message: String },
    #[error("server error: {0}")]
    Io(String),
}

impl AppState {
    /// Loads factors and gazetteer (bundled unless configured) and opens the store.
    pub fn from_config(cfg: &ServiceConfig) -> Result<SharedState, ServeError> {
        let factors = match &cfg.factors {
            None => FactorSet::bundled(),
            Some(p) => {
                let err = |message: String| ServeError::Factors { path: p.display().to_string(), message };
                let bytes = std::fs::read(p).map_err(|e| err(e.to_string()))?;
                FactorSet::load(&bytes).map_err(|e| err(e.to_string()))?
            }
        };
        let mut gazetteer = Gazetteer::bundled();
        if let Some(p) = &cfg.gazetteer {
            let err = |message: String| ServeError::Gazetteer { path: p.display().to_string(), message };
            let text = std::fs::read_to_string(p).map_err(|e| err(e.to_string()))?;
            gazetteer.add_cities(&text).map_err(|e| err(e.to_string()))?;
        }
        let store = Store::open(&cfg.data_dir)?;
        Ok(Arc::new(AppState { store, factors, gazetteer, engine: EngineConfig::default() }))
    }
}

/// Binds the configured address and serves until `shutdown` resolves.
pub async fn serve(cfg: &ServiceConfig, shutdown: impl Future<Output = ()> + Send + 'static) -> Result<(), ServeError> {
    let state = AppState::from_config(cfg)?;
    let addr = format!("{}:{}", cfg.bind, cfg.port);
    let listener =
        TcpListener::bind(&addr).await.map_err(|e| ServeError::Bind { addr: addr.clone(), message: e.to_string() })?;
    tracing::info!("listening on {addr}");
    axum::serve(listener, router(state, cfg.body_limit_bytes))
        .with_graceful_shutdown(shutdown)
        .await
        .map_err(|e| ServeError::Io(e.to_string()))
}
