use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {message}")]
    Read { path: PathBuf, message: String },
    #[error("invalid config file {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid value for {var}: '{value}'")]
    Env { var: &'static str, value: String },
}

/// Service settings. Every field may be overridden by a `GES_*` variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub bind: String,
    pub port: u16,
    pub data_dir: PathBuf,
    /// Factor document to load instead of the bundled set.
    pub factors: Option<PathBuf>,
    /// Extra cities appended to the bundled gazetteer.
    pub gazetteer: Option<PathBuf>,
    pub body_limit_bytes: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            bind: "127.0.0.1".into(),
            port: 8080,
            data_dir: PathBuf::from("ges-data"),
            factors: None,
            gazetteer: None,
            body_limit_bytes: 8 * 1024 * 1024,
        }
    }
}

impl ServiceConfig {
    /// Reads the optional JSON file, then applies the process environment.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = match path {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        cfg.apply_env(|k| std::env::var(k).ok())?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Read { path: path.to_owned(), message: e.to_string() })?;
        serde_json::from_str(&text).map_err(|e| ConfigError::Parse { path: path.to_owned(), message: e.to_string() })
    }

    pub fn apply_env(&mut self, var: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        if let Some(v) = var("GES_BIND") {
            self.bind = v;
        }
        if let Some(v) = var("GES_PORT") {
            self.port = v.trim().parse().map_err(|_| ConfigError::Env { var: "GES_PORT", value: v })?;
        }
        if let Some(v) = var("GES_DATA_DIR") {
            self.data_dir = v.into();
        }
        if let Some(v) = var("GES_FACTORS") {
            self.factors = Some(v.into());
        }
        if let Some(v) = var("GES_GAZETTEER") {
            self.gazetteer = Some(v.into());
        }
        if let Some(v) = var("GES_BODY_LIMIT") {
            self.body_limit_bytes =
                v.trim().parse().map_err(|_| ConfigError::Env { var: "GES_BODY_LIMIT", value: v })?;
        }
        Ok(())
    }
}
