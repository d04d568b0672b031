//! Pipeline configuration. Every section has working defaults; a config
//! file only needs the keys it overrides.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clean::CleanConfig;
use crate::ingest::{DEFAULT_CATEGORY_PREFIX, DEFAULT_LICENSE_ALLOWLIST};
use crate::pair::{WindowPolicy, DEFAULT_RADIUS, DEFAULT_THRESHOLD};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {source}")]
    Parse {
        path: String,
        source: toml::de::Error,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct Config {
    /// Worker pool size for per-document parallelism.
    pub workers: usize,
    pub ingest: IngestConfig,
    pub clean: CleanConfig,
    pub pairing: PairingConfig,
    pub judge: JudgeConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            workers: 1,
            ingest: IngestConfig::default(),
            clean: CleanConfig::default(),
            pairing: PairingConfig::default(),
            judge: JudgeConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(default)]
pub struct IngestConfig {
    pub license_allowlist: Vec<String>,
    pub category_prefix: String,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            license_allowlist: DEFAULT_LICENSE_ALLOWLIST.map(String::from).to_vec(),
            category_prefix: DEFAULT_CATEGORY_PREFIX.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct PairingConfig {
    pub radius: usize,
    pub threshold: f64,
    pub stride_fraction: f64,
    pub include_full: bool,
}

impl Default for PairingConfig {
    fn default() -> Self {
        let window = WindowPolicy::default();
        Self {
            radius: DEFAULT_RADIUS,
            threshold: DEFAULT_THRESHOLD,
            stride_fraction: window.stride_fraction,
            include_full: window.include_full,
        }
    }
}

impl PairingConfig {
    pub fn window_policy(&self) -> WindowPolicy {
        WindowPolicy {
            stride_fraction: self.stride_fraction,
            include_full: self.include_full,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(default)]
pub struct JudgeConfig {
    pub max_inflight: usize,
    pub retries: u32,
    pub retry_base_ms: u64,
    pub checkpoint_every: usize,
}

impl Default for JudgeConfig {
    fn default() -> Self {
        Self {
            max_inflight: 4,
            retries: 3,
            retry_base_ms: 200,
            checkpoint_every: 1000,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.display().to_string(),
            source,
        })
    }
}
