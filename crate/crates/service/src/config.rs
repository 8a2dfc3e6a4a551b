//! Service configuration: one TOML file plus environment overrides.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

pub const ENV_PORT: &str = "GHM_PORT";
pub const ENV_DATA_DIR: &str = "GHM_DATA_DIR";

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub bind: String,
    pub port: u16,
    /// Holds `stories.jsonl`, and optionally `sources.tsv` and `model.json`.
    pub data_dir: PathBuf,
    /// Static UI bundle served at `/`.
    pub ui_dir: Option<PathBuf>,
    pub poll_interval_secs: u64,
    pub top_k: usize,
    /// Serve the bundled 30-day replay instead of polling live feeds.
    pub demo: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            bind: "127.0.0.1".into(),
            port: 8080,
            data_dir: PathBuf::from("data"),
            ui_dir: None,
            poll_interval_secs: 3600,
            top_k: ghm_core::detector::DEFAULT_TOP_K,
            demo: false,
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).context("invalid config")
    }

    /// Reads `path` if given, then applies `GHM_PORT` and `GHM_DATA_DIR`.
    pub fn load(path: Option<&Path>, env: impl Fn(&str) -> Option<String>) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                Config::parse(&text)?
            }
            None => Config::default(),
        };
        if let Some(port) = env(ENV_PORT) {
            cfg.port = port
                .trim()
                .parse()
                .with_context(|| format!("{ENV_PORT}=`{port}` is not a port number"))?;
        }
        if let Some(dir) = env(ENV_DATA_DIR) {
            cfg.data_dir = PathBuf::from(dir);
        }
        Ok(cfg)
    }

    pub fn story_log(&self) -> PathBuf {
        self.data_dir.join("stories.jsonl")
    }

    pub fn sources_file(&self) -> PathBuf {
        self.data_dir.join("sources.tsv")
    }

    pub fn model_file(&self) -> PathBuf {
        self.data_dir.join("model.json")
    }
}
