//! Configuration resolution: defaults, then the optional flat JSON config
//! file, then command-line flags. The resolved form is fully explicit and
//! printable without exposing pepper bytes or secret values.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pattern::EngineConfig;
use crate::report::ReportFormat;
use crate::scan::ScanConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config file {path}: {message}")]
    Malformed { path: String, message: String },
    #[error("invalid format: {0}")]
    BadFormat(String),
}

/// The optional config file: a flat JSON document with the same keys as the
/// flags. Unknown keys are rejected to surface typos.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub secrets: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub pepper_file: Option<PathBuf>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub ignore: Option<Vec<String>>,
    pub min_secret_length: Option<usize>,
    pub max_gap_ws: Option<usize>,
    pub max_gap_nonws: Option<usize>,
    pub webhook: Option<String>,
    pub also_pattern: Option<bool>,
    pub include_context: Option<bool>,
    pub interval: Option<f64>,
    pub workers: Option<usize>,
}

pub fn load_file_config(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| ConfigError::Malformed {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Flag-level overrides; `None`/`false` means "not given on the command
/// line". Booleans can only be switched on by flags.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub secrets: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub pepper_file: Option<PathBuf>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub ignore: Vec<String>,
    pub min_secret_length: Option<usize>,
    pub max_gap_ws: Option<usize>,
    pub webhook: Option<String>,
    pub also_pattern: bool,
    pub include_context: bool,
    pub interval: Option<f64>,
    pub workers: Option<usize>,
}

/// Every knob materialized. Serializes for `--print-config`; the pepper
/// appears only as its source, never as bytes.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub secrets: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub pepper_file: Option<PathBuf>,
    /// Whether the pepper environment variable is set ("set"/"unset").
    pub pepper_env: String,
    pub format: String,
    pub out: Option<PathBuf>,
    pub ignore: Vec<String>,
    pub min_secret_length: usize,
    pub max_gap_ws: usize,
    pub max_gap_nonws: usize,
    pub webhook: Option<String>,
    pub also_pattern: bool,
    pub include_context: bool,
    pub interval: f64,
    pub workers: usize,
}

pub fn resolve(file: &FileConfig, flags: &Overrides) -> Result<ResolvedConfig, ConfigError> {
    let engine_defaults = EngineConfig::default();
    let format = flags
        .format
        .clone()
        .or_else(|| file.format.clone())
        .unwrap_or_else(|| "human".to_string());
    format
        .parse::<ReportFormat>()
        .map_err(ConfigError::BadFormat)?;
    let mut ignore = file.ignore.clone().unwrap_or_default();
    ignore.extend(flags.ignore.iter().cloned());

    Ok(ResolvedConfig {
        secrets: flags.secrets.clone().or_else(|| file.secrets.clone()),
        cache: flags.cache.clone().or_else(|| file.cache.clone()),
        pepper_file: flags
            .pepper_file
            .clone()
            .or_else(|| file.pepper_file.clone()),
        pepper_env: if std::env::var(crate::hashcache::PEPPER_ENV).is_ok() {
            "set".into()
        } else {
            "unset".into()
        },
        format,
        out: flags.out.clone().or_else(|| file.out.clone()),
        ignore,
        min_secret_length: flags
            .min_secret_length
            .or(file.min_secret_length)
            .unwrap_or(engine_defaults.min_secret_length),
        max_gap_ws: flags
            .max_gap_ws
            .or(file.max_gap_ws)
            .unwrap_or(engine_defaults.max_gap_ws),
        max_gap_nonws: file.max_gap_nonws.unwrap_or(engine_defaults.max_gap_nonws),
        webhook: flags.webhook.clone().or_else(|| file.webhook.clone()),
        also_pattern: flags.also_pattern || file.also_pattern.unwrap_or(false),
        include_context: flags.include_context || file.include_context.unwrap_or(false),
        interval: flags.interval.or(file.interval).unwrap_or(2.0),
        workers: flags.workers.or(file.workers).unwrap_or(4),
    })
}

impl ResolvedConfig {
    pub fn engine(&self) -> EngineConfig {
        EngineConfig {
            min_secret_length: self.min_secret_length,
            max_gap_ws: self.max_gap_ws,
            max_gap_nonws: self.max_gap_nonws,
        }
    }

    pub fn scan_config(&self) -> ScanConfig {
        ScanConfig {
            engine: self.engine(),
            ignore_globs: self.ignore.clone(),
            ..ScanConfig::default()
        }
    }

    pub fn report_format(&self) -> ReportFormat {
        self.format.parse().expect("validated at resolve time")
    }

    pub fn to_printable_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}
