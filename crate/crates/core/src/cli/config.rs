//! `run` configuration: JSON config file merged with command-line flags.
//!
//! ```json
//! {
//!   "address": "0.0.0.0",
//!   "port": 8080,
//!   "eventMode": "random",
//!   "eventIntervals": {"error": 2.5},
//!   "seed": 42,
//!   "logLevel": "info"
//! }
//! ```
//!
//! `eventMode` is `"none"`, `"random"` or `{"fixed": SECONDS}`. A flag always
//! overrides the same key from the file.

use std::path::Path;

use indexmap::IndexMap;
use serde::Deserialize;

use crate::http_binding::{LogLevel, ServientConfig};
use crate::runtime::{EventConfig, EventMode, ModeError};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FileConfig {
    pub address: Option<String>,
    pub port: Option<u16>,
    pub event_mode: Option<FileEventMode>,
    #[serde(default)]
    pub event_intervals: IndexMap<String, f64>,
    pub seed: Option<u64>,
    pub log_level: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum FileEventMode {
    Named(String),
    Fixed { fixed: f64 },
}

impl FileEventMode {
    fn to_mode(&self) -> Result<EventMode, ModeError> {
        match self {
            FileEventMode::Named(name) => EventMode::parse(name),
            FileEventMode::Fixed { fixed } => EventMode::fixed(*fixed),
        }
    }
}

/// Flag values as given on the command line; `None` means "not given".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlagOverrides {
    pub address: Option<String>,
    pub port: Option<u16>,
    pub event_mode: Option<String>,
    pub event_intervals: Vec<String>,
    pub seed: Option<u64>,
    pub log_level: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config file {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Mode(#[from] ModeError),
    #[error("invalid --event-interval \"{0}\": expected EVENT=SECONDS")]
    Interval(String),
    #[error("{0}")]
    LogLevel(String),
}

pub fn load_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: display.clone(), source })?;
    serde_json::from_str(&text).map_err(|source| ConfigError::Parse { path: display, source })
}

fn parse_interval(spec: &str) -> Result<(String, EventMode), ConfigError> {
    let (name, seconds) = spec.split_once('=').ok_or_else(|| ConfigError::Interval(spec.to_owned()))?;
    if name.is_empty() {
        return Err(ConfigError::Interval(spec.to_owned()));
    }
    let seconds: f64 = seconds.trim().parse().map_err(|_| ConfigError::Interval(spec.to_owned()))?;
    Ok((name.to_owned(), EventMode::fixed(seconds)?))
}

/// Defaults, overridden by the file, overridden by flags.
pub fn merge(file: FileConfig, flags: &FlagOverrides) -> Result<ServientConfig, ConfigError> {
    let defaults = ServientConfig::default();

    let default_mode = match (&flags.event_mode, &file.event_mode) {
        (Some(flag), _) => EventMode::parse(flag)?,
        (None, Some(from_file)) => from_file.to_mode()?,
        (None, None) => defaults.events.default.clone(),
    };
    let mut events = EventConfig::uniform(default_mode);
    for (name, seconds) in &file.event_intervals {
        events.overrides.insert(name.clone(), EventMode::fixed(*seconds)?);
    }
    for spec in &flags.event_intervals {
        let (name, mode) = parse_interval(spec)?;
        events.overrides.insert(name, mode);
    }

    let log_level = match flags.log_level.as_ref().or(file.log_level.as_ref()) {
        Some(level) => level.parse::<LogLevel>().map_err(ConfigError::LogLevel)?,
        None => defaults.log_level,
    };

    Ok(ServientConfig {
        address: flags.address.clone().or(file.address).unwrap_or(defaults.address),
        port: flags.port.or(file.port).unwrap_or(defaults.port),
        events,
        seed: flags.seed.or(file.seed),
        log_level,
    })
}
