//! Engine configuration.
//!
//! A config file is plain `key = value` lines; lines starting with `#` are
//! comments, so values such as a `#` comment leader need no escaping. The
//! retrieval constants (threads searched, snippets per thread) live here and
//! nowhere else.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Environment variable naming the config file.
pub const CONFIG_ENV: &str = "SNIPASSIST_CONFIG";

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub store_dir: PathBuf,
    pub index_path: PathBuf,
    pub port: u16,
    /// Number of top-ranked threads snippets are collected from.
    pub max_threads: usize,
    /// Snippets collected from any one thread.
    pub max_snippets_per_thread: usize,
    pub suggest_limit_default: usize,
    pub comment_leader: String,
    /// Host that snippet attribution URLs are built against.
    pub base_url: String,
    pub telemetry_path: PathBuf,
    pub session_idle_secs: u64,
    pub tag_filter: Option<String>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            store_dir: PathBuf::from("store"),
            index_path: PathBuf::from("store/index.json"),
            port: 8077,
            max_threads: 4,
            max_snippets_per_thread: 3,
            suggest_limit_default: 10,
            comment_leader: "//".to_string(),
            base_url: "https://stackoverflow.com".to_string(),
            telemetry_path: PathBuf::from("telemetry.tsv"),
            session_idle_secs: 30 * 60,
            tag_filter: Some("java".to_string()),
        }
    }
}

impl Config {
    /// Reads the file named by `SNIPASSIST_CONFIG`, or returns defaults when
    /// the variable is unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(CONFIG_ENV) {
            Some(path) => Self::load(Path::new(&path)),
            None => Ok(Self::default()),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Config::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    what: "config",
                    message: format!("line {}: expected `key = value`", lineno + 1),
                });
            };
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |message: String| Error::Parse {
            what: "config",
            message,
        };
        let positive = |value: &str| -> Result<usize> {
            match value.parse::<usize>() {
                Ok(n) if n > 0 => Ok(n),
                _ => Err(bad(format!(
                    "{key} must be a positive integer, got {value:?}"
                ))),
            }
        };
        match key {
            "store_dir" => self.store_dir = PathBuf::from(value),
            "index_path" => self.index_path = PathBuf::from(value),
            "port" => {
                self.port = value
                    .parse()
                    .map_err(|_| bad(format!("port must be a TCP port, got {value:?}")))?
            }
            "max_threads" => self.max_threads = positive(value)?,
            "max_snippets_per_thread" => self.max_snippets_per_thread = positive(value)?,
            "suggest_limit_default" => self.suggest_limit_default = positive(value)?,
            "comment_leader" => self.comment_leader = value.to_string(),
            "base_url" => self.base_url = value.trim_end_matches('/').to_string(),
            "telemetry_path" => self.telemetry_path = PathBuf::from(value),
            "session_idle_secs" => self.session_idle_secs = positive(value)? as u64,
            "tag_filter" => {
                self.tag_filter = match value {
                    "" | "*" => None,
                    tag => Some(tag.to_lowercase()),
                }
            }
            other => return Err(bad(format!("unknown key {other:?}"))),
        }
        Ok(())
    }
}
