//! Config file, environment and flag merging.
//!
//! One TOML file holds a `[common]` block plus one block per subcommand.
//! Precedence: command-line flags > `HEISENLAB_*` environment variables >
//! config file > built-in defaults. The fully resolved configuration is
//! embedded in every run's JSON sidecar so runs replay exactly.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const ENV_PREFIX: &str = "HEISENLAB_";

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub common: CommonConfig,
    #[serde(default)]
    pub entropic: EntropicConfig,
    #[serde(default, rename = "tv-curve")]
    pub tv_curve: TvCurveConfig,
    #[serde(default)]
    pub typdist: TypdistConfig,
    #[serde(default)]
    pub ball: BallConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default, rename = "word-stats")]
    pub word_stats: WordStatsConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CommonConfig {
    pub seed: u64,
    pub out: PathBuf,
    /// 0 means "leave the rayon default".
    pub threads: usize,
    /// Dense cap for exact evolution and BFS.
    pub cap: usize,
}

impl Default for CommonConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            out: PathBuf::from("runs"),
            threads: 0,
            cap: heisenlab::walk::DEFAULT_DENSE_CAP,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EntropicConfig {
    pub p: u64,
    pub d: u32,
    pub k: Vec<f64>,
    pub alpha: Vec<f64>,
    pub omega_floor: f64,
}

impl Default for EntropicConfig {
    fn default() -> Self {
        Self {
            p: 5,
            d: 3,
            k: vec![2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0],
            alpha: vec![0.0],
            omega_floor: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct TvCurveConfig {
    pub p: u64,
    pub d: u32,
    pub k: usize,
    pub replicas: u64,
    /// "discrete" or "poissonized"
    pub time_model: String,
    /// "exact" or "trajectories"
    pub mode: String,
    pub t_max: f64,
    pub t_points: usize,
    pub average: bool,
    /// paired trajectories per time point in trajectories mode
    pub pairs: u64,
}

impl Default for TvCurveConfig {
    fn default() -> Self {
        Self {
            p: 3,
            d: 3,
            k: 4,
            replicas: 1,
            time_model: "discrete".into(),
            mode: "exact".into(),
            t_max: 40.0,
            t_points: 41,
            average: false,
            pairs: 10_000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct TypdistConfig {
    pub p_schedule: Vec<u64>,
    pub d: u32,
    pub k: usize,
    pub beta: Vec<f64>,
    pub replicas: u64,
    pub omega: Option<f64>,
}

impl Default for TypdistConfig {
    fn default() -> Self {
        Self {
            p_schedule: vec![11, 31, 101],
            d: 3,
            k: 6,
            beta: vec![0.5],
            replicas: 1,
            omega: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BallConfig {
    pub k: u64,
    pub radius: Option<u64>,
    pub p: Option<u64>,
    pub d: Option<u32>,
    pub omega: Option<f64>,
    pub samples: u64,
}

impl Default for BallConfig {
    fn default() -> Self {
        Self {
            k: 6,
            radius: None,
            p: Some(101),
            d: Some(3),
            omega: None,
            samples: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub trials: u64,
    /// Fault-injection hook for the mutation test; "" or "cij-transpose".
    pub inject: String,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            trials: 200,
            inject: String::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WordStatsConfig {
    pub word: Vec<u32>,
    pub k: usize,
}

impl Default for WordStatsConfig {
    fn default() -> Self {
        Self {
            word: vec![1, 2, 1, 2],
            k: 2,
        }
    }
}

pub fn load_config(path: Option<&Path>) -> Result<ConfigFile, CliError> {
    let path = match path {
        Some(p) => p.to_path_buf(),
        None => match std::env::var(format!("{ENV_PREFIX}CONFIG")) {
            Ok(p) => PathBuf::from(p),
            Err(_) => return Ok(ConfigFile::default()),
        },
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Applies `HEISENLAB_SEED`, `HEISENLAB_OUT`, `HEISENLAB_THREADS` and
/// `HEISENLAB_CAP` on top of the file values.
pub fn apply_env(common: &mut CommonConfig) -> Result<(), CliError> {
    fn parsed<T: std::str::FromStr>(name: &str) -> Result<Option<T>, CliError> {
        match std::env::var(format!("{ENV_PREFIX}{name}")) {
            Ok(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| CliError::Config(format!("bad {ENV_PREFIX}{name}: {raw:?}"))),
            Err(_) => Ok(None),
        }
    }
    if let Some(seed) = parsed::<u64>("SEED")? {
        common.seed = seed;
    }
    if let Ok(out) = std::env::var(format!("{ENV_PREFIX}OUT")) {
        common.out = PathBuf::from(out);
    }
    if let Some(threads) = parsed::<usize>("THREADS")? {
        common.threads = threads;
    }
    if let Some(cap) = parsed::<usize>("CAP")? {
        common.cap = cap;
    }
    Ok(())
}

/// Parses a comma-separated list flag.
pub fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>, CliError> {
    raw.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| CliError::Config(format!("bad {what} entry {s:?}")))
        })
        .collect()
}
