//! Run configuration: TOML file, then flags on top.

use std::path::{Path, PathBuf};

use seqsing_core::pairgen::{DEFAULT_MAX_STAGES, DEFAULT_TOLERANCE};
use seqsing_core::Precision;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Environment override for the worker count; nothing else reads the environment.
pub const WORKERS_ENV: &str = "SEQSING_WORKERS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub precision: Precision,
    pub tolerance: f64,
    /// Upper bound on `N` for domination searches and weight dumps.
    pub max_n: u32,
    pub max_stages: u32,
    pub seed: u64,
    pub samples: usize,
    /// Random restarts per domination search.
    pub budget: usize,
    pub workers: Option<usize>,
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    /// Where the JSON report goes in addition to stdout.
    pub json: Option<PathBuf>,
    /// Directory for the plot CSVs.
    pub plot_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision: Precision::Double,
            tolerance: DEFAULT_TOLERANCE,
            max_n: 100_000,
            max_stages: DEFAULT_MAX_STAGES,
            seed: 0,
            samples: 10_000,
            budget: 256,
            workers: None,
            outputs: Outputs::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.into(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |what: &str| Err(CliError::Config(what.to_string()));
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return bad("tolerance must be positive");
        }
        if self.max_n == 0 {
            return bad("max_n must be positive");
        }
        if self.max_stages == 0 {
            return bad("max_stages must be positive");
        }
        if self.samples == 0 {
            return bad("samples must be positive");
        }
        if self.workers == Some(0) {
            return bad("workers must be positive");
        }
        Ok(())
    }

    /// Flag, then environment, then config file.
    pub fn resolve_workers(
        &self,
        flag: Option<usize>,
        env: Option<&str>,
    ) -> Result<Option<usize>, CliError> {
        if let Some(n) = flag {
            return match n {
                0 => Err(CliError::Config("--workers must be positive".into())),
                n => Ok(Some(n)),
            };
        }
        if let Some(text) = env.filter(|t| !t.trim().is_empty()) {
            return match text.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(Some(n)),
                _ => Err(CliError::Config(format!(
                    "{WORKERS_ENV}={text:?} is not a positive integer"
                ))),
            };
        }
        Ok(self.workers)
    }
}
