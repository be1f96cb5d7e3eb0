//! Run configuration: JSON on disk, validated into a [`RunConfig`].
//!
//! ```json
//! {
//!   "n_levels": 10, "lambda": 0.025, "delta_e": 1.0, "delta_eps": 0.5, "seed": 7,
//!   "times": [5, 7, 10],
//!   "realizations": 1,
//!   "pip": { "convention": "both", "base": "2", "enumeration_cap": 100000,
//!            "batch_size": 200, "stderr_tol": 0.001, "max_samples": 100000 },
//!   "output": { "prefix": "out/n10", "format": "csv" }
//! }
//! ```
//!
//! Only the five model keys are required. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use bandpip_core::evolve::validate_times;
use bandpip_core::{Convention, LogBase, PipConfig, SystemParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const DEFAULT_GRID_POINTS: usize = 201;
pub const DEFAULT_GRID_END: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ConventionChoice {
    #[default]
    Paper,
    #[value(name = "pure-bipartite")]
    PureBipartite,
    Both,
}

impl ConventionChoice {
    pub fn conventions(self) -> Vec<Convention> {
        match self {
            ConventionChoice::Paper => vec![Convention::Paper],
            ConventionChoice::PureBipartite => vec![Convention::PureBipartite],
            ConventionChoice::Both => vec![Convention::Paper, Convention::PureBipartite],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPip {
    #[serde(default)]
    convention: ConventionChoice,
    #[serde(default)]
    base: LogBase,
    enumeration_cap: Option<u128>,
    batch_size: Option<usize>,
    stderr_tol: Option<f64>,
    max_samples: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    prefix: Option<PathBuf>,
    #[serde(default)]
    format: OutputFormat,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n_levels: usize,
    lambda: f64,
    delta_e: f64,
    delta_eps: f64,
    seed: u64,
    times: Option<Vec<f64>>,
    realizations: Option<usize>,
    pip: Option<RawPip>,
    output: Option<RawOutput>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipSettings {
    pub conventions: ConventionChoice,
    pub config: PipConfig,
}

impl Default for PipSettings {
    fn default() -> Self {
        Self {
            conventions: ConventionChoice::Paper,
            config: PipConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputSpec {
    pub prefix: PathBuf,
    pub format: OutputFormat,
}

/// A validated run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub params: SystemParams,
    pub times: Vec<f64>,
    pub realizations: usize,
    pub pip: PipSettings,
    pub output: OutputSpec,
}

pub fn default_times() -> Vec<f64> {
    let step = DEFAULT_GRID_END / (DEFAULT_GRID_POINTS - 1) as f64;
    (0..DEFAULT_GRID_POINTS).map(|k| k as f64 * step).collect()
}

impl RunConfig {
    /// A config with default grid, pip settings and output.
    pub fn new(params: SystemParams) -> Self {
        Self {
            params,
            times: default_times(),
            realizations: 1,
            pip: PipSettings::default(),
            output: OutputSpec {
                prefix: PathBuf::from("bandpip"),
                format: OutputFormat::Csv,
            },
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let defaults = PipConfig::default();
        let pip = match raw.pip {
            Some(p) => PipSettings {
                conventions: p.convention,
                config: PipConfig {
                    convention: Convention::Paper,
                    base: p.base,
                    enumeration_cap: p.enumeration_cap.unwrap_or(defaults.enumeration_cap),
                    batch_size: p.batch_size.unwrap_or(defaults.batch_size),
                    stderr_tol: p.stderr_tol.unwrap_or(defaults.stderr_tol),
                    max_samples: p.max_samples.unwrap_or(defaults.max_samples),
                },
            },
            None => PipSettings::default(),
        };
        let output = raw.output.map_or(
            OutputSpec {
                prefix: PathBuf::from("bandpip"),
                format: OutputFormat::Csv,
            },
            |o| OutputSpec {
                prefix: o.prefix.unwrap_or_else(|| PathBuf::from("bandpip")),
                format: o.format,
            },
        );
        let config = Self {
            params: SystemParams {
                n_levels: raw.n_levels,
                delta_e: raw.delta_e,
                delta_eps: raw.delta_eps,
                lambda: raw.lambda,
                seed: raw.seed,
            },
            times: raw.times.unwrap_or_else(default_times),
            realizations: raw.realizations.unwrap_or(1),
            pip,
            output,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        validate_times(&self.times).map_err(|e| CliError::Config(format!("times: {e}")))?;
        if self.realizations == 0 {
            return Err(CliError::Config("realizations must be at least 1".into()));
        }
        self.pip
            .config
            .validate()
            .map_err(|e| CliError::Config(format!("pip: {e}")))?;
        Ok(())
    }

    pub fn base(&self) -> LogBase {
        self.pip.config.base
    }

    /// SHA-256 over the physics-relevant part of the config (output location excluded).
    pub fn hash(&self) -> String {
        #[derive(Serialize)]
        struct Hashed<'a> {
            params: &'a SystemParams,
            times: &'a [f64],
            realizations: usize,
            pip: &'a PipSettings,
        }
        let canonical = serde_json::to_string(&Hashed {
            params: &self.params,
            times: &self.times,
            realizations: self.realizations,
            pip: &self.pip,
        })
        .expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    RunConfig::from_json_str(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}
