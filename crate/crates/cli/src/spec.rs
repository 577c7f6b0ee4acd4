//! Experiment specification files (JSON).
//!
//! A synthetic spec names a list of run cells plus the repetition count and
//! base seed; per-run seeds are derived as `cell_seed(base, cell, rep)` so
//! adding cells never perturbs existing cells' streams. Parse errors carry
//! serde's line/column diagnostics.

use std::fs;
use std::path::Path;

use serde::Deserialize;
use vfcb::fedsim::{Algorithm, PmgMode, RunConfig};
use vfcb::o3m::DimPartition;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

fn default_repetitions() -> usize {
    5
}

fn default_lambda() -> f64 {
    1.0
}

fn default_beta() -> f64 {
    0.5
}

fn default_v() -> f64 {
    0.01
}

fn default_ratio() -> f64 {
    1.0
}

fn default_noise() -> f64 {
    vfcb::envs::DEFAULT_SIGMA2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub schema_version: u32,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// How per-seed traces are combined in aggregate.csv.
    #[serde(default)]
    pub aggregation: AggregationMode,
    pub cells: Vec<SyntheticCell>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AggregationMode {
    /// Mean with a one-standard-deviation band.
    #[default]
    MeanStd,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticCell {
    pub id: String,
    pub algorithm: AlgorithmName,
    pub horizon: usize,
    pub arms: usize,
    pub dim: usize,
    /// Per-participant dimension split; defaults to a single participant
    /// holding everything.
    #[serde(default)]
    pub partition: Option<Vec<usize>>,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_v")]
    pub v: f64,
    #[serde(default = "default_ratio")]
    pub partial_ratio: f64,
    #[serde(default)]
    pub env: EnvSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvSpec {
    #[serde(default = "default_noise")]
    pub noise_sigma2: f64,
}

impl Default for EnvSpec {
    fn default() -> Self {
        Self {
            noise_sigma2: default_noise(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmName {
    Linucb,
    Lints,
    Vfucb,
    Vfts,
    PartialLinucb,
    PartialLints,
}

impl AlgorithmName {
    pub fn to_algorithm(self) -> Algorithm {
        match self {
            AlgorithmName::Linucb => Algorithm::LinUcb,
            AlgorithmName::Lints => Algorithm::LinTs,
            AlgorithmName::Vfucb => Algorithm::VfUcb,
            AlgorithmName::Vfts => Algorithm::VfTs,
            AlgorithmName::PartialLinucb => Algorithm::PartialLinUcb,
            AlgorithmName::PartialLints => Algorithm::PartialLinTs,
        }
    }
}

impl SyntheticSpec {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::spec(format!("cannot read {}: {e}", path.display())))?;
        let spec: SyntheticSpec = serde_json::from_str(&text)
            .map_err(|e| CliError::spec(format!("{}: {e}", path.display())))?;
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> CliResult<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::spec(format!(
                "schema_version {} unsupported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.repetitions == 0 {
            return Err(CliError::spec("repetitions must be at least 1"));
        }
        if self.cells.is_empty() {
            return Err(CliError::spec("spec has no cells"));
        }
        let mut seen = std::collections::HashSet::new();
        for cell in &self.cells {
            if !seen.insert(&cell.id) {
                return Err(CliError::spec(format!("duplicate cell id '{}'", cell.id)));
            }
            if cell.horizon == 0 || cell.arms == 0 || cell.dim == 0 {
                return Err(CliError::spec(format!(
                    "cell '{}': horizon, arms and dim must be positive",
                    cell.id
                )));
            }
            if !(cell.partial_ratio > 0.0 && cell.partial_ratio <= 1.0) {
                return Err(CliError::spec(format!(
                    "cell '{}': partial_ratio outside (0, 1]",
                    cell.id
                )));
            }
        }
        Ok(())
    }
}

impl SyntheticCell {
    /// The run configuration for one repetition of this cell.
    pub fn run_config(&self, seed: u64, coupled_ts: bool) -> CliResult<RunConfig> {
        let partition = match &self.partition {
            Some(parts) => DimPartition::new(parts.clone())
                .map_err(|e| CliError::spec(format!("cell '{}': {e}", self.id)))?,
            None => DimPartition::new(vec![self.dim]).expect("positive dim"),
        };
        let mut cfg = RunConfig::new(
            self.algorithm.to_algorithm(),
            self.horizon,
            self.arms,
            self.dim,
        )
        .with_partition(partition)
        .with_seed(seed);
        cfg.lambda = self.lambda;
        cfg.beta = self.beta;
        cfg.v = self.v;
        cfg.partial_ratio = self.partial_ratio;
        cfg.coupled_ts = coupled_ts;
        cfg.pmg = PmgMode::ThirdParty;
        Ok(cfg)
    }
}

/// Replay evaluation spec.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplaySpec {
    pub schema_version: u32,
    /// Random-partition repetitions for partial cells; also the number of
    /// seeds behind stochastic policies.
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub base_seed: u64,
    pub cells: Vec<ReplayCell>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplayCell {
    pub id: String,
    pub policy: PolicyName,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_replay_beta")]
    pub beta: f64,
    #[serde(default = "default_v")]
    pub v: f64,
    #[serde(default = "default_ratio")]
    pub partial_ratio: f64,
}

fn default_replay_beta() -> f64 {
    0.6
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyName {
    Random,
    Linucb,
    Lints,
    PartialLinucb,
    PartialLints,
}

impl PolicyName {
    /// Whether two repetitions of this cell can differ at all.
    pub fn is_stochastic(self) -> bool {
        !matches!(self, PolicyName::Linucb)
    }
}

impl ReplaySpec {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::spec(format!("cannot read {}: {e}", path.display())))?;
        let spec: ReplaySpec = serde_json::from_str(&text)
            .map_err(|e| CliError::spec(format!("{}: {e}", path.display())))?;
        if spec.schema_version != SCHEMA_VERSION {
            return Err(CliError::spec(format!(
                "schema_version {} unsupported (expected {SCHEMA_VERSION})",
                spec.schema_version
            )));
        }
        if spec.repetitions == 0 || spec.cells.is_empty() {
            return Err(CliError::spec("replay spec needs cells and repetitions >= 1"));
        }
        let mut seen = std::collections::HashSet::new();
        for cell in &spec.cells {
            if !seen.insert(&cell.id) {
                return Err(CliError::spec(format!("duplicate cell id '{}'", cell.id)));
            }
            if !(cell.partial_ratio > 0.0 && cell.partial_ratio <= 1.0) {
                return Err(CliError::spec(format!(
                    "cell '{}': partial_ratio outside (0, 1]",
                    cell.id
                )));
            }
        }
        Ok(spec)
    }
}

/// Ingestion settings file (all fields optional).
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestSpec {
    pub n_hash_values: Option<usize>,
    pub hash_buckets: Option<u64>,
    pub top_labels: Option<usize>,
    pub hash_seed: Option<u64>,
    pub user_scaling: Option<Vec<f64>>,
}

impl IngestSpec {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::spec(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::spec(format!("{}: {e}", path.display())))
    }

    pub fn to_config(&self) -> vfcb::envs::IngestConfig {
        let mut cfg = vfcb::envs::IngestConfig::default();
        if let Some(v) = self.n_hash_values {
            cfg.n_hash_values = v;
        }
        if let Some(v) = self.hash_buckets {
            cfg.hash_buckets = v;
        }
        if let Some(v) = self.top_labels {
            cfg.top_labels = v;
        }
        if let Some(v) = self.hash_seed {
            cfg.hash_seed = v;
        }
        if let Some(v) = &self.user_scaling {
            cfg.user_scaling = v.clone();
        }
        cfg
    }
}
