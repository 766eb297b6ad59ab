//! Run configuration: one JSON document with a block per subcommand.
//! Command-line flags are applied on top before anything runs, and the
//! effective configuration is what gets hashed into provenance headers.

use std::path::{Path, PathBuf};

use holdup_core::statics::GridSpec;
use holdup_core::ModelConfig;
use holdup_econometrics::{EstimationSpec, Execution, SynthConfig};
use holdup_tariff::{PanelOptions, Requirements};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Default output directory when neither the config nor `--out` names one.
pub const OUT_DIR_ENV: &str = "HOLDUP_LAB_OUT";
pub const DEFAULT_OUT_DIR: &str = "holdup-out";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub model: ModelConfig,
    pub sweep: GridSpec,
    pub ups: UpsConfig,
    pub tariff: TariffConfig,
    pub estimate: EstimateConfig,
    pub synth: SynthConfig,
    pub monte_carlo: MonteCarloBlock,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            output_dir: None,
            seed: None,
            model: ModelConfig::canonical(),
            sweep: GridSpec::default(),
            ups: UpsConfig::default(),
            tariff: TariffConfig::default(),
            estimate: EstimateConfig::default(),
            synth: SynthConfig::default(),
            monte_carlo: MonteCarloBlock::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum UpsMethod {
    #[default]
    Solve,
    Series,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UpsConfig {
    /// Long-form flows `year,seller_sector,buyer_sector,flow`.
    pub flows: Option<PathBuf>,
    /// `year,sector,final_demand,total_output`.
    pub totals: Option<PathBuf>,
    /// Table year; the latest when absent.
    pub year: Option<i32>,
    pub method: UpsMethod,
    pub series_terms: usize,
    /// Optional `io_sector,industry_code[,weight]` mapping for industry
    /// values and quartiles.
    pub concordance: Option<PathBuf>,
}

impl Default for UpsConfig {
    fn default() -> Self {
        Self {
            flows: None,
            totals: None,
            year: None,
            method: UpsMethod::Solve,
            series_terms: 200,
            concordance: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct TariffConfig {
    pub lines: Option<PathBuf>,
    pub hs_concordance: Option<PathBuf>,
    /// IO tables and sector concordance for upstream tariffs, industry
    /// upstreamness, deal directions and quartiles.
    pub io_flows: Option<PathBuf>,
    pub io_totals: Option<PathBuf>,
    pub io_concordance: Option<PathBuf>,
    pub requirements: Requirements,
    /// Firm-year spine; with it a firm-year panel is built.
    pub firm_years: Option<PathBuf>,
    pub deals: Option<PathBuf>,
    pub panel: PanelOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateConfig {
    pub panel: Option<PathBuf>,
    /// One table column per specification.
    pub specs: Vec<EstimationSpec>,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self {
            panel: None,
            specs: vec![EstimationSpec::default()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarloBlock {
    pub replications: usize,
    pub term: String,
    pub execution: Execution,
}

impl Default for MonteCarloBlock {
    fn default() -> Self {
        Self {
            replications: 200,
            term: "tariff".into(),
            execution: Execution::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", p.display())))
            }
        }
    }

    /// Config file, then the environment variable, then the default.
    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| CliError::Config("this subcommand needs a seed (config `seed` or --seed)".into()))
    }

    /// SHA-256 of the effective configuration without the output
    /// directory, which does not affect results.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = None;
        let json = serde_json::to_string(&c).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// An input path that must exist; a missing one is a configuration error.
pub fn input(path: &Option<PathBuf>, key: &str) -> Result<PathBuf> {
    let p = path
        .clone()
        .ok_or_else(|| CliError::Config(format!("missing input path `{key}`")))?;
    if !p.is_file() {
        return Err(CliError::Config(format!("`{key}`: {} does not exist", p.display())));
    }
    Ok(p)
}

pub fn optional_input(path: &Option<PathBuf>, key: &str) -> Result<Option<PathBuf>> {
    path.as_ref().map(|_| input(path, key)).transpose()
}
