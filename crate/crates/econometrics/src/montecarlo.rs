//! Planted-coefficient Monte Carlo.
//!
//! Replication `r` draws its panel from a ChaCha stream `r` of the root
//! seed, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{EconError, Result};
use crate::exec::Execution;
use crate::frame::Frame;
use crate::spec::EstimationSpec;
use crate::synth::{synth_with_rng, SynthConfig};

/// Two-sided 95% normal critical value.
pub const Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarloConfig {
    pub replications: usize,
    pub seed: u64,
    pub term: String,
    /// Defaults to the planted tariff coefficient.
    pub truth: Option<f64>,
    pub synth: SynthConfig,
    pub spec: EstimationSpec,
    pub execution: Execution,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            replications: 200,
            seed: 20_240_601,
            term: "tariff".into(),
            truth: None,
            synth: SynthConfig::default(),
            spec: EstimationSpec::default(),
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    pub index: usize,
    pub estimate: Option<f64>,
    pub se: Option<f64>,
    pub nobs: Option<usize>,
    pub error: Option<String>,
}

/// Shares are over all replications; a failed fit counts against every
/// coverage-type share.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub replications: usize,
    pub failed: usize,
    pub truth: f64,
    pub mean_estimate: f64,
    pub bias: f64,
    pub rmse: f64,
    pub sd_estimate: f64,
    pub mean_se: f64,
    pub within_two_se: f64,
    pub coverage_95: f64,
    pub same_sign: f64,
    pub reject_zero_5pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub replications: Vec<Replication>,
    pub summary: MonteCarloSummary,
}

pub fn replication_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn replicate(cfg: &MonteCarloConfig, index: usize) -> Replication {
    let run = || -> Result<(f64, f64, usize)> {
        let panel = synth_with_rng(&cfg.synth, &mut replication_rng(cfg.seed, index))?;
        let res = crate::fit(&Frame::from_panel(&panel)?, &cfg.spec)?;
        let c = res
            .coefficient(&cfg.term)
            .ok_or_else(|| EconError::UnknownColumn(cfg.term.clone()))?;
        Ok((c.estimate, c.se, res.nobs))
    };
    match run() {
        Ok((b, se, n)) => Replication {
            index,
            estimate: Some(b),
            se: Some(se),
            nobs: Some(n),
            error: None,
        },
        Err(e) => Replication {
            index,
            estimate: None,
            se: None,
            nobs: None,
            error: Some(e.to_string()),
        },
    }
}

pub fn summarize(reps: &[Replication], truth: f64) -> MonteCarloSummary {
    let ok: Vec<(f64, f64)> = reps.iter().filter_map(|r| Some((r.estimate?, r.se?))).collect();
    let total = reps.len().max(1) as f64;
    let m = ok.len().max(1) as f64;
    let mean = ok.iter().map(|r| r.0).sum::<f64>() / m;
    let var = ok.iter().map(|r| (r.0 - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
    let share = |pred: &dyn Fn(f64, f64) -> bool| ok.iter().filter(|(b, s)| pred(*b, *s)).count() as f64 / total;
    MonteCarloSummary {
        replications: reps.len(),
        failed: reps.len() - ok.len(),
        truth,
        mean_estimate: mean,
        bias: mean - truth,
        rmse: (ok.iter().map(|r| (r.0 - truth).powi(2)).sum::<f64>() / m).sqrt(),
        sd_estimate: var.sqrt(),
        mean_se: ok.iter().map(|r| r.1).sum::<f64>() / m,
        within_two_se: share(&|b, s| (b - truth).abs() <= 2.0 * s),
        coverage_95: share(&|b, s| (b - truth).abs() <= Z95 * s),
        same_sign: share(&|b, _| b.signum() == truth.signum() && b != 0.0),
        reject_zero_5pct: share(&|b, s| (b / s).abs() > Z95),
    }
}

pub fn run_monte_carlo(cfg: &MonteCarloConfig) -> Result<MonteCarloReport> {
    if cfg.replications == 0 {
        return Err(EconError::Config("replications must be positive".into()));
    }
    cfg.synth.validate()?;
    cfg.spec.validate()?;
    let indices: Vec<usize> = (0..cfg.replications).collect();
    let replications = cfg.execution.map(&indices, |&i| replicate(cfg, i));
    let truth = cfg.truth.unwrap_or(cfg.synth.beta);
    Ok(MonteCarloReport {
        summary: summarize(&replications, truth),
        replications,
    })
}
