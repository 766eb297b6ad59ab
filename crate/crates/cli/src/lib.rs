//! `holdup-lab`: batch driver for the hold-up model, upstreamness, tariff
//! and estimation engines.
//!
//! Every run is a function of one JSON configuration (plus flag overrides),
//! its input files and a seed. Artifacts carry a provenance header and are
//! written atomically; a failing run removes whatever it already wrote and
//! reports the failure as one JSON line on stderr.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use holdup_econometrics::{Estimator, Execution};
use holdup_tariff::{Mode, Requirements};

use crate::config::{RunConfig, UpsMethod};
use crate::error::Result;
use crate::output::{Artifacts, Provenance};

#[derive(Debug, Parser)]
#[command(name = "holdup-lab", version, about = "Hold-up model, tariff pipeline and count-regression driver")]
pub struct Cli {
    /// JSON run configuration; every key has a default.
    #[arg(long, short, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (else config `output_dir`, else $HOLDUP_LAB_OUT,
    /// else ./holdup-out).
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    /// Root seed for synthetic data and Monte Carlo.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The two-firm game.
    #[command(subcommand)]
    Model(ModelCommand),
    /// Upstreamness from IO tables.
    #[command(subcommand)]
    Ups(UpsCommand),
    /// Industry tariffs and the firm-year panel.
    #[command(subcommand)]
    Tariff(TariffCommand),
    /// Fit the configured specifications to a panel.
    Estimate(EstimateArgs),
    /// Synthetic firm-year panel with a planted tariff effect.
    Synth(SynthArgs),
    /// Planted-coefficient Monte Carlo of the first specification.
    MonteCarlo(MonteCarloArgs),
    /// Synthetic panel, desk regressions and the model sweep in one run.
    ReplicateDesk,
}

#[derive(Debug, Subcommand)]
pub enum ModelCommand {
    /// Both organizational forms at one parameter point, and ΔU.
    Solve(SolveArgs),
    /// Comparative statics over the configured grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub k_fixed: Option<f64>,
    /// Use the capacity-constrained variant.
    #[arg(long)]
    pub constrained: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Evaluate grid points on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Subcommand)]
pub enum UpsCommand {
    Compute(UpsArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum UpsMethodArg {
    Solve,
    Series,
}

#[derive(Debug, Args)]
pub struct UpsArgs {
    #[arg(long)]
    pub flows: Option<PathBuf>,
    #[arg(long)]
    pub totals: Option<PathBuf>,
    #[arg(long)]
    pub year: Option<i32>,
    #[arg(long, value_enum)]
    pub method: Option<UpsMethodArg>,
    /// Terms of the truncated series.
    #[arg(long)]
    pub terms: Option<usize>,
    #[arg(long)]
    pub concordance: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum TariffCommand {
    Build(TariffArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MeasureArg {
    Simple,
    Weighted,
    Ahs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RequirementsArg {
    Direct,
    Complete,
}

#[derive(Debug, Args)]
pub struct TariffArgs {
    #[arg(long)]
    pub lines: Option<PathBuf>,
    #[arg(long)]
    pub hs_concordance: Option<PathBuf>,
    #[arg(long)]
    pub io_flows: Option<PathBuf>,
    #[arg(long)]
    pub io_totals: Option<PathBuf>,
    #[arg(long)]
    pub io_concordance: Option<PathBuf>,
    #[arg(long)]
    pub firm_years: Option<PathBuf>,
    #[arg(long)]
    pub deals: Option<PathBuf>,
    /// Industry tariff measure used in the panel.
    #[arg(long, value_enum)]
    pub mode: Option<MeasureArg>,
    /// Lag depth of the tariff columns; 0 drops them.
    #[arg(long)]
    pub lag: Option<u32>,
    #[arg(long, value_enum)]
    pub requirements: Option<RequirementsArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EstimatorArg {
    Ppml,
    Ols,
    Logit,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub panel: Option<PathBuf>,
    /// Override the estimator of every specification.
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorArg>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub firms: Option<usize>,
    #[arg(long)]
    pub years: Option<usize>,
    /// Planted tariff coefficient.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MonteCarloArgs {
    #[arg(long)]
    pub replications: Option<usize>,
    #[arg(long)]
    pub sequential: bool,
    #[command(flatten)]
    pub synth: SynthArgs,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Model(ModelCommand::Solve(_)) => "model solve",
            Command::Model(ModelCommand::Sweep(_)) => "model sweep",
            Command::Ups(_) => "ups compute",
            Command::Tariff(_) => "tariff build",
            Command::Estimate(_) => "estimate",
            Command::Synth(_) => "synth",
            Command::MonteCarlo(_) => "monte-carlo",
            Command::ReplicateDesk => "replicate-desk",
        }
    }
}

fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

fn set_some<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}

fn apply_synth(cfg: &mut RunConfig, a: &SynthArgs) {
    set(&mut cfg.synth.firms, a.firms);
    set(&mut cfg.synth.years, a.years);
    set(&mut cfg.synth.beta, a.beta);
}

/// Seed of `replicate-desk` when neither the config nor `--seed` sets one.
pub const DESK_SEED: u64 = 20_240_601;

/// Flags win over the file.
pub fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    set_some(&mut cfg.output_dir, cli.out.clone());
    set_some(&mut cfg.seed, cli.seed);
    match &cli.command {
        Command::Model(ModelCommand::Solve(a)) => {
            set(&mut cfg.model.alpha, a.alpha);
            set(&mut cfg.model.t, a.t);
            set(&mut cfg.model.tau, a.tau);
            set(&mut cfg.model.k_fixed, a.k_fixed);
            cfg.model.constrained_variant |= a.constrained;
        }
        Command::Model(ModelCommand::Sweep(a)) => {
            if a.sequential {
                cfg.sweep.execution = holdup_core::Execution::Sequential;
            }
        }
        Command::Ups(UpsCommand::Compute(a)) => {
            let u = &mut cfg.ups;
            set_some(&mut u.flows, a.flows.clone());
            set_some(&mut u.totals, a.totals.clone());
            set_some(&mut u.year, a.year);
            set_some(&mut u.concordance, a.concordance.clone());
            set(&mut u.series_terms, a.terms);
            set(
                &mut u.method,
                a.method.map(|m| match m {
                    UpsMethodArg::Solve => UpsMethod::Solve,
                    UpsMethodArg::Series => UpsMethod::Series,
                }),
            );
        }
        Command::Tariff(TariffCommand::Build(a)) => {
            let t = &mut cfg.tariff;
            set_some(&mut t.lines, a.lines.clone());
            set_some(&mut t.hs_concordance, a.hs_concordance.clone());
            set_some(&mut t.io_flows, a.io_flows.clone());
            set_some(&mut t.io_totals, a.io_totals.clone());
            set_some(&mut t.io_concordance, a.io_concordance.clone());
            set_some(&mut t.firm_years, a.firm_years.clone());
            set_some(&mut t.deals, a.deals.clone());
            set(
                &mut t.panel.measure,
                a.mode.map(|m| match m {
                    MeasureArg::Simple => Mode::Simple,
                    MeasureArg::Weighted => Mode::Weighted,
                    MeasureArg::Ahs => Mode::Ahs,
                }),
            );
            if let Some(lag) = a.lag {
                t.panel.lag = (lag > 0).then_some(lag);
            }
            set(
                &mut t.requirements,
                a.requirements.map(|r| match r {
                    RequirementsArg::Direct => Requirements::Direct,
                    RequirementsArg::Complete => Requirements::Complete,
                }),
            );
        }
        Command::Estimate(a) => {
            set_some(&mut cfg.estimate.panel, a.panel.clone());
            if let Some(e) = a.estimator {
                let e = match e {
                    EstimatorArg::Ppml => Estimator::Ppml,
                    EstimatorArg::Ols => Estimator::Ols,
                    EstimatorArg::Logit => Estimator::Logit,
                };
                for s in &mut cfg.estimate.specs {
                    s.estimator = e;
                }
            }
        }
        Command::Synth(a) => apply_synth(&mut cfg, a),
        Command::MonteCarlo(a) => {
            set(&mut cfg.monte_carlo.replications, a.replications);
            if a.sequential {
                cfg.monte_carlo.execution = Execution::Sequential;
            }
            apply_synth(&mut cfg, &a.synth);
        }
        Command::ReplicateDesk => {
            cfg.seed.get_or_insert(DESK_SEED);
        }
    }
    Ok(cfg)
}

fn dispatch(command: &Command, cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    match command {
        Command::Model(ModelCommand::Solve(_)) => commands::model_solve(cfg, out),
        Command::Model(ModelCommand::Sweep(_)) => commands::model_sweep(cfg, out).map(drop),
        Command::Ups(_) => commands::ups_compute(cfg, out),
        Command::Tariff(_) => commands::tariff_build(cfg, out),
        Command::Estimate(_) => commands::estimate(cfg, out).map(drop),
        Command::Synth(_) => commands::synth(cfg, out),
        Command::MonteCarlo(_) => commands::monte_carlo(cfg, out),
        Command::ReplicateDesk => commands::replicate_desk(cfg, out).map(drop),
    }
}

/// Runs a parsed command; on failure every file it wrote is removed.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let cfg = effective_config(cli)?;
    let provenance = Provenance::new(cli.command.name(), cfg.hash(), cfg.seed);
    let mut out = Artifacts::create(&cfg.output_dir(), provenance)?;
    match dispatch(&cli.command, &cfg, &mut out) {
        Ok(()) => Ok(out.written().to_vec()),
        Err(e) => {
            out.rollback();
            Err(e)
        }
    }
}

/// Entry point shared by the binary and tests. Returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let command = cli.command.name();
    match run(&cli) {
        Ok(files) => {
            let files: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
            println!("{}", serde_json::json!({ "status": "ok", "command": command, "outputs": files }));
            0
        }
        Err(e) => {
            eprintln!("{}", e.report(command));
            e.exit_code()
        }
    }
}
