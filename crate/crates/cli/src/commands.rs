//! One function per subcommand. Each reads its inputs, runs an engine and
//! hands finished strings to [`Artifacts`]; nothing is written until the
//! computation has succeeded.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::path::Path;

use holdup_core::statics::render::{reports_csv, summary_markdown};
use holdup_core::statics::{hypothesis_sweep, SweepOutput};
use holdup_core::{solve_model, ModelPrimitives};
use holdup_econometrics::{
    coefficients_csv, fit, regression_table, run_monte_carlo, synth_dgp, EstimationResult, EstimationSpec, Estimator,
    Frame, MonteCarloConfig,
};
use holdup_network::deals::{classify_all, read_deals};
use holdup_network::io_table::read_io_tables;
use holdup_network::upstreamness::{read_concordance, ConcordanceRow};
use holdup_network::{sector_concordance, upstream_quartiles, upstreamness, IoTable, Method};
use holdup_tariff::{
    build_panel, read_firm_years, read_hs_concordance, read_tariff_lines, upstream_industry_tariffs, TariffPanel,
};
use serde::Serialize;

use crate::config::{input, optional_input, RunConfig, UpsMethod};
use crate::error::{CliError, Result};
use crate::output::Artifacts;

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn model_solve(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let prim = ModelPrimitives::new(cfg.model)?;
    let solution = solve_model(&prim)?;
    out.json("solution.json", &solution)?;
    Ok(())
}

pub fn model_sweep(cfg: &RunConfig, out: &mut Artifacts) -> Result<SweepOutput> {
    let sweep = hypothesis_sweep(&cfg.sweep)?;
    write_sweep(&sweep, out)?;
    Ok(sweep)
}

fn write_sweep(sweep: &SweepOutput, out: &mut Artifacts) -> Result<()> {
    if sweep.reports.is_empty() {
        return Err(CliError::Data("sweep produced no grid points".into()));
    }
    out.csv("statics.csv", &reports_csv(&sweep.reports))?;
    out.markdown("verdicts.md", &summary_markdown(&sweep.summary))?;
    out.json("verdicts.json", &sweep.summary)?;
    Ok(())
}

/// IO tables from a flows/totals pair, keyed by year.
fn io_tables(flows: &Path, totals: &Path) -> Result<BTreeMap<i32, IoTable>> {
    let tables = read_io_tables(open(flows)?, open(totals)?)?;
    if tables.is_empty() {
        return Err(CliError::Data(format!("{}: no IO tables", flows.display())));
    }
    Ok(tables)
}

fn pick_table(tables: &BTreeMap<i32, IoTable>, year: Option<i32>) -> Result<&IoTable> {
    match year {
        Some(y) => tables
            .get(&y)
            .ok_or_else(|| CliError::Config(format!("no IO table for year {y}"))),
        None => Ok(tables.values().next_back().expect("nonempty")),
    }
}

fn industry_upstreamness(io: &IoTable, method: Method, conc: &[ConcordanceRow]) -> Result<BTreeMap<String, f64>> {
    Ok(sector_concordance(&upstreamness(io, method)?, io, conc)?)
}

#[derive(Serialize)]
struct QuartileSummary<'a> {
    year: i32,
    cuts: [f64; 3],
    degenerate: bool,
    industries: usize,
    assignment: &'a BTreeMap<String, holdup_network::Quartile>,
}

pub fn ups_compute(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let u = &cfg.ups;
    let flows = input(&u.flows, "ups.flows")?;
    let totals = input(&u.totals, "ups.totals")?;
    let conc = optional_input(&u.concordance, "ups.concordance")?;
    let method = match u.method {
        UpsMethod::Solve => Method::Solve,
        UpsMethod::Series => Method::Series(u.series_terms),
    };

    let tables = io_tables(&flows, &totals)?;
    let io = pick_table(&tables, u.year)?;
    let ups = upstreamness(io, method)?;
    let mut csv = String::from("sector,upstreamness\n");
    for (s, v) in ups.iter() {
        writeln!(csv, "{s},{v}").expect("string write");
    }

    let industry = match &conc {
        Some(p) => {
            let rows = read_concordance(open(p)?)?;
            let map = sector_concordance(&ups, io, &rows)?;
            let q = upstream_quartiles(&map)?;
            Some((map, q))
        }
        None => None,
    };

    out.csv("upstreamness.csv", &csv)?;
    if let Some((map, q)) = industry {
        let mut csv = String::from("industry_code,upstreamness,quartile\n");
        for (code, v) in &map {
            writeln!(csv, "{code},{v},{}", q.assignment[code].label()).expect("string write");
        }
        out.csv("industry_upstreamness.csv", &csv)?;
        out.json(
            "quartiles.json",
            &QuartileSummary {
                year: io.year(),
                cuts: q.cuts,
                degenerate: q.degenerate,
                industries: map.len(),
                assignment: &q.assignment,
            },
        )?;
    }
    Ok(())
}

pub fn tariff_build(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let t = &cfg.tariff;
    let lines_path = input(&t.lines, "tariff.lines")?;
    let hs_path = input(&t.hs_concordance, "tariff.hs_concordance")?;
    let io_flows = optional_input(&t.io_flows, "tariff.io_flows")?;
    let io_totals = optional_input(&t.io_totals, "tariff.io_totals")?;
    let io_conc = optional_input(&t.io_concordance, "tariff.io_concordance")?;
    let firm_years = optional_input(&t.firm_years, "tariff.firm_years")?;
    let deals_path = optional_input(&t.deals, "tariff.deals")?;

    let lines = read_tariff_lines(open(&lines_path)?)?;
    let hs = read_hs_concordance(open(&hs_path)?)?;
    let mut panel = TariffPanel::from_lines(&lines, &hs)?;

    // The IO block is all-or-nothing.
    let io = match (io_flows, io_totals, io_conc) {
        (Some(f), Some(tt), Some(c)) => Some((io_tables(&f, &tt)?, read_concordance(open(&c)?)?)),
        (None, None, None) => None,
        _ => {
            return Err(CliError::Config(
                "tariff.io_flows, tariff.io_totals and tariff.io_concordance go together".into(),
            ))
        }
    };
    let mut industry_ups = None;
    if let Some((tables, conc)) = &io {
        panel.upstream = upstream_industry_tariffs(panel.measure(t.panel.measure), tables, conc, t.requirements)?;
        let latest = tables.values().next_back().expect("nonempty");
        industry_ups = Some(industry_upstreamness(latest, Method::Solve, conc)?);
    }

    let firm_panel = match firm_years {
        None => {
            if deals_path.is_some() {
                return Err(CliError::Config("tariff.deals needs tariff.firm_years".into()));
            }
            None
        }
        Some(fy) => {
            let firm_years = read_firm_years(open(&fy)?)?;
            let quartiles = match &industry_ups {
                Some(map) => upstream_quartiles(map)?.assignment,
                None => BTreeMap::new(),
            };
            let deals = match (&deals_path, &industry_ups) {
                (None, _) => Vec::new(),
                (Some(p), Some(map)) => classify_all(&read_deals(open(p)?)?, map)?,
                (Some(_), None) => {
                    return Err(CliError::Config(
                        "classifying deals needs the IO block (tariff.io_flows, io_totals, io_concordance)".into(),
                    ))
                }
            };
            Some(build_panel(&firm_years, &panel, &quartiles, &deals, &t.panel)?)
        }
    };

    out.csv("tariffs.csv", &panel.to_csv())?;
    if let Some((fp, report)) = firm_panel {
        out.csv("panel.csv", &fp.to_csv())?;
        out.json("join_report.json", &report)?;
    }
    Ok(())
}

fn write_estimates(results: &[EstimationResult], out: &mut Artifacts) -> Result<()> {
    let mut csvs = Vec::with_capacity(results.len());
    for r in results {
        csvs.push(coefficients_csv(r)?);
    }
    let refs: Vec<&EstimationResult> = results.iter().collect();
    let table = regression_table(&refs)?;
    for (i, csv) in csvs.iter().enumerate() {
        out.csv(&format!("coefficients_{}.csv", i + 1), csv)?;
    }
    out.markdown("regression_table.md", &table)?;
    out.json("estimates.json", &results)?;
    Ok(())
}

pub fn estimate(cfg: &RunConfig, out: &mut Artifacts) -> Result<Vec<EstimationResult>> {
    let panel = input(&cfg.estimate.panel, "estimate.panel")?;
    if cfg.estimate.specs.is_empty() {
        return Err(CliError::Config("estimate.specs is empty".into()));
    }
    let frame = Frame::read_csv(open(&panel)?)?;
    let results = cfg
        .estimate
        .specs
        .iter()
        .enumerate()
        .map(|(i, s)| fit(&frame, s).map_err(|e| CliError::from(e).context(&format!("specification {}", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    write_estimates(&results, out)?;
    Ok(results)
}

pub fn synth(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let seed = cfg.require_seed()?;
    let panel = synth_dgp(&cfg.synth, seed)?;
    out.csv("panel.csv", &panel.to_csv())?;
    Ok(())
}

fn monte_carlo_config(cfg: &RunConfig, seed: u64) -> MonteCarloConfig {
    let spec = cfg.estimate.specs.first().cloned().unwrap_or_default();
    MonteCarloConfig {
        replications: cfg.monte_carlo.replications,
        seed,
        term: cfg.monte_carlo.term.clone(),
        truth: None,
        synth: cfg.synth.clone(),
        spec,
        execution: cfg.monte_carlo.execution,
    }
}

pub fn monte_carlo(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let seed = cfg.require_seed()?;
    let report = run_monte_carlo(&monte_carlo_config(cfg, seed))?;
    let mut csv = String::from("replication,estimate,se,nobs,error\n");
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in &report.replications {
        let err = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
        writeln!(csv, "{},{},{},{},{}", r.index, cell(r.estimate), cell(r.se), r.nobs.map(|n| n.to_string()).unwrap_or_default(), err)
            .expect("string write");
    }
    out.csv("replications.csv", &csv)?;
    out.json("monte_carlo.json", &report.summary)?;
    Ok(())
}

/// Columns of the desk table: the PPML baseline on the chosen spec, OLS on
/// the same count with the same effects, and a logit on any backward deal
/// with industry and year effects (with firm dummies over a short panel the
/// logit would suffer the incidental-parameter bias).
pub fn desk_specs(baseline: &EstimationSpec) -> Vec<EstimationSpec> {
    let ols = EstimationSpec {
        estimator: Estimator::Ols,
        ..baseline.clone()
    };
    let logit = EstimationSpec {
        estimator: Estimator::Logit,
        outcome: ANY_BACKWARD.into(),
        fixed_effects: baseline
            .fixed_effects
            .iter()
            .filter(|f| f.as_str() != "firm_id")
            .cloned()
            .collect(),
        ..baseline.clone()
    };
    vec![baseline.clone(), ols, logit]
}

pub const ANY_BACKWARD: &str = "any_backward";

#[derive(Debug, Clone, Serialize)]
pub struct DeskCheck {
    pub term: String,
    pub truth: f64,
    pub estimate: f64,
    pub se: f64,
    pub within_two_se: bool,
}

pub fn replicate_desk(cfg: &RunConfig, out: &mut Artifacts) -> Result<DeskCheck> {
    let seed = cfg.require_seed()?;
    let panel = synth_dgp(&cfg.synth, seed)?;
    let csv = panel.to_csv();
    let frame = Frame::read_csv(csv.as_bytes())?;
    let any: Vec<f64> = frame
        .num("backward_count")?
        .iter()
        .map(|&c| if c.is_nan() { f64::NAN } else { f64::from(u8::from(c > 0.0)) })
        .collect();
    let frame = frame.with_num(ANY_BACKWARD, any)?;

    let baseline = cfg.estimate.specs.first().cloned().unwrap_or_default();
    let results = desk_specs(&baseline)
        .iter()
        .map(|s| fit(&frame, s).map_err(|e| CliError::from(e).context(&format!("{} column", s.estimator.label()))))
        .collect::<Result<Vec<_>>>()?;
    let term = cfg.monte_carlo.term.as_str();
    let coef = results[0]
        .coefficient(term)
        .ok_or_else(|| CliError::Config(format!("baseline has no `{term}` coefficient")))?;
    let truth = cfg.synth.beta;
    let check = DeskCheck {
        term: term.to_string(),
        truth,
        estimate: coef.estimate,
        se: coef.se,
        within_two_se: (coef.estimate - truth).abs() <= 2.0 * coef.se,
    };
    let sweep = hypothesis_sweep(&cfg.sweep)?;

    out.csv("panel.csv", &csv)?;
    write_estimates(&results, out)?;
    out.json("recovery.json", &check)?;
    write_sweep(&sweep, out)?;
    Ok(check)
}

