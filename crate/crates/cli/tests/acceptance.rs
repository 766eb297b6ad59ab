//! Acceptance checks, one line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the verdict lines always
//! reach the terminal. Criterion 3 requires `∂e^n/∂τ > 0` at every interior
//! point; in the canonical family the import cutoff is inactive at part of
//! the grid, where τ leaves `e^n` exactly unchanged, so that criterion is
//! reported as FAIL and listed in `KNOWN_FAILURES`. Any other failure makes
//! the binary exit nonzero.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use holdup_core::bargain::{buyer_expected_profit, integrated_expected_profit, seller_expected_profit};
use holdup_core::primitives::{CostParams, ModelConfig, ModelPrimitives, PriceDist, ValueParams};
use holdup_core::statics::render::summary_markdown;
use holdup_core::statics::{hypothesis_sweep, GridSpec, SweepOutput, Variant, VariantVerdict};
use holdup_econometrics::{
    fit, run_monte_carlo, synth_dgp, Absorption, EstimationSpec, Frame, MonteCarloConfig, SynthConfig,
};
use holdup_network::{upstreamness, IoTable, Method};
use holdup_tariff::{industry_tariff, upstream_tariff, HsConcordance, Mode, TariffLine};
use holdup_testkit::exponential::Game;
use holdup_testkit::linalg::{identity, inverse, matmul, Mat};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_FAILURES: &[u32] = &[3];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn verdict(out: &SweepOutput, variant: Variant) -> &VariantVerdict {
    out.summary.verdicts.iter().find(|v| v.variant == variant).expect("variant swept")
}

/// Integration invests more at every interior SOC-passing point.
fn ordering(canonical: &SweepOutput, seconds: f64) -> Outcome {
    let v = &canonical.summary.verdicts;
    let interior: usize = v.iter().map(|v| v.interior_soc_points).sum();
    let violations: usize = v.iter().map(|v| v.ordering_violations).sum();
    outcome(
        interior > 0 && violations == 0 && seconds < 30.0,
        format!("{violations} violations over {interior} interior points, sweep {seconds:.2}s"),
    )
}

fn statics_consistency(canonical: &SweepOutput) -> Outcome {
    let (dt, dtau) = canonical
        .summary
        .verdicts
        .iter()
        .fold((0.0f64, 0.0f64), |(a, b), v| (a.max(v.max_gap_dt), b.max(v.max_gap_dtau)));
    outcome(
        dt < 1e-4 && dtau < 1e-4,
        format!("max relative gap dt {dt:.2e}, dtau {dtau:.2e}"),
    )
}

fn upstream_mechanism(canonical: &SweepOutput) -> Outcome {
    let v = verdict(canonical, Variant::Unconstrained);
    let all_positive = v.en_tau_positive == v.interior_soc_points;
    let region = v.dtau_negative > 0;
    outcome(
        all_positive && region,
        format!(
            "de^n/dtau > 0 at {}/{} interior points ({} of {} with an active import cutoff); \
             dΔU/dtau < 0 at {}/{} points",
            v.en_tau_positive,
            v.interior_soc_points,
            v.en_tau_positive_import_active,
            v.import_active_points,
            v.dtau_negative,
            v.evaluable_points
        ),
    )
}

fn downstream_variants(canonical: &SweepOutput) -> Outcome {
    let free = verdict(canonical, Variant::Unconstrained);
    let low_value = GridSpec {
        base: ModelConfig {
            value_params: ValueParams { v0: 3.0, a1: 0.5, a2: 0.05 },
            ..ModelConfig::canonical()
        },
        ..GridSpec::default()
    };
    let out = hypothesis_sweep(&low_value).expect("low-value sweep");
    let capped = verdict(&out, Variant::Constrained);
    let free_low = verdict(&out, Variant::Unconstrained);
    let table = summary_markdown(&out.summary);
    let side_by_side = table.contains("unconstrained") && table.contains("| constrained");
    outcome(
        free.dt_zero == free.evaluable_points
            && free_low.dt_zero == free_low.evaluable_points
            && capped.binding_n_points > 0
            && capped.binding_n_negative == capped.binding_n_points
            && side_by_side,
        format!(
            "unconstrained dΔU/dt = 0 at {}/{} (canonical) and {}/{} (V0 = 3); \
             constrained dΔU/dt < 0 at {}/{} binding points",
            free.dt_zero,
            free.evaluable_points,
            free_low.dt_zero,
            free_low.evaluable_points,
            capped.binding_n_negative,
            capped.binding_n_points
        ),
    )
}

fn quadrature() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let mean = rng.random_range(1.0..10.0);
        let prim = ModelPrimitives::new(ModelConfig {
            alpha: rng.random_range(0.2..0.95),
            t: rng.random_range(0.0..2.0),
            tau: rng.random_range(0.0..3.0),
            k_fixed: 0.0,
            value_params: ValueParams {
                v0: rng.random_range(8.0..14.0),
                a1: 0.5,
                a2: 0.05,
            },
            cost_params: CostParams::Exponential {
                c0: rng.random_range(1.0..6.0),
                lambda: rng.random_range(0.5..3.0),
            },
            price_dist: PriceDist::Exponential { mean },
            e_max: 6.0,
            constrained_variant: false,
        })
        .expect("valid draw");
        let e = rng.random_range(0.0..6.0);
        let g = Game {
            alpha: prim.alpha(),
            value: prim.value(),
            tau: prim.tau(),
            mean,
        };
        let c = prim.cost(e);
        for (ours, closed) in [
            (seller_expected_profit(&prim, e), g.seller(c, e)),
            (buyer_expected_profit(&prim, e), g.buyer(c)),
            (integrated_expected_profit(&prim, e), g.integrated(c, e)),
        ] {
            worst = worst.max((ours.expect("profit") - closed).abs());
        }
    }
    outcome(worst < 1e-8, format!("max abs error {worst:.2e} over 50 draws x 3 profits"))
}

fn sector_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("S{i}")).collect()
}

/// Random requirements with column sums in [0.1, 0.7], closed by
/// `Y = (I - D)^-1 F` with the reference inverse.
fn random_table(rng: &mut ChaCha8Rng, n: usize) -> IoTable {
    let mut d: Mat = vec![vec![0.0; n]; n];
    for j in 0..n {
        let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        let col = rng.random_range(0.1..0.7);
        for i in 0..n {
            d[i][j] = raw[i] / total * col;
        }
    }
    let f: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..100.0)).collect();
    let id = identity(n);
    let leontief: Mat = (0..n).map(|i| (0..n).map(|j| id[i][j] - d[i][j]).collect()).collect();
    let inv = inverse(&leontief).expect("productive table");
    let y: Vec<f64> = inv.iter().map(|row| row.iter().zip(&f).map(|(a, b)| a * b).sum()).collect();
    let flows = DMatrix::from_fn(n, n, |i, j| d[i][j] * y[j]);
    let fd = DVector::from_fn(n, |i, _| y[i] - flows.row(i).sum());
    IoTable::new(2007, sector_names(n), flows, fd, DVector::from_vec(y)).expect("consistent table")
}

fn upstreamness_checks() -> Outcome {
    let start = Instant::now();
    let y = DVector::from_vec(vec![100.0, 50.0, 20.0]);
    let all_final = IoTable::new(2002, sector_names(3), DMatrix::zeros(3, 3), y.clone(), y).expect("table");
    let unit = upstreamness(&all_final, Method::Solve).expect("ups").values == vec![1.0; 3];

    let mut flows = DMatrix::zeros(2, 2);
    flows[(1, 0)] = 40.0;
    let chain = IoTable::new(
        2002,
        sector_names(2),
        flows,
        DVector::from_vec(vec![100.0, 0.0]),
        DVector::from_vec(vec![100.0, 40.0]),
    )
    .expect("chain");
    let chain_ok = upstreamness(&chain, Method::Solve).expect("ups").values == vec![1.0, 2.0];

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..25 {
        let io = random_table(&mut rng, 10);
        let solve = upstreamness(&io, Method::Solve).expect("solve").values;
        let series = upstreamness(&io, Method::Series(200)).expect("series").values;
        worst = solve.iter().zip(&series).map(|(a, b)| (a - b).abs()).fold(worst, f64::max);
    }
    let seconds = start.elapsed().as_secs_f64();
    outcome(
        unit && chain_ok && worst < 1e-10 && seconds < 1.0,
        format!(
            "all-final unit: {unit}; chain (1, 2): {chain_ok}; series vs solve {worst:.1e} on 25 tables; {seconds:.3}s"
        ),
    )
}

fn tariff_checks() -> Outcome {
    let line = |hs6: &str, mfn: f64, value: f64| TariffLine {
        year: 2005,
        hs6: hs6.into(),
        mfn_rate: mfn,
        ahs_rate: None,
        import_value: Some(value),
    };
    let conc = HsConcordance::from_pairs([("010101", "1310"), ("010102", "1310")]);
    let weighted = industry_tariff(&[line("010101", 10.0, 30.0), line("010102", 20.0, 10.0)], &conc, Mode::Weighted)
        .expect("weighted")
        .values
        .get(2005, "1310");

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut exact = 0;
    for _ in 0..50 {
        let years = rng.random_range(1..6);
        let t = DMatrix::from_fn(years, 5, |_, _| rng.random_range(0.0..30.0));
        let d = DMatrix::from_fn(5, 5, |_, _| rng.random_range(0.0..0.2));
        let rows = |m: &DMatrix<f64>| -> Mat { (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect() };
        let up = upstream_tariff(&t, &d).expect("product");
        if rows(&up) == matmul(&rows(&t), &rows(&d)) {
            exact += 1;
        }
    }
    outcome(
        weighted == Some(12.5) && exact == 50,
        format!("weighted example {weighted:?}; {exact}/50 products bit-identical to the double loop"),
    )
}

fn recovery() -> Outcome {
    let cfg = MonteCarloConfig::default();
    let start = Instant::now();
    let report = match run_monte_carlo(&cfg) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("monte carlo failed: {e}")),
    };
    let seconds = start.elapsed().as_secs_f64();
    let s = &report.summary;
    let rows = cfg.synth.firms * cfg.synth.years;
    outcome(
        rows == 5000
            && s.replications == 200
            && s.within_two_se >= 0.90
            && (0.92..=0.98).contains(&s.coverage_95)
            && seconds < 300.0,
        format!(
            "{} reps on {rows} firm-years: within 2 SE {:.3}, 95% coverage {:.3}, mean estimate {:.4} (truth {}), {} failed, {seconds:.1}s",
            s.replications, s.within_two_se, s.coverage_95, s.mean_estimate, s.truth, s.failed
        ),
    )
}

fn absorption() -> Outcome {
    let cfg = SynthConfig {
        firms: 400,
        years: 5,
        ..SynthConfig::default()
    };
    let frame = Frame::from_panel(&synth_dgp(&cfg, 77).expect("synth")).expect("frame");
    let terms = ["tariff", "age", "size", "leverage"];
    let spec = EstimationSpec {
        regressors: terms.iter().map(|s| s.to_string()).collect(),
        ..EstimationSpec::default()
    };
    let absorbed = fit(&frame, &spec).expect("absorbed");
    let dummies = fit(
        &frame,
        &EstimationSpec {
            absorption: Absorption::Dummies,
            ..spec
        },
    )
    .expect("dummies");
    let gap = terms
        .iter()
        .map(|t| (absorbed.coefficient(t).unwrap().estimate - dummies.coefficient(t).unwrap().estimate).abs())
        .fold(0.0, f64::max);
    outcome(
        frame.nrows() == 2000 && gap < 1e-6,
        format!("{} rows ({} kept), max slope gap {gap:.2e}", frame.nrows(), absorbed.nobs),
    )
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .expect("output dir")
        .map(|e| {
            let e = e.expect("entry");
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).expect("artifact"))
        })
        .collect()
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().expect("tempdir");
    let mut runs = Vec::new();
    for name in ["first", "second"] {
        let dir = tmp.path().join(name);
        let code = holdup_cli::run_cli(["holdup-lab", "replicate-desk", "--seed", "2024", "--out", dir.to_str().unwrap()]);
        if code != 0 {
            return outcome(false, format!("replicate-desk exited with {code}"));
        }
        runs.push(snapshot(&dir));
    }
    let files = runs[0].len();
    outcome(
        files > 0 && runs[0] == runs[1],
        format!("{files} artifacts, identical bytes across runs: {}", runs[0] == runs[1]),
    )
}

fn main() {
    let start = Instant::now();
    let canonical = hypothesis_sweep(&GridSpec::default()).expect("canonical sweep");
    let sweep_seconds = start.elapsed().as_secs_f64();

    let checks: Vec<(u32, &str, Box<dyn Fn() -> Outcome>)> = vec![
        (1, "integration invests more", Box::new(|| ordering(&canonical, sweep_seconds))),
        (2, "analytic vs differenced statics", Box::new(|| statics_consistency(&canonical))),
        (3, "upstream tariff mechanism", Box::new(|| upstream_mechanism(&canonical))),
        (4, "downstream tariff by variant", Box::new(|| downstream_variants(&canonical))),
        (5, "quadrature vs closed forms", Box::new(quadrature)),
        (6, "upstreamness", Box::new(upstreamness_checks)),
        (7, "tariff aggregation", Box::new(tariff_checks)),
        (8, "planted-coefficient recovery", Box::new(recovery)),
        (9, "absorbed vs dummy fixed effects", Box::new(absorption)),
        (10, "replicate-desk determinism", Box::new(determinism)),
    ];

    let mut unexpected = Vec::new();
    for (id, name, check) in &checks {
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {id:>2} {name}: {}", o.detail);
        if o.pass == KNOWN_FAILURES.contains(id) {
            unexpected.push(*id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all criteria as expected (known failures: {KNOWN_FAILURES:?})");
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
