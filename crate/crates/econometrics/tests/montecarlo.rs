use holdup_econometrics::*;

#[test]
fn synthetic_panel_shape_and_determinism() {
    let cfg = SynthConfig::default();
    let a = synth_dgp(&cfg, 42).unwrap();
    let b = synth_dgp(&cfg, 42).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), b.to_csv());
    assert_ne!(a, synth_dgp(&cfg, 43).unwrap());
    assert_eq!(a.rows.len(), 5000);

    let tariffs: Vec<f64> = a.rows.iter().map(|r| r.tariff.unwrap()).collect();
    let mean = tariffs.iter().sum::<f64>() / tariffs.len() as f64;
    assert!((mean - 9.502).abs() < 0.5);
    assert!(tariffs.iter().all(|t| *t >= 0.0));
    // Average tariffs fall over time.
    let year_mean = |y: i32| {
        let v: Vec<f64> = a.rows.iter().filter(|r| r.year == y).map(|r| r.tariff.unwrap()).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    assert!(year_mean(2005) > year_mean(2009));
    // Lags line up with the previous year of the same firm.
    for w in a.rows.windows(2) {
        if w[0].firm_id == w[1].firm_id {
            assert_eq!(w[1].tariff_lag, w[0].tariff);
        }
    }
    let industries: std::collections::BTreeSet<&str> = a.rows.iter().map(|r| r.industry_code.as_str()).collect();
    assert!(industries.len() > 35 && industries.len() <= 40);
    let y_mean = a.rows.iter().map(|r| r.backward_count as f64).sum::<f64>() / 5000.0;
    assert!((y_mean - 0.4).abs() < 0.1, "{y_mean}");
    assert_eq!(a.control_names, ["age", "size", "skill", "leverage", "liquidity", "hhi"]);

    let bad = SynthConfig { firms: 1, ..cfg.clone() };
    assert!(matches!(synth_dgp(&bad, 1), Err(EconError::Config(_))));
    let bad = SynthConfig { tariff_persistence: 1.0, ..cfg };
    assert!(synth_dgp(&bad, 1).is_err());
}

#[test]
fn pseudo_r2_is_reproducible() {
    let frame = Frame::from_panel(&synth_dgp(&SynthConfig::default(), 9).unwrap()).unwrap();
    let a = fit(&frame, &EstimationSpec::default()).unwrap();
    let b = fit(&frame, &EstimationSpec::default()).unwrap();
    assert_eq!(a, b);
    assert!((a.pseudo_r2.unwrap() - b.pseudo_r2.unwrap()).abs() < 1e-6);
    assert_eq!(a.nobs + a.dropped.total(), 5000);
    assert!(a.dropped.all_zero_groups > 0);
}

#[test]
fn planted_coefficient_is_covered() {
    let report = run_monte_carlo(&MonteCarloConfig::default()).unwrap();
    let s = &report.summary;
    assert_eq!(s.replications, 200);
    assert_eq!(s.failed, 0);
    assert!(s.within_two_se >= 0.90, "{s:?}");
    assert!((0.92..=0.98).contains(&s.coverage_95), "{s:?}");
}

#[test]
fn null_effect_is_rarely_rejected() {
    let cfg = MonteCarloConfig {
        replications: 200,
        seed: 5,
        synth: SynthConfig {
            beta: 0.0,
            ..SynthConfig::default()
        },
        ..MonteCarloConfig::default()
    };
    let s = run_monte_carlo(&cfg).unwrap().summary;
    assert!((0.01..=0.10).contains(&s.reject_zero_5pct), "{s:?}");
}

#[test]
fn error_shrinks_with_sample_size() {
    let rmse = |firms: usize| {
        let cfg = MonteCarloConfig {
            replications: 40,
            seed: 8,
            synth: SynthConfig {
                firms,
                ..SynthConfig::default()
            },
            ..MonteCarloConfig::default()
        };
        run_monte_carlo(&cfg).unwrap().summary
    };
    let (small, mid, large) = (rmse(200), rmse(1000), rmse(4000));
    assert!(small.rmse > mid.rmse && mid.rmse > large.rmse, "{small:?} {mid:?} {large:?}");
    assert!(large.bias.abs() < small.rmse);
}

#[test]
fn sequential_and_parallel_runs_agree() {
    let base = MonteCarloConfig {
        replications: 6,
        ..MonteCarloConfig::default()
    };
    let seq = run_monte_carlo(&MonteCarloConfig {
        execution: Execution::Sequential,
        ..base.clone()
    })
    .unwrap();
    let par = run_monte_carlo(&MonteCarloConfig {
        execution: Execution::Parallel,
        ..base
    })
    .unwrap();
    assert_eq!(seq, par);
    assert!(run_monte_carlo(&MonteCarloConfig { replications: 0, ..MonteCarloConfig::default() }).is_err());
}
