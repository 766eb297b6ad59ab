use holdup_econometrics::*;
use holdup_testkit::glm::{dummy_design, poisson_newton};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

/// Firm × year panel with an industry factor crossed with firms.
struct Toy {
    frame: Frame,
    firm: Vec<usize>,
    year: Vec<usize>,
    industry: Vec<usize>,
}

fn toy(firms: usize, years: usize, seed: u64) -> Toy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = Normal::new(0.0, 1.0).unwrap();
    let firm_fe: Vec<f64> = (0..firms).map(|_| 0.5 * z.sample(&mut rng)).collect();
    let (mut firm, mut year, mut industry) = (vec![], vec![], vec![]);
    let (mut x1, mut x2, mut y) = (vec![], vec![], vec![]);
    for f in 0..firms {
        for t in 0..years {
            let ind = rng.random_range(0..6);
            let a = z.sample(&mut rng);
            let b = rng.random_range(0.0..2.0);
            let eta = -0.3 + 0.3 * a - 0.2 * b + firm_fe[f] + 0.1 * t as f64 + 0.05 * ind as f64;
            firm.push(f);
            year.push(t);
            industry.push(ind);
            x1.push(a);
            x2.push(b);
            y.push(Poisson::new(eta.exp()).unwrap().sample(&mut rng));
        }
    }
    let frame = Frame::new()
        .with_text("firm", &firm.iter().map(|f| format!("F{f}")).collect::<Vec<_>>())
        .unwrap()
        .with_num("year", year.iter().map(|&t| 2000.0 + t as f64).collect())
        .unwrap()
        .with_num("industry", industry.iter().map(|&i| i as f64).collect())
        .unwrap()
        .with_num("x1", x1)
        .unwrap()
        .with_num("x2", x2)
        .unwrap()
        .with_num("y", y)
        .unwrap();
    Toy {
        frame,
        firm,
        year,
        industry,
    }
}

fn slopes(r: &EstimationResult, terms: &[&str]) -> Vec<f64> {
    terms.iter().map(|t| r.coefficient(t).unwrap().estimate).collect()
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn intercept_only_is_log_mean() {
    let frame = Frame::new().with_num("y", vec![0.0, 1.0, 2.0, 3.0]).unwrap();
    let spec = EstimationSpec::new(Estimator::Ppml, "y", &[], &[]);
    let r = ppml_fit(&frame, &spec).unwrap();
    assert_eq!(r.coefficients.len(), 1);
    assert_eq!(r.coefficients[0].term, INTERCEPT);
    assert!((r.coefficients[0].estimate - 1.5f64.ln()).abs() < 1e-10);
    // The model is its own null.
    assert!(r.pseudo_r2.unwrap().abs() < 1e-12);
}

#[test]
fn matches_newton_oracle_without_effects() {
    let t = toy(40, 5, 1);
    let spec = EstimationSpec::new(Estimator::Ppml, "y", &["x1", "x2"], &[]);
    let r = ppml_fit(&t.frame, &spec).unwrap();
    assert_eq!(r.nobs, 200);
    let x: Vec<Vec<f64>> = (0..200)
        .map(|i| vec![1.0, t.frame.num("x1").unwrap()[i], t.frame.num("x2").unwrap()[i]])
        .collect();
    let oracle = poisson_newton(&x, t.frame.num("y").unwrap());
    let ours = slopes(&r, &[INTERCEPT, "x1", "x2"]);
    assert!(max_gap(&ours, &oracle) < 1e-6, "{ours:?} vs {oracle:?}");
}

#[test]
fn absorbed_effects_match_explicit_indicators() {
    let t = toy(200, 10, 2);
    let spec = EstimationSpec::new(Estimator::Ppml, "y", &["x1", "x2"], &["firm", "year", "industry"]).clustered("firm");
    let absorbed = ppml_fit(&t.frame, &spec).unwrap();
    let dummies = ppml_fit(
        &t.frame,
        &EstimationSpec {
            absorption: Absorption::Dummies,
            ..spec.clone()
        },
    )
    .unwrap();
    let a = slopes(&absorbed, &["x1", "x2"]);
    let d = slopes(&dummies, &["x1", "x2"]);
    assert!(max_gap(&a, &d) < 1e-6, "{a:?} vs {d:?}");
    // Same sandwich either way.
    for (ca, cd) in absorbed.coefficients.iter().zip(&dummies.coefficients) {
        assert!((ca.se - cd.se).abs() < 1e-6 * cd.se);
    }

    // Independent oracle on the sample the fit kept.
    let rows = &absorbed.sample_rows;
    let dense = |v: &[usize]| -> Vec<usize> {
        let mut map = std::collections::HashMap::new();
        rows.iter()
            .map(|&i| {
                let n = map.len();
                *map.entry(v[i]).or_insert(n)
            })
            .collect()
    };
    let x1 = t.frame.num("x1").unwrap();
    let x2 = t.frame.num("x2").unwrap();
    let extra = vec![rows.iter().map(|&i| x1[i]).collect(), rows.iter().map(|&i| x2[i]).collect()];
    let (design, kept) = dummy_design(&[dense(&t.firm), dense(&t.year), dense(&t.industry)], &extra);
    let y: Vec<f64> = rows.iter().map(|&i| t.frame.num("y").unwrap()[i]).collect();
    let beta = poisson_newton(&design, &y);
    assert!(kept.len() >= 2);
    let oracle = &beta[beta.len() - 2..];
    assert!(max_gap(&a, oracle) < 1e-6, "{a:?} vs {oracle:?}");
}

#[test]
fn score_is_zero_at_convergence() {
    let t = toy(150, 6, 3);
    let spec = EstimationSpec::new(Estimator::Ppml, "y", &["x1", "x2"], &["firm", "year"]);
    let r = ppml_fit(&t.frame, &spec).unwrap();
    let y = t.frame.num("y").unwrap();
    for name in ["x1", "x2"] {
        let x = t.frame.num(name).unwrap();
        // Σ(y-μ)x equals Σ(y-μ)x̃ because residuals sum to zero in every
        // fixed-effect group at the optimum.
        let score: f64 = r.sample_rows.iter().zip(&r.fitted).map(|(&i, m)| (y[i] - m) * x[i]).sum();
        assert!(score.abs() < 1e-8, "{name}: {score:e}");
    }
}

#[test]
fn scaling_the_outcome_leaves_slopes() {
    let t = toy(100, 5, 4);
    let spec = EstimationSpec::new(Estimator::Ppml, "y", &["x1", "x2"], &["firm", "year"]);
    let base = ppml_fit(&t.frame, &spec).unwrap();
    let tripled: Vec<f64> = t.frame.num("y").unwrap().iter().map(|v| 3.0 * v).collect();
    let frame = t.frame.clone().with_num("y", tripled).unwrap();
    let scaled = ppml_fit(&frame, &spec).unwrap();
    assert!(max_gap(&slopes(&base, &["x1", "x2"]), &slopes(&scaled, &["x1", "x2"])) < 1e-8);

    let no_fe = EstimationSpec::new(Estimator::Ppml, "y", &["x1"], &[]);
    let a = ppml_fit(&t.frame, &no_fe).unwrap();
    let b = ppml_fit(&frame, &no_fe).unwrap();
    assert!((a.coefficients[1].estimate - b.coefficients[1].estimate).abs() < 1e-8);
    let shift = b.coefficients[0].estimate - a.coefficients[0].estimate;
    assert!((shift - 3f64.ln()).abs() < 1e-8);
}

#[test]
fn one_row_per_cluster_is_scaled_hc0() {
    let t = toy(60, 5, 5);
    let n = t.frame.nrows();
    let frame = t.frame.clone().with_num("row", (0..n).map(|i| i as f64).collect()).unwrap();
    let robust = EstimationSpec::new(Estimator::Ppml, "y", &["x1", "x2"], &["firm"]);
    let hc0 = ppml_fit(&frame, &robust).unwrap();
    let cl = ppml_fit(&frame, &robust.clone().clustered("row")).unwrap();
    let m = hc0.nobs as f64;
    for (a, b) in hc0.vcov.iter().flatten().zip(cl.vcov.iter().flatten()) {
        assert!((a * m / (m - 1.0) - b).abs() < 1e-12 * b.abs().max(1e-12));
    }
}

#[test]
fn duplicating_clusters_keeps_z() {
    let t = toy(80, 4, 6);
    let n = t.frame.nrows();
    let twice: Vec<usize> = (0..n).chain(0..n).collect();
    let doubled = t.frame.select_rows(&twice);
    let spec = EstimationSpec::new(Estimator::Ppml, "y", &["x1", "x2"], &["firm", "year"]).clustered("firm");
    let a = ppml_fit(&t.frame, &spec).unwrap();
    let b = ppml_fit(&doubled, &spec).unwrap();
    assert_eq!(a.n_clusters, b.n_clusters);
    for (ca, cb) in a.coefficients.iter().zip(&b.coefficients) {
        assert!((ca.estimate - cb.estimate).abs() < 1e-8);
        assert!((ca.z - cb.z).abs() < 1e-6 * ca.z.abs(), "{} vs {}", ca.z, cb.z);
    }
}

#[test]
fn pseudo_r2_orders_likelihoods() {
    let t = toy(50, 4, 7);
    let spec = EstimationSpec::new(Estimator::Ppml, "y", &["x1", "x2"], &["firm"]);
    let r = ppml_fit(&t.frame, &spec).unwrap();
    let p = r.pseudo_r2.unwrap();
    assert!(p > 0.0 && p <= 1.0);
    let fe_null = ppml_fit(
        &t.frame,
        &EstimationSpec {
            null_model: NullModel::FixedEffects,
            ..spec.clone()
        },
    )
    .unwrap();
    assert!(fe_null.pseudo_r2.unwrap() < p);
    assert!(fe_null.pseudo_r2.unwrap() > 0.0);
    assert_eq!(ppml_fit(&t.frame, &spec).unwrap().pseudo_r2, Some(p));

    // Saturated: one indicator per observation of positive data.
    let y = vec![1.0, 2.0, 5.0, 3.0, 7.0, 4.0];
    let frame = Frame::new()
        .with_num("y", y.clone())
        .unwrap()
        .with_num("id", (0..6).map(|i| (i / 2) as f64).collect())
        .unwrap();
    let sat = ppml_fit(&frame, &EstimationSpec::new(Estimator::Ppml, "y", &[], &["id"])).unwrap();
    let v = sat.pseudo_r2.unwrap();
    assert!(v > 0.0 && v <= 1.0);
    assert!(pseudo_r2(-3.0, 0.0).is_err());
}

#[test]
fn drops_are_reported() {
    let frame = Frame::new()
        .with_text("g", &["a", "a", "b", "b", "c", "d", "d", "d"])
        .unwrap()
        .with_num("x", vec![0.1, 0.5, 0.3, 0.9, 0.2, f64::NAN, 0.4, 0.8])
        .unwrap()
        .with_num("y", vec![1.0, 2.0, 0.0, 0.0, 3.0, 1.0, 0.0, 4.0])
        .unwrap();
    let spec = EstimationSpec::new(Estimator::Ppml, "y", &["x"], &["g"]);
    let r = ppml_fit(&frame, &spec).unwrap();
    assert_eq!(r.dropped.missing, 1);
    assert_eq!(r.dropped.all_zero_groups, 2);
    assert_eq!(r.dropped.singletons, 1);
    assert_eq!(r.nobs + r.dropped.total(), r.input_rows);
    assert_eq!(r.sample_rows, [0, 1, 6, 7]);
}

#[test]
fn failures() {
    let t = toy(30, 4, 8);
    let spec = EstimationSpec::new(Estimator::Ppml, "y", &["x1"], &["firm"]);
    let one = t.frame.clone().with_num("one", vec![1.0; t.frame.nrows()]).unwrap();
    assert!(matches!(ppml_fit(&one, &spec.clone().clustered("one")), Err(EconError::SingleCluster(1))));
    assert!(matches!(
        ppml_fit(
            &t.frame,
            &EstimationSpec {
                max_iterations: 1,
                ..spec.clone()
            }
        ),
        Err(EconError::NonConvergence { .. })
    ));
    let firm_level = EstimationSpec::new(Estimator::Ppml, "y", &["fx"], &["firm"]);
    let fx: Vec<f64> = (0..t.frame.nrows()).map(|i| (i / 4) as f64).collect();
    let f = t.frame.clone().with_num("fx", fx).unwrap();
    assert!(matches!(ppml_fit(&f, &firm_level), Err(EconError::Collinear(_))));
    assert!(matches!(
        ppml_fit(&f, &EstimationSpec { absorption: Absorption::Dummies, ..firm_level }),
        Err(EconError::Collinear(_))
    ));

    // x = 1 only where y = 0.
    let sep = Frame::new()
        .with_num("y", vec![0.0, 0.0, 1.0, 2.0, 0.0, 3.0])
        .unwrap()
        .with_num("d", vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0])
        .unwrap();
    let s = EstimationSpec::new(Estimator::Ppml, "y", &["d"], &[]);
    assert!(matches!(ppml_fit(&sep, &s), Err(EconError::Separation(_))));
    let neg = Frame::new().with_num("y", vec![1.0, -1.0]).unwrap();
    assert!(ppml_fit(&neg, &EstimationSpec::new(Estimator::Ppml, "y", &[], &[])).is_err());
    assert!(matches!(ppml_fit(&t.frame, &EstimationSpec::new(Estimator::Ppml, "nope", &[], &[])), Err(EconError::UnknownColumn(_))));
}
