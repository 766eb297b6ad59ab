//! Comparative statics against closed-form investment oracles, plus the
//! grid-level properties of the sweep.

use holdup_core::bargain::{integrated_expected_profit, seller_expected_profit, solve_investment, Regime};
use holdup_core::primitives::{CostParams, ModelConfig, ModelPrimitives, PriceDist, ValueParams};
use holdup_core::statics::*;
use holdup_core::Execution;
use holdup_testkit::exponential::Game;
use holdup_testkit::search::bisect_decreasing;

fn canonical_at(alpha: f64, t: f64, tau: f64) -> ModelPrimitives {
    ModelPrimitives::canonical().with_alpha(alpha).unwrap().with_tariffs(t, tau).unwrap()
}

fn low_value(alpha: f64, t: f64, tau: f64) -> ModelPrimitives {
    ModelPrimitives::new(ModelConfig {
        alpha,
        t,
        tau,
        value_params: ValueParams { v0: 3.0, a1: 0.5, a2: 0.05 },
        constrained_variant: true,
        ..ModelConfig::canonical()
    })
    .unwrap()
}

/// Independent `ΔU(t, τ)` for exponential cost and price: each investment
/// solves `share · (-c'(e)) · S(c(e) - τ) = 1` by plain bisection and the
/// surpluses come from the closed forms.
struct Oracle {
    alpha: f64,
    c0: f64,
    lambda: f64,
    mean: f64,
    v: ValueParams,
}

impl Oracle {
    fn canonical(alpha: f64) -> Self {
        Self {
            alpha,
            c0: 4.0,
            lambda: 1.5,
            mean: 5.0,
            v: ValueParams { v0: 10.0, a1: 0.5, a2: 0.05 },
        }
    }

    fn cost(&self, e: f64) -> f64 {
        self.c0 * (-self.lambda * e).exp()
    }

    fn investment(&self, share: f64, tau: f64) -> f64 {
        let foc = |e: f64| {
            let c = self.cost(e);
            share * self.lambda * c * (-(c - tau).max(0.0) / self.mean).exp() - 1.0
        };
        bisect_decreasing(foc, 0.0, 6.0, 1e-14).unwrap_or(0.0)
    }

    fn delta_u(&self, t: f64, tau: f64) -> f64 {
        let g = Game {
            alpha: self.alpha,
            value: self.v.value(t),
            tau,
            mean: self.mean,
        };
        let (en, ev) = (self.investment(self.alpha, tau), self.investment(1.0, tau));
        let (cn, cv) = (self.cost(en), self.cost(ev));
        g.integrated(cv, ev) - (g.seller(cn, en) + g.buyer(cn))
    }
}

#[test]
fn fd_derivative_examples() {
    assert!((fd_derivative(|x| Ok(x * x), 3.0, 1e-4).unwrap() - 6.0).abs() < 1e-8);
    assert_eq!(fd_derivative(|_| Ok(-2.5), 0.3, 1e-4).unwrap(), 0.0);
    assert!((fd_derivative(|x| Ok(x.exp()), 0.0, 1e-4).unwrap() - 1.0).abs() < 1e-8);
    assert!(fd_derivative(|x| Ok(x), 0.0, 0.0).is_err());
    assert!(fd_derivative(|x| Ok(x), 0.0, -1e-3).is_err());
}

#[test]
fn downstream_slope_is_zero_without_the_constraint() {
    // At α = 0.3 the canonical seller does not invest at all.
    for alpha in [0.5, 0.7, 0.999] {
        for (t, tau) in [(0.0, 0.0), (1.0, 0.5), (2.0, 2.0)] {
            let p = canonical_at(alpha, t, tau);
            assert_eq!(d_en_dt(&p, INVESTMENT_STEP).unwrap(), 0.0);
            assert!(d_delta_u_dt(&p).unwrap().abs() <= 1e-6);
            assert!(delta_u_slope_t(&p, SURPLUS_STEP).unwrap().abs() <= 1e-6);
        }
    }
}

#[test]
fn binding_constraint_gives_negative_downstream_slope() {
    // On the bound c(e) = V(t), so de/dt = -V'(t) / (λ V(t)).
    for (alpha, t) in [(0.3, 0.5), (0.3, 1.0), (0.3, 1.5)] {
        let p = low_value(alpha, t, 0.5);
        let n = solve_investment(&p, Regime::NonIntegration).unwrap();
        assert!(n.constraint_binding, "alpha {alpha}, t {t}");
        let v = ValueParams { v0: 3.0, a1: 0.5, a2: 0.05 };
        let v_prime = -v.a1 - 2.0 * v.a2 * t;
        let expected_den_dt = -v_prime / (1.5 * v.value(t));
        let den_dt = d_en_dt(&p, INVESTMENT_STEP).unwrap();
        assert!((den_dt - expected_den_dt).abs() < 1e-6, "{den_dt} vs {expected_den_dt}");
        let slope = d_delta_u_dt(&p).unwrap();
        assert!(slope < 0.0);
        assert!((slope + (1.0 - alpha) / alpha * expected_den_dt).abs() < 1e-6);
        assert!(delta_u_slope_t(&p, SURPLUS_STEP).unwrap() < 0.0);
    }
}

#[test]
fn downstream_slope_shrinks_with_the_prefactor() {
    let p = low_value(0.3, 1.0, 0.5);
    let den_dt = d_en_dt(&p, INVESTMENT_STEP).unwrap();
    assert!(den_dt > 0.0);
    for alpha in [0.3, 0.9, 0.999] {
        let slope = -bargaining_prefactor(alpha) * den_dt;
        assert!(slope.abs() <= (1.0 - alpha) / alpha * den_dt * (1.0 + 1e-12));
    }
    assert!(bargaining_prefactor(0.999) * den_dt <= 1.002e-3 * den_dt);
}

#[test]
fn upstream_slope_vanishes_as_alpha_tends_to_one() {
    let p = canonical_at(1.0 - 1e-9, 1.0, 0.5);
    let n = solve_investment(&p, Regime::NonIntegration).unwrap();
    let v = solve_investment(&p, Regime::Integration).unwrap();
    assert!((n.e_star - v.e_star).abs() < 1e-6);
    assert!(d_delta_u_dtau(&p).unwrap().abs() < 1e-6);
}

#[test]
fn upstream_slope_matches_oracle_difference() {
    for alpha in [0.5, 0.7] {
        for tau in [0.0, 0.25, 0.5, 1.0] {
            let p = canonical_at(alpha, 1.0, tau);
            let analytic = d_delta_u_dtau(&p).unwrap();
            let o = Oracle::canonical(alpha);
            let h = 1e-3;
            let oracle = (o.delta_u(1.0, tau + h) - o.delta_u(1.0, tau - h)) / (2.0 * h);
            assert!(relative_gap(analytic, oracle) < 1e-4, "alpha {alpha}, tau {tau}: {analytic} vs {oracle}");
            let fd = delta_u_slope_tau(&p, SURPLUS_STEP).unwrap();
            assert!(relative_gap(analytic, fd) < 1e-4);
        }
    }
}

#[test]
fn sourcing_term_is_positive_at_canonical_point() {
    let p = ModelPrimitives::canonical();
    let n = solve_investment(&p, Regime::NonIntegration).unwrap();
    let v = solve_investment(&p, Regime::Integration).unwrap();
    let f = p.price_dist();
    let term = f.cdf(p.cost(n.e_star) - p.tau()) - f.cdf(p.cost(v.e_star) - p.tau());
    assert!(term > 0.0);
}

#[test]
fn optimal_investments_are_first_order_stationary() {
    let p = ModelPrimitives::canonical();
    let h = 1e-3;
    let v = solve_investment(&p, Regime::Integration).unwrap().e_star;
    let uv = |e| integrated_expected_profit(&p, e).unwrap();
    for e in [v - h, v + h] {
        let change = (uv(e) - uv(v)).abs();
        assert!(change < 1e-5 && change > 1e-8, "change {change}");
    }
    let n = solve_investment(&p, Regime::NonIntegration).unwrap().e_star;
    let us = |e| seller_expected_profit(&p, e).unwrap();
    for e in [n - h, n + h] {
        assert!((us(e) - us(n)).abs() < 1e-5);
    }
}

#[test]
fn halving_the_investment_step_keeps_verdicts() {
    let coarse = hypothesis_sweep(&GridSpec::default()).unwrap().summary;
    let fine_spec = GridSpec {
        steps: Steps {
            investment: 5e-5,
            ..Steps::default()
        },
        ..GridSpec::default()
    };
    let fine = hypothesis_sweep(&fine_spec).unwrap().summary;
    let r = |x: f64| (x * 1e3).round();
    for (a, b) in coarse.verdicts.iter().zip(&fine.verdicts) {
        assert_eq!(a.interior_soc_points, b.interior_soc_points);
        assert_eq!(r(a.dt_negative_fraction()), r(b.dt_negative_fraction()));
        assert_eq!(r(a.dtau_negative_fraction()), r(b.dtau_negative_fraction()));
        assert_eq!(r(a.en_tau_fraction()), r(b.en_tau_fraction()));
        assert_eq!(r(a.alpha_monotone_fraction()), r(b.alpha_monotone_fraction()));
    }
}

#[test]
fn prefactor_scales_the_downstream_slope() {
    let p = low_value(0.3, 1.0, 0.5);
    let den_dt = d_en_dt(&p, INVESTMENT_STEP).unwrap();
    let at = |alpha: f64| (bargaining_prefactor(alpha) * den_dt).abs();
    let expected = (0.7 / 0.3) / (0.3 / 0.7);
    assert!((at(0.3) / at(0.7) - expected).abs() < 1e-12);
    let summary = hypothesis_sweep(&GridSpec::default()).unwrap().summary;
    for v in &summary.verdicts {
        assert!((v.prefactor_ratio - expected).abs() < 1e-12);
    }
}

#[test]
fn canonical_sweep_properties() {
    let out = hypothesis_sweep(&GridSpec::default()).unwrap();
    assert_eq!(out.reports.len(), 2 * 3 * 9 * 9);
    for v in &out.summary.verdicts {
        assert!(v.interior_soc_points > 0);
        assert_eq!(v.ordering_violations, 0);
        assert!(v.max_gap_dt < 1e-4 && v.max_gap_dtau < 1e-4);
        assert_eq!(v.dt_zero, v.evaluable_points);
        assert!(v.dtau_negative > 0 && v.dtau_negative < v.evaluable_points);
        assert_eq!(v.en_tau_positive_import_active, v.import_active_points);
    }
    // Where imports never undercut the seller, τ leaves e^n untouched.
    for r in out.reports.iter().filter(|r| r.interior_soc() && !r.import_active) {
        assert_eq!(r.d_en_dtau_fd, Some(0.0));
    }
}

#[test]
fn constrained_sweep_binds_with_negative_slopes() {
    let spec = GridSpec {
        base: ModelConfig {
            value_params: ValueParams { v0: 3.0, a1: 0.5, a2: 0.05 },
            ..ModelConfig::canonical()
        },
        variants: vec![Variant::Constrained],
        ..GridSpec::default()
    };
    let v = &hypothesis_sweep(&spec).unwrap().summary.verdicts[0];
    assert!(v.binding_n_points > 0);
    assert_eq!(v.binding_n_negative, v.binding_n_points);
    assert_eq!(v.ordering_violations, 0);
}

#[test]
fn sequential_and_parallel_sweeps_agree() {
    let par = hypothesis_sweep(&GridSpec::default()).unwrap();
    let seq = hypothesis_sweep(&GridSpec {
        execution: Execution::Sequential,
        ..GridSpec::default()
    })
    .unwrap();
    assert_eq!(par.reports, seq.reports);
    assert_eq!(render::reports_csv(&par.reports), render::reports_csv(&seq.reports));
}

#[test]
fn grid_spec_json() {
    assert_eq!(GridSpec::from_json("{}").unwrap(), GridSpec::default());
    assert!(GridSpec::from_json(r#"{"alphs": [0.5]}"#).is_err());
    let empty = GridSpec::from_json(r#"{"alphas": []}"#).unwrap();
    assert!(hypothesis_sweep(&empty).is_err());
    let backwards = GridSpec::from_json(r#"{"t": {"start": 1.0, "stop": 0.0, "step": 0.25}}"#).unwrap();
    assert!(hypothesis_sweep(&backwards).is_err());
    let quad = GridSpec {
        base: ModelConfig {
            cost_params: CostParams::Quadratic { c0: 4.0, b1: 0.5, b2: 1.0 },
            e_max: 1.5,
            price_dist: PriceDist::Exponential { mean: 5.0 },
            ..ModelConfig::canonical()
        },
        ..GridSpec::default()
    };
    let v = &hypothesis_sweep(&quad).unwrap().summary.verdicts;
    assert!(v.iter().all(|v| v.soc_failures > 0));
}
