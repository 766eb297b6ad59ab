//! Synthetic firm-year panels with a planted tariff coefficient.
//!
//! Industry tariffs are persistent (industry level plus trend plus AR(1)
//! shocks) and decline on average over time; the panel mean is rescaled to
//! the configured target. Counts are Poisson with log-mean
//! `α + β·tariff + γ_up·upstream + Γ'(X - E X) + δ_f + δ_i + δ_t`, where `α`
//! sets the sample mean of the expected counts to `baseline_mean`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use holdup_network::Quartile;
use holdup_tariff::{FirmYearPanel, PanelRow};

use crate::error::{EconError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSpec {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub coefficient: f64,
    /// Share of the variance that moves within a firm over time.
    #[serde(default = "default_within")]
    pub within_share: f64,
    #[serde(default)]
    pub lower: Option<f64>,
    #[serde(default)]
    pub upper: Option<f64>,
}

fn default_within() -> f64 {
    0.3
}

impl ControlSpec {
    fn new(name: &str, mean: f64, sd: f64, coefficient: f64, bounds: (Option<f64>, Option<f64>)) -> Self {
        Self {
            name: name.into(),
            mean,
            sd,
            coefficient,
            within_share: default_within(),
            lower: bounds.0,
            upper: bounds.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub firms: usize,
    pub industries: usize,
    pub years: usize,
    pub first_year: i32,
    pub beta: f64,
    pub upstream_beta: f64,
    pub tariff_mean: f64,
    /// Dispersion of industry tariff levels.
    pub tariff_sd: f64,
    /// Mean yearly change; negative for liberalization.
    pub tariff_trend: f64,
    pub tariff_trend_sd: f64,
    pub tariff_persistence: f64,
    pub tariff_shock_sd: f64,
    pub upstream_mean: f64,
    pub upstream_sd: f64,
    pub firm_fe_sd: f64,
    pub industry_fe_sd: f64,
    pub year_fe_sd: f64,
    /// Mean expected backward count.
    pub baseline_mean: f64,
    /// Forward and horizontal counts relative to backward, without any
    /// tariff effect.
    pub forward_ratio: f64,
    pub horizontal_ratio: f64,
    pub soe_share: f64,
    pub high_tech_share: f64,
    pub controls: Vec<ControlSpec>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        let unit = (Some(0.0), Some(1.0));
        Self {
            firms: 1000,
            industries: 40,
            years: 5,
            first_year: 2005,
            beta: -0.044,
            upstream_beta: 0.0,
            tariff_mean: 9.502,
            tariff_sd: 5.5,
            tariff_trend: -0.6,
            tariff_trend_sd: 0.5,
            tariff_persistence: 0.7,
            tariff_shock_sd: 2.0,
            upstream_mean: 6.0,
            upstream_sd: 3.0,
            firm_fe_sd: 0.6,
            industry_fe_sd: 0.3,
            year_fe_sd: 0.15,
            baseline_mean: 0.4,
            forward_ratio: 0.5,
            horizontal_ratio: 0.3,
            soe_share: 0.287,
            high_tech_share: 0.188,
            controls: vec![
                ControlSpec::new("age", 2.445, 0.756, 0.3, (Some(0.0), None)),
                ControlSpec::new("size", 14.04, 1.367, 0.1, (None, None)),
                ControlSpec::new("skill", 11.74, 1.327, 0.1, (None, None)),
                ControlSpec::new("leverage", 0.350, 0.131, -0.5, unit),
                ControlSpec::new("liquidity", 1.041, 0.430, 0.0, (Some(0.0), None)),
                ControlSpec::new("hhi", 0.196, 0.193, -0.3, unit),
            ],
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(EconError::Config(m));
        if self.firms < 2 || self.industries == 0 || self.years < 2 {
            return bad(format!(
                "need at least 2 firms, 1 industry and 2 years (got {}, {}, {})",
                self.firms, self.industries, self.years
            ));
        }
        if self.industries > 900 {
            return bad("at most 900 industries fit the four-digit codes".into());
        }
        let sds = [
            self.tariff_sd,
            self.tariff_trend_sd,
            self.tariff_shock_sd,
            self.upstream_sd,
            self.firm_fe_sd,
            self.industry_fe_sd,
            self.year_fe_sd,
        ];
        if sds.iter().any(|s| !(*s >= 0.0 && s.is_finite())) || self.controls.iter().any(|c| !(c.sd >= 0.0)) {
            return bad("standard deviations must be finite and nonnegative".into());
        }
        if !(self.tariff_persistence.abs() < 1.0) {
            return bad("tariff persistence must lie in (-1, 1)".into());
        }
        if !(self.baseline_mean > 0.0 && self.tariff_mean > 0.0) {
            return bad("baseline and tariff means must be positive".into());
        }
        for share in [self.soe_share, self.high_tech_share] {
            if !(0.0..=1.0).contains(&share) {
                return bad(format!("share {share} outside [0, 1]"));
            }
        }
        if self.controls.iter().any(|c| !(0.0..=1.0).contains(&c.within_share)) {
            return bad("within_share outside [0, 1]".into());
        }
        if !(self.forward_ratio >= 0.0 && self.horizontal_ratio >= 0.0) {
            return bad("count ratios must be nonnegative".into());
        }
        Ok(())
    }

    pub fn industry_code(i: usize) -> String {
        format!("{:04}", 1000 + 10 * i)
    }
}

fn normal(sd: f64) -> Normal<f64> {
    Normal::new(0.0, sd).expect("validated sd")
}

/// Persistent industry paths over `years + 1` periods (the first is the
/// lag year), floored at zero.
fn industry_paths<R: Rng>(rng: &mut R, cfg: &SynthConfig, mean: f64, sd: f64) -> Vec<Vec<f64>> {
    let periods = cfg.years + 1;
    let centre = (periods as f64 - 1.0) / 2.0;
    let rho = cfg.tariff_persistence;
    let stationary = cfg.tariff_shock_sd / (1.0 - rho * rho).sqrt();
    (0..cfg.industries)
        .map(|_| {
            let level = mean + normal(sd).sample(rng);
            let trend = cfg.tariff_trend + normal(cfg.tariff_trend_sd).sample(rng);
            let mut u = normal(stationary).sample(rng);
            (0..periods)
                .map(|t| {
                    if t > 0 {
                        u = rho * u + normal(cfg.tariff_shock_sd).sample(rng);
                    }
                    (level + trend * (t as f64 - centre) + u).max(0.0)
                })
                .collect()
        })
        .collect()
}

/// Scales all periods so the firm-year mean over the sample years equals
/// `target`.
fn rescale(paths: &mut [Vec<f64>], firm_industry: &[usize], target: f64) {
    let years = paths.first().map_or(0, |p| p.len() - 1);
    let total: f64 = firm_industry.iter().map(|&i| paths[i][1..].iter().sum::<f64>()).sum();
    let mean = total / (firm_industry.len() * years) as f64;
    if mean > 0.0 {
        let s = target / mean;
        paths.iter_mut().flatten().for_each(|v| *v *= s);
    }
}

pub fn synth_dgp(config: &SynthConfig, seed: u64) -> Result<FirmYearPanel> {
    synth_with_rng(config, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn synth_with_rng<R: Rng>(cfg: &SynthConfig, rng: &mut R) -> Result<FirmYearPanel> {
    cfg.validate()?;
    let mut tariffs = industry_paths(rng, cfg, cfg.tariff_mean, cfg.tariff_sd);
    let mut upstream = industry_paths(rng, cfg, cfg.upstream_mean, cfg.upstream_sd);
    let industry_fe: Vec<f64> = (0..cfg.industries).map(|_| normal(cfg.industry_fe_sd).sample(rng)).collect();
    let year_fe: Vec<f64> = (0..cfg.years).map(|_| normal(cfg.year_fe_sd).sample(rng)).collect();

    struct Firm {
        industry: usize,
        fe: f64,
        soe: bool,
        high_tech: bool,
        controls: Vec<f64>,
    }
    let soe = Bernoulli::new(cfg.soe_share).expect("validated share");
    let tech = Bernoulli::new(cfg.high_tech_share).expect("validated share");
    let firms: Vec<Firm> = (0..cfg.firms)
        .map(|_| Firm {
            industry: rng.random_range(0..cfg.industries),
            fe: normal(cfg.firm_fe_sd).sample(rng),
            soe: soe.sample(rng),
            high_tech: tech.sample(rng),
            controls: cfg
                .controls
                .iter()
                .map(|c| normal(c.sd * (1.0 - c.within_share).sqrt()).sample(rng))
                .collect(),
        })
        .collect();
    let firm_industry: Vec<usize> = firms.iter().map(|f| f.industry).collect();
    rescale(&mut tariffs, &firm_industry, cfg.tariff_mean);
    rescale(&mut upstream, &firm_industry, cfg.upstream_mean);

    // Controls and linear index without the intercept.
    let mut rows: Vec<PanelRow> = Vec::with_capacity(cfg.firms * cfg.years);
    let mut index: Vec<f64> = Vec::with_capacity(rows.capacity());
    let mut untreated: Vec<f64> = Vec::with_capacity(rows.capacity());
    let width = cfg.firms.to_string().len();
    for (f, firm) in firms.iter().enumerate() {
        for t in 0..cfg.years {
            let i = firm.industry;
            let controls: Vec<f64> = cfg
                .controls
                .iter()
                .zip(&firm.controls)
                .map(|(c, base)| {
                    let v = c.mean + base + normal(c.sd * c.within_share.sqrt()).sample(rng);
                    v.max(c.lower.unwrap_or(f64::NEG_INFINITY)).min(c.upper.unwrap_or(f64::INFINITY))
                })
                .collect();
            let tariff = tariffs[i][t + 1];
            let up = upstream[i][t + 1];
            let base = firm.fe
                + industry_fe[i]
                + year_fe[t]
                + cfg.controls.iter().zip(&controls).map(|(c, x)| c.coefficient * (x - c.mean)).sum::<f64>();
            untreated.push(base);
            index.push(base + cfg.beta * tariff + cfg.upstream_beta * up);
            rows.push(PanelRow {
                firm_id: format!("F{:0width$}", f + 1),
                year: cfg.first_year + t as i32,
                industry_code: SynthConfig::industry_code(i),
                backward_count: 0,
                forward_count: 0,
                horizontal_count: 0,
                tariff: Some(tariff),
                upstream_tariff: Some(up),
                tariff_lag: Some(tariffs[i][t]),
                upstream_tariff_lag: Some(upstream[i][t]),
                controls,
                soe: firm.soe,
                high_tech: firm.high_tech,
                differentiated: None,
                quartile: Some([Quartile::Q1, Quartile::Q2, Quartile::Q3, Quartile::Q4][i % 4]),
            });
        }
    }
    let n = rows.len() as f64;
    let intercept = |idx: &[f64]| (cfg.baseline_mean * n / idx.iter().map(|v| v.exp()).sum::<f64>()).ln();
    let alpha = intercept(&index);
    let alpha_untreated = intercept(&untreated);
    let draw = |rng: &mut R, mean: f64| -> u32 {
        if mean <= 0.0 {
            0
        } else {
            Poisson::new(mean).expect("positive mean").sample(rng) as u32
        }
    };
    for ((row, &eta), &eta0) in rows.iter_mut().zip(&index).zip(&untreated) {
        let mu0 = (alpha_untreated + eta0).exp();
        row.backward_count = draw(rng, (alpha + eta).exp());
        row.forward_count = draw(rng, cfg.forward_ratio * mu0);
        row.horizontal_count = draw(rng, cfg.horizontal_ratio * mu0);
    }
    Ok(FirmYearPanel {
        control_names: cfg.controls.iter().map(|c| c.name.clone()).collect(),
        lag: Some(1),
        rows,
    })
}
