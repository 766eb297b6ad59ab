use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{EconError, Result};
use crate::sample::{Dropped, Sample};
use crate::spec::{EstimationSpec, Estimator};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub term: String,
    pub estimate: f64,
    pub se: f64,
    pub z: f64,
    /// Two-sided normal p-value.
    pub p: f64,
}

impl Coefficient {
    pub fn new(term: String, estimate: f64, variance: f64) -> Self {
        let se = variance.max(0.0).sqrt();
        let z = estimate / se;
        Self {
            term,
            estimate,
            se,
            z,
            p: two_sided_p(z),
        }
    }
}

pub fn two_sided_p(z: f64) -> f64 {
    if z.is_nan() {
        f64::NAN
    } else {
        erfc(z.abs() / std::f64::consts::SQRT_2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub estimator: Estimator,
    pub outcome: String,
    pub fixed_effects: Vec<String>,
    pub cluster: Option<String>,
    pub n_clusters: Option<usize>,
    pub coefficients: Vec<Coefficient>,
    pub vcov: Vec<Vec<f64>>,
    pub nobs: usize,
    pub input_rows: usize,
    pub dropped: Dropped,
    pub iterations: usize,
    pub log_likelihood: Option<f64>,
    pub null_log_likelihood: Option<f64>,
    pub pseudo_r2: Option<f64>,
    /// OLS only: within R-squared.
    pub r2: Option<f64>,
    /// Frame row of every observation used.
    #[serde(skip)]
    pub sample_rows: Vec<usize>,
    /// Fitted means (PPML), probabilities (logit) or values (OLS).
    #[serde(skip)]
    pub fitted: Vec<f64>,
}

impl EstimationResult {
    pub(crate) fn assemble(
        spec: &EstimationSpec,
        sample: &Sample,
        estimates: &[f64],
        vcov: &DMatrix<f64>,
        iterations: usize,
        fitted: Vec<f64>,
    ) -> Self {
        let coefficients = sample
            .names
            .iter()
            .zip(estimates)
            .enumerate()
            .map(|(j, (name, &b))| Coefficient::new(name.clone(), b, vcov[(j, j)]))
            .collect();
        Self {
            estimator: spec.estimator,
            outcome: spec.outcome.clone(),
            fixed_effects: spec.fixed_effects.clone(),
            cluster: spec.cluster.clone(),
            n_clusters: sample.clusters.as_ref().map(|g| g.count),
            coefficients,
            vcov: vcov.row_iter().map(|r| r.iter().copied().collect()).collect(),
            nobs: sample.len(),
            input_rows: sample.input_rows,
            dropped: sample.dropped,
            iterations,
            log_likelihood: None,
            null_log_likelihood: None,
            pseudo_r2: None,
            r2: None,
            sample_rows: sample.rows.clone(),
            fitted,
        }
    }

    pub fn coefficient(&self, term: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.term == term)
    }
}

/// `1 - L_model / L_null`.
pub fn pseudo_r2(log_likelihood: f64, null_log_likelihood: f64) -> Result<f64> {
    if null_log_likelihood == 0.0 || !null_log_likelihood.is_finite() {
        return Err(EconError::DegenerateNull);
    }
    Ok(1.0 - log_likelihood / null_log_likelihood)
}
