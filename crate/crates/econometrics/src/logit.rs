//! Binary logit on the any-deal indicator with fixed effects as explicit
//! indicator columns.

use nalgebra::{DMatrix, DVector};

use crate::error::{EconError, Result};
use crate::frame::Frame;
use crate::linalg::{dummy_design, spd_inverse, spd_solve, weighted_cross, weighted_gram};
use crate::result::{pseudo_r2, EstimationResult};
use crate::sample::Sample;
use crate::spec::{EstimationSpec, Estimator, NullModel};
use crate::vcov::{sandwich, scores};

/// Fitted probabilities this close to 0 or 1 everywhere mean the outcome
/// is perfectly predicted.
const PREDICTION_EPS: f64 = 1e-10;

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn logit_loglik(y: &[f64], eta: &[f64]) -> f64 {
    // log p = -log(1 + e^-η), log(1-p) = -log(1 + e^η)
    let softplus = |x: f64| if x > 0.0 { x + (-x).exp().ln_1p() } else { x.exp().ln_1p() };
    y.iter()
        .zip(eta)
        .map(|(&y, &e)| if y > 0.0 { -softplus(-e) } else { -softplus(e) })
        .sum()
}

pub struct NewtonFit {
    pub beta: DVector<f64>,
    pub p: Vec<f64>,
    pub eta: Vec<f64>,
    pub iterations: usize,
}

/// Newton–Raphson with step halving on the log-likelihood.
pub fn newton(y: &[f64], x: &DMatrix<f64>, tolerance: f64, max_iterations: usize) -> Result<NewtonFit> {
    let mut beta = DVector::zeros(x.ncols());
    let mut eta: Vec<f64> = vec![0.0; y.len()];
    let mut ll = logit_loglik(y, &eta);
    let mut change = f64::INFINITY;
    for iter in 1..=max_iterations {
        let p: Vec<f64> = eta.iter().map(|&e| sigmoid(e)).collect();
        let w: Vec<f64> = p.iter().map(|p| p * (1.0 - p)).collect();
        let r: Vec<f64> = y.iter().zip(&p).map(|(y, p)| y - p).collect();
        let step = spd_solve(&weighted_gram(x, &w), &weighted_cross(x, &vec![1.0; y.len()], &r))
            .ok_or(EconError::PerfectPrediction)?;
        let mut scale = 1.0;
        let (next, next_eta, next_ll) = loop {
            let cand = &beta + &step * scale;
            let ce: Vec<f64> = (x * &cand).iter().copied().collect();
            let cl = logit_loglik(y, &ce);
            if cl >= ll - 1e-12 * ll.abs() || scale < 1e-10 {
                break (cand, ce, cl);
            }
            scale *= 0.5;
        };
        change = (&next - &beta).amax();
        beta = next;
        eta = next_eta;
        ll = next_ll;
        if !change.is_finite() {
            break;
        }
        if change < tolerance {
            let p: Vec<f64> = eta.iter().map(|&e| sigmoid(e)).collect();
            if p.iter().all(|&q| !(PREDICTION_EPS..=1.0 - PREDICTION_EPS).contains(&q)) {
                return Err(EconError::PerfectPrediction);
            }
            return Ok(NewtonFit {
                beta,
                p,
                eta,
                iterations: iter,
            });
        }
    }
    if eta.iter().any(|e| e.abs() > 30.0) {
        return Err(EconError::PerfectPrediction);
    }
    Err(EconError::NonConvergence {
        iterations: max_iterations,
        change,
    })
}

/// A regressor whose values for the two outcomes do not overlap
/// predicts the outcome perfectly.
fn threshold_separation(sample: &Sample) -> bool {
    let first = usize::from(sample.has_intercept());
    (first..sample.x.ncols()).any(|j| {
        let col = sample.x.column(j);
        let range = |target: f64| {
            sample
                .y
                .iter()
                .zip(col.iter())
                .filter(|(y, _)| **y == target)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, &x)| (lo.min(x), hi.max(x)))
        };
        let (lo0, hi0) = range(0.0);
        let (lo1, hi1) = range(1.0);
        hi0 < lo1 || hi1 < lo0
    })
}

pub fn logit_fit(frame: &Frame, spec: &EstimationSpec) -> Result<EstimationResult> {
    let spec = EstimationSpec {
        estimator: Estimator::Logit,
        ..spec.clone()
    };
    let sample = Sample::build(frame, &spec)?;
    let positives = sample.y.iter().filter(|y| **y > 0.0).count();
    if positives == 0 || positives == sample.len() || threshold_separation(&sample) {
        return Err(EconError::PerfectPrediction);
    }
    let k = sample.x.ncols();
    let (design, first) = dummy_design(&sample)?;
    let fit = newton(&sample.y, &design, spec.tolerance, spec.max_iterations)?;
    let w: Vec<f64> = fit.p.iter().map(|p| p * (1.0 - p)).collect();
    let bread = spd_inverse(&weighted_gram(&design, &w)).ok_or(EconError::PerfectPrediction)?;
    let resid: Vec<f64> = sample.y.iter().zip(&fit.p).map(|(y, p)| y - p).collect();
    let full = sandwich(&bread, &scores(&design, &resid), sample.clusters.as_ref())?;
    let offset = if sample.has_intercept() { 0 } else { first };
    let beta: Vec<f64> = (0..k).map(|j| fit.beta[offset + j]).collect();
    let vcov = full.view((offset, offset), (k, k)).into_owned();

    let ll = logit_loglik(&sample.y, &fit.eta);
    let ll0 = match spec.null_model {
        NullModel::FixedEffects if !sample.groups.is_empty() => {
            let fe_only = design.columns(0, first).into_owned();
            logit_loglik(&sample.y, &newton(&sample.y, &fe_only, spec.tolerance, spec.max_iterations)?.eta)
        }
        _ => {
            let ybar = positives as f64 / sample.len() as f64;
            let n = sample.len() as f64;
            n * (ybar * ybar.ln() + (1.0 - ybar) * (1.0 - ybar).ln())
        }
    };
    let mut result = EstimationResult::assemble(&spec, &sample, &beta, &vcov, fit.iterations, fit.p);
    result.log_likelihood = Some(ll);
    result.null_log_likelihood = Some(ll0);
    result.pseudo_r2 = pseudo_r2(ll, ll0).ok();
    Ok(result)
}
