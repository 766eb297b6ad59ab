//! Poisson pseudo-maximum likelihood by iteratively reweighted least
//! squares.
//!
//! Each step regresses the working response `z = η + (y - μ)/μ` on the
//! regressors with weights `μ`. Fixed effects are absorbed by demeaning
//! both sides with those weights (Frisch–Waugh), so the linear predictor
//! is recovered as `η = z - (z̃ - X̃β)` without ever forming the effects.

use nalgebra::{DMatrix, DVector};
use statrs::function::gamma::ln_gamma;

use crate::absorb::{Absorber, Groups};
use crate::error::{EconError, Result};
use crate::frame::Frame;
use crate::linalg::{check_absorbed, dummy_design, spd_inverse, spd_solve, weighted_cross, weighted_gram};
use crate::result::{pseudo_r2, EstimationResult};
use crate::sample::{separating_regressor, Sample};
use crate::spec::{Absorption, EstimationSpec, Estimator, NullModel};
use crate::vcov::{sandwich, scores};

pub fn poisson_loglik(y: &[f64], mu: &[f64]) -> f64 {
    y.iter()
        .zip(mu)
        .map(|(&y, &m)| if y == 0.0 { -m } else { y * m.ln() - m - ln_gamma(y + 1.0) })
        .sum()
}

pub fn poisson_deviance(y: &[f64], mu: &[f64]) -> f64 {
    2.0 * y
        .iter()
        .zip(mu)
        .map(|(&y, &m)| if y == 0.0 { m } else { y * (y / m).ln() - (y - m) })
        .sum::<f64>()
}

#[derive(Debug, Clone)]
pub struct IrlsFit {
    pub beta: DVector<f64>,
    pub mu: Vec<f64>,
    /// Regressors demeaned with the final weights.
    pub x_tilde: DMatrix<f64>,
    pub iterations: usize,
}

fn demean_columns(x: &DMatrix<f64>, absorber: &Absorber) -> Result<DMatrix<f64>> {
    let mut out = x.clone();
    for mut col in out.column_iter_mut() {
        absorber.demean(col.as_mut_slice())?;
    }
    Ok(out)
}

/// Converged when neither the coefficients nor the linear predictor
/// (which carries the absorbed effects) move by more than the tolerance.
pub fn irls(y: &[f64], x: &DMatrix<f64>, groups: &[Groups], spec: &EstimationSpec) -> Result<IrlsFit> {
    let n = y.len();
    let ybar = y.iter().sum::<f64>() / n as f64;
    let mut mu: Vec<f64> = y.iter().map(|&v| 0.5 * (v + ybar)).collect();
    let mut eta: Vec<f64> = mu.iter().map(|m| m.ln()).collect();
    let mut beta = DVector::from_element(x.ncols(), f64::INFINITY);
    let mut change = f64::INFINITY;

    for iter in 1..=spec.max_iterations {
        let absorber = Absorber::new(groups, mu.clone(), spec.absorb_tolerance);
        let mut z: Vec<f64> = eta.iter().zip(y).zip(&mu).map(|((e, y), m)| e + (y - m) / m).collect();
        let z_raw = z.clone();
        absorber.demean(&mut z)?;
        let xt = demean_columns(x, &absorber)?;
        let next = if x.ncols() == 0 {
            DVector::zeros(0)
        } else {
            spd_solve(&weighted_gram(&xt, &mu), &weighted_cross(&xt, &mu, &z))
                .ok_or_else(|| EconError::Collinear("weighted design".into()))?
        };
        let fitted = &xt * &next;
        let mut eta_change = 0.0f64;
        for i in 0..n {
            let e = z_raw[i] - (z[i] - fitted[i]);
            eta_change = eta_change.max((e - eta[i]).abs());
            eta[i] = e;
            mu[i] = e.exp();
        }
        if !(next.iter().all(|b| b.is_finite()) && mu.iter().all(|m| m.is_finite() && *m > 0.0)) {
            return Err(EconError::NonConvergence { iterations: iter, change });
        }
        change = next.iter().zip(beta.iter()).map(|(a, b)| (a - b).abs()).fold(eta_change, f64::max);
        beta = next;
        if change < spec.tolerance {
            let absorber = Absorber::new(groups, mu.clone(), spec.absorb_tolerance);
            let x_tilde = demean_columns(x, &absorber)?;
            return Ok(IrlsFit {
                beta,
                mu,
                x_tilde,
                iterations: iter,
            });
        }
    }
    Err(EconError::NonConvergence {
        iterations: spec.max_iterations,
        change,
    })
}

pub fn ppml_fit(frame: &Frame, spec: &EstimationSpec) -> Result<EstimationResult> {
    let spec = EstimationSpec {
        estimator: Estimator::Ppml,
        ..spec.clone()
    };
    let sample = Sample::build(frame, &spec)?;
    if let Some(name) = separating_regressor(&sample) {
        return Err(EconError::Separation(name));
    }
    let k = sample.x.ncols();
    let (fit, first) = match spec.absorption {
        Absorption::Demean => {
            let plain = Absorber::unweighted(&sample.groups, sample.len(), spec.absorb_tolerance);
            check_absorbed(&sample, &demean_columns(&sample.x, &plain)?)?;
            (irls(&sample.y, &sample.x, &sample.groups, &spec)?, 0)
        }
        Absorption::Dummies => {
            let (design, first) = dummy_design(&sample)?;
            (irls(&sample.y, &design, &[], &spec)?, first)
        }
    };
    let bread = spd_inverse(&weighted_gram(&fit.x_tilde, &fit.mu))
        .ok_or_else(|| EconError::Collinear("weighted design".into()))?;
    let resid: Vec<f64> = sample.y.iter().zip(&fit.mu).map(|(y, m)| y - m).collect();
    let full = sandwich(&bread, &scores(&fit.x_tilde, &resid), sample.clusters.as_ref())?;
    // In the dummy design the intercept is column 0 when no effects exist.
    let offset = if sample.has_intercept() && spec.absorption == Absorption::Dummies { 0 } else { first };
    let beta: Vec<f64> = (0..k).map(|j| fit.beta[offset + j]).collect();
    let vcov = full.view((offset, offset), (k, k)).into_owned();

    let ll = poisson_loglik(&sample.y, &fit.mu);
    let ll0 = match spec.null_model {
        NullModel::FixedEffects if !sample.groups.is_empty() => {
            let null = irls(&sample.y, &DMatrix::zeros(sample.len(), 0), &sample.groups, &spec)?;
            poisson_loglik(&sample.y, &null.mu)
        }
        _ => {
            let ybar = sample.y.iter().sum::<f64>() / sample.len() as f64;
            poisson_loglik(&sample.y, &vec![ybar; sample.len()])
        }
    };
    let mut result = EstimationResult::assemble(&spec, &sample, &beta, &vcov, fit.iterations, fit.mu);
    result.log_likelihood = Some(ll);
    result.null_log_likelihood = Some(ll0);
    result.pseudo_r2 = pseudo_r2(ll, ll0).ok();
    Ok(result)
}
