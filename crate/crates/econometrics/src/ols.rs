//! Linear fixed-effects regression by the within transformation.

use nalgebra::DVector;

use crate::absorb::Absorber;
use crate::error::{EconError, Result};
use crate::frame::Frame;
use crate::linalg::{check_absorbed, dummy_design, spd_inverse, weighted_cross};
use crate::result::EstimationResult;
use crate::sample::Sample;
use crate::spec::{Absorption, EstimationSpec, Estimator};
use crate::vcov::{sandwich, scores};

pub fn ols_fit(frame: &Frame, spec: &EstimationSpec) -> Result<EstimationResult> {
    let spec = EstimationSpec {
        estimator: Estimator::Ols,
        ..spec.clone()
    };
    let sample = Sample::build(frame, &spec)?;
    let n = sample.len();
    let k = sample.x.ncols();
    let ones = vec![1.0; n];
    let (xt, yt, offset) = match spec.absorption {
        Absorption::Demean => {
            let absorber = Absorber::unweighted(&sample.groups, n, spec.absorb_tolerance);
            let mut xt = sample.x.clone();
            for mut col in xt.column_iter_mut() {
                absorber.demean(col.as_mut_slice())?;
            }
            check_absorbed(&sample, &xt)?;
            let mut yt = sample.y.clone();
            absorber.demean(&mut yt)?;
            (xt, yt, 0)
        }
        Absorption::Dummies => {
            let (design, first) = dummy_design(&sample)?;
            let offset = if sample.has_intercept() { 0 } else { first };
            (design, sample.y.clone(), offset)
        }
    };
    let bread = spd_inverse(&xt.tr_mul(&xt)).ok_or_else(|| EconError::Collinear("design".into()))?;
    let beta: DVector<f64> = &bread * weighted_cross(&xt, &ones, &yt);
    let fitted = &xt * &beta;
    let resid: Vec<f64> = yt.iter().zip(fitted.iter()).map(|(y, f)| y - f).collect();
    let full = sandwich(&bread, &scores(&xt, &resid), sample.clusters.as_ref())?;
    let est: Vec<f64> = (0..k).map(|j| beta[offset + j]).collect();
    let vcov = full.view((offset, offset), (k, k)).into_owned();

    let fitted_levels: Vec<f64> = sample.y.iter().zip(&resid).map(|(y, e)| y - e).collect();
    let mut result = EstimationResult::assemble(&spec, &sample, &est, &vcov, 1, fitted_levels);
    // Within R-squared: variation left after the fixed effects.
    let within = {
        let absorber = Absorber::unweighted(&sample.groups, n, spec.absorb_tolerance);
        let mut yt = sample.y.clone();
        absorber.demean(&mut yt)?;
        if sample.groups.is_empty() {
            let m = yt.iter().sum::<f64>() / n as f64;
            yt.iter_mut().for_each(|v| *v -= m);
        }
        yt.iter().map(|v| v * v).sum::<f64>()
    };
    let ssr: f64 = resid.iter().map(|e| e * e).sum();
    result.r2 = (within > 0.0).then(|| 1.0 - ssr / within);
    Ok(result)
}
