//! Estimation samples: missing-value and fixed-effect group drops.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::absorb::Groups;
use crate::error::{EconError, Result};
use crate::frame::Frame;
use crate::spec::{EstimationSpec, Estimator};

pub const INTERCEPT: &str = "const";

/// Observations removed before fitting, by reason.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dropped {
    pub missing: usize,
    pub singletons: usize,
    /// Rows in a fixed-effect group whose outcomes are all zero.
    pub all_zero_groups: usize,
    /// Logit only: rows in groups whose outcomes are all one.
    pub all_one_groups: usize,
}

impl Dropped {
    pub fn total(&self) -> usize {
        self.missing + self.singletons + self.all_zero_groups + self.all_one_groups
    }
}

#[derive(Debug, Clone)]
pub struct Sample {
    /// Frame row of each observation.
    pub rows: Vec<usize>,
    pub y: Vec<f64>,
    /// Regressors, with a leading intercept when there are no fixed effects.
    pub x: DMatrix<f64>,
    pub names: Vec<String>,
    pub groups: Vec<Groups>,
    pub clusters: Option<Groups>,
    pub dropped: Dropped,
    pub input_rows: usize,
}

impl Sample {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn has_intercept(&self) -> bool {
        self.names.first().is_some_and(|n| n == INTERCEPT)
    }

    pub fn build(frame: &Frame, spec: &EstimationSpec) -> Result<Self> {
        spec.validate()?;
        let n = frame.nrows();
        let y_raw = frame.num(&spec.outcome)?;
        let xs: Vec<&[f64]> = spec.regressors.iter().map(|r| frame.num(r)).collect::<Result<_>>()?;
        let fe: Vec<Vec<Option<usize>>> = spec.fixed_effects.iter().map(|f| frame.levels(f)).collect::<Result<_>>()?;
        let cl = spec.cluster.as_deref().map(|c| frame.levels(c)).transpose()?;

        let mut dropped = Dropped::default();
        let mut keep: Vec<bool> = (0..n)
            .map(|i| {
                y_raw[i].is_finite()
                    && xs.iter().all(|x| x[i].is_finite())
                    && fe.iter().all(|f| f[i].is_some())
                    && cl.as_ref().map_or(true, |c| c[i].is_some())
            })
            .collect();
        dropped.missing = keep.iter().filter(|k| !**k).count();

        let mut y: Vec<f64> = y_raw.to_vec();
        match spec.estimator {
            Estimator::Ols => {}
            Estimator::Ppml | Estimator::Logit => {
                if let Some(i) = (0..n).find(|&i| keep[i] && y[i] < 0.0) {
                    return Err(EconError::BadColumn {
                        column: spec.outcome.clone(),
                        reason: format!("negative outcome {} in row {}", y[i], i + 1),
                    });
                }
                if spec.estimator == Estimator::Logit {
                    for v in &mut y {
                        *v = if *v > 0.0 { 1.0 } else { 0.0 };
                    }
                }
            }
        }

        drop_groups(&fe, &y, &mut keep, &mut dropped, spec.estimator);

        let rows: Vec<usize> = (0..n).filter(|&i| keep[i]).collect();
        if rows.is_empty() {
            return Err(EconError::NoObservations {
                dropped: dropped.total(),
            });
        }
        let mut names = Vec::new();
        let mut columns: Vec<Vec<f64>> = Vec::new();
        if fe.is_empty() {
            names.push(INTERCEPT.to_string());
            columns.push(vec![1.0; rows.len()]);
        }
        for (name, x) in spec.regressors.iter().zip(&xs) {
            names.push(name.clone());
            columns.push(rows.iter().map(|&i| x[i]).collect());
        }
        let x = DMatrix::from_fn(rows.len(), columns.len(), |i, j| columns[j][i]);
        let groups = fe
            .iter()
            .map(|f| Groups::from_ids(&rows.iter().map(|&i| f[i].expect("kept")).collect::<Vec<_>>()))
            .collect();
        let clusters = cl.map(|c| Groups::from_ids(&rows.iter().map(|&i| c[i].expect("kept")).collect::<Vec<_>>()));
        Ok(Self {
            y: rows.iter().map(|&i| y[i]).collect(),
            rows,
            x,
            names,
            groups,
            clusters,
            dropped,
            input_rows: n,
        })
    }
}

/// Repeatedly removes singleton groups (all estimators), all-zero groups
/// (PPML, logit) and all-one groups (logit) until nothing changes.
fn drop_groups(fe: &[Vec<Option<usize>>], y: &[f64], keep: &mut [bool], dropped: &mut Dropped, est: Estimator) {
    loop {
        let mut changed = false;
        for f in fe {
            let levels = f.iter().flatten().max().map_or(0, |m| m + 1);
            let mut count = vec![0usize; levels];
            let mut positive = vec![0usize; levels];
            for i in (0..y.len()).filter(|&i| keep[i]) {
                let g = f[i].expect("kept rows have levels");
                count[g] += 1;
                positive[g] += usize::from(y[i] > 0.0);
            }
            for i in 0..y.len() {
                if !keep[i] {
                    continue;
                }
                let g = f[i].expect("kept rows have levels");
                let reason = if count[g] == 1 {
                    &mut dropped.singletons
                } else if est != Estimator::Ols && positive[g] == 0 {
                    &mut dropped.all_zero_groups
                } else if est == Estimator::Logit && positive[g] == count[g] {
                    &mut dropped.all_one_groups
                } else {
                    continue;
                };
                *reason += 1;
                keep[i] = false;
                changed = true;
            }
        }
        if !changed {
            return;
        }
    }
}

/// A regressor that is constant over positive outcomes and lies weakly on
/// one side of that constant (strictly for some row) over zero outcomes
/// lets the likelihood increase without bound.
pub fn separating_regressor(sample: &Sample) -> Option<String> {
    let first = usize::from(sample.has_intercept());
    (first..sample.x.ncols()).find_map(|j| {
        let col = sample.x.column(j);
        let mut pos = sample.y.iter().zip(col.iter()).filter(|(y, _)| **y > 0.0).map(|(_, x)| *x);
        let c = pos.next()?;
        if pos.any(|x| x != c) {
            return None;
        }
        let zeros: Vec<f64> = sample.y.iter().zip(col.iter()).filter(|(y, _)| **y == 0.0).map(|(_, x)| *x).collect();
        let above = zeros.iter().all(|&x| x >= c) && zeros.iter().any(|&x| x > c);
        let below = zeros.iter().all(|&x| x <= c) && zeros.iter().any(|&x| x < c);
        (above || below).then(|| sample.names[j].clone())
    })
}
