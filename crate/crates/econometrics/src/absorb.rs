//! Fixed-effect absorption by alternating projections.
//!
//! Each sweep subtracts the weighted group means of every fixed-effect
//! dimension in turn. For one dimension a single sweep is exact; with
//! several, the sweeps converge to the projection onto the orthogonal
//! complement of the span of all group indicators.

use crate::error::{EconError, Result};

pub const ABSORB_TOLERANCE: f64 = 1e-10;
pub const MAX_SWEEPS: usize = 10_000;

/// One fixed-effect dimension: a dense group id per observation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Groups {
    pub ids: Vec<usize>,
    pub count: usize,
}

impl Groups {
    /// Renumbers arbitrary ids densely in order of first appearance.
    pub fn from_ids(raw: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let ids = raw
            .iter()
            .map(|r| {
                let next = map.len();
                *map.entry(*r).or_insert(next)
            })
            .collect();
        Self { ids, count: map.len() }
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut n = vec![0; self.count];
        for &g in &self.ids {
            n[g] += 1;
        }
        n
    }
}

#[derive(Debug, Clone)]
pub struct Absorber<'a> {
    groups: &'a [Groups],
    weights: Vec<f64>,
    totals: Vec<Vec<f64>>,
    tolerance: f64,
}

impl<'a> Absorber<'a> {
    pub fn new(groups: &'a [Groups], weights: Vec<f64>, tolerance: f64) -> Self {
        let totals = groups
            .iter()
            .map(|g| {
                let mut t = vec![0.0; g.count];
                for (&id, &w) in g.ids.iter().zip(&weights) {
                    t[id] += w;
                }
                t
            })
            .collect();
        Self {
            groups,
            weights,
            totals,
            tolerance,
        }
    }

    pub fn unweighted(groups: &'a [Groups], n: usize, tolerance: f64) -> Self {
        Self::new(groups, vec![1.0; n], tolerance)
    }

    /// Demeans `x` in place; returns the number of sweeps.
    pub fn demean(&self, x: &mut [f64]) -> Result<usize> {
        if self.groups.is_empty() {
            return Ok(0);
        }
        let mut sums: Vec<f64> = Vec::new();
        for sweep in 1..=MAX_SWEEPS {
            let mut largest = 0.0f64;
            for (g, totals) in self.groups.iter().zip(&self.totals) {
                sums.clear();
                sums.resize(g.count, 0.0);
                for ((&id, &w), &v) in g.ids.iter().zip(&self.weights).zip(x.iter()) {
                    sums[id] += w * v;
                }
                for (s, &t) in sums.iter_mut().zip(totals) {
                    *s = if t > 0.0 { *s / t } else { 0.0 };
                    largest = largest.max(s.abs());
                }
                for (&id, v) in g.ids.iter().zip(x.iter_mut()) {
                    *v -= sums[id];
                }
            }
            // A single dimension is exact after one pass.
            if self.groups.len() == 1 || largest <= self.tolerance {
                return Ok(sweep);
            }
        }
        Err(EconError::AbsorptionNonConvergence { iterations: MAX_SWEEPS })
    }
}
