//! Sandwich covariances.

use nalgebra::DMatrix;

use crate::absorb::Groups;
use crate::error::{EconError, Result};

/// `B M B` with `M` the outer product of the scores (`n × p`).
///
/// Clustered: scores are summed within clusters and `M` is scaled by
/// `G/(G-1)`. Unclustered: the heteroskedasticity-robust (HC0) meat.
pub fn sandwich(bread: &DMatrix<f64>, scores: &DMatrix<f64>, clusters: Option<&Groups>) -> Result<DMatrix<f64>> {
    let meat = match clusters {
        None => scores.tr_mul(scores),
        Some(g) => {
            if g.count < 2 {
                return Err(EconError::SingleCluster(g.count));
            }
            let mut sums = DMatrix::zeros(g.count, scores.ncols());
            for (i, &c) in g.ids.iter().enumerate() {
                let mut row = sums.row_mut(c);
                row += scores.row(i);
            }
            let gf = g.count as f64;
            sums.tr_mul(&sums) * (gf / (gf - 1.0))
        }
    };
    Ok(bread * meat * bread)
}

/// Rows of `x` scaled by `r`: the per-observation scores `r_i x_i`.
pub fn scores(x: &DMatrix<f64>, r: &[f64]) -> DMatrix<f64> {
    let mut s = x.clone();
    for (mut row, &ri) in s.row_iter_mut().zip(r) {
        row *= ri;
    }
    s
}
