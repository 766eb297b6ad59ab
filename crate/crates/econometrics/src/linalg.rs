use nalgebra::{DMatrix, DVector};

use crate::error::{EconError, Result};
use crate::sample::Sample;

/// Relative pivot below which a column counts as a combination of the
/// columns before it.
pub const COLLINEAR_TOL: f64 = 1e-9;

/// `X' diag(w) X`.
pub fn weighted_gram(x: &DMatrix<f64>, w: &[f64]) -> DMatrix<f64> {
    let mut wx = x.clone();
    for (mut row, &wi) in wx.row_iter_mut().zip(w) {
        row *= wi;
    }
    x.tr_mul(&wx)
}

/// `X' diag(w) z`.
pub fn weighted_cross(x: &DMatrix<f64>, w: &[f64], z: &[f64]) -> DVector<f64> {
    let wz = DVector::from_iterator(z.len(), z.iter().zip(w).map(|(a, b)| a * b));
    x.tr_mul(&wz)
}

/// Greedy left-to-right Cholesky on a Gram matrix: a column is kept when
/// its pivot, relative to `reference[j]`, exceeds [`COLLINEAR_TOL`].
pub fn independent_columns(gram: &DMatrix<f64>, reference: &[f64]) -> Vec<bool> {
    let p = gram.nrows();
    let mut kept: Vec<usize> = Vec::new();
    // Rows of the lower factor for the kept columns.
    let mut l: Vec<Vec<f64>> = Vec::new();
    let mut out = vec![false; p];
    for j in 0..p {
        let mut v = Vec::with_capacity(kept.len());
        for (a, &ka) in kept.iter().enumerate() {
            let s: f64 = (0..a).map(|b| l[a][b] * v[b]).sum();
            v.push((gram[(ka, j)] - s) / l[a][a]);
        }
        let pivot = gram[(j, j)] - v.iter().map(|x| x * x).sum::<f64>();
        if reference[j] > 0.0 && pivot > COLLINEAR_TOL * reference[j] {
            v.push(pivot.sqrt());
            l.push(v);
            kept.push(j);
            out[j] = true;
        }
    }
    out
}

pub fn spd_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    m.clone().cholesky().map(|c| c.inverse())
}

pub fn spd_solve(m: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    m.clone().cholesky().map(|c| c.solve(b))
}

/// Errors when any regressor column (all columns from `first_regressor`
/// on) is dropped by the screen.
pub fn require_regressors(keep: &[bool], first_regressor: usize, names: &[String]) -> Result<()> {
    match keep[first_regressor..].iter().position(|k| !k) {
        Some(j) => Err(EconError::Collinear(names[j].clone())),
        None => Ok(()),
    }
}

/// Intercept, one indicator per level of every fixed effect, then the
/// sample's own regressors; redundant indicators are removed. Returns the
/// design and the column where the regressors start.
pub fn dummy_design(sample: &Sample) -> Result<(DMatrix<f64>, usize)> {
    let n = sample.len();
    let regs: Vec<usize> = (usize::from(sample.has_intercept())..sample.x.ncols()).collect();
    let fe_cols: usize = sample.groups.iter().map(|g| g.count).sum();
    let p = 1 + fe_cols + regs.len();
    let mut d = DMatrix::zeros(n, p);
    d.column_mut(0).fill(1.0);
    let mut offset = 1;
    for g in &sample.groups {
        for (i, &id) in g.ids.iter().enumerate() {
            d[(i, offset + id)] = 1.0;
        }
        offset += g.count;
    }
    for (k, &j) in regs.iter().enumerate() {
        d.set_column(offset + k, &sample.x.column(j));
    }
    let gram = weighted_gram(&d, &vec![1.0; n]);
    let diag: Vec<f64> = gram.diagonal().iter().copied().collect();
    let keep = independent_columns(&gram, &diag);
    let names: Vec<String> = regs.iter().map(|&j| sample.names[j].clone()).collect();
    if let Some(k) = keep[offset..].iter().position(|k| !k) {
        return Err(EconError::Collinear(names[k].clone()));
    }
    let cols: Vec<usize> = (0..p).filter(|&j| keep[j]).collect();
    let first = cols.iter().position(|&j| j == offset).unwrap_or(cols.len());
    Ok((d.select_columns(&cols), first))
}

/// Absorbed-design screen: regressors whose demeaned Gram pivots vanish
/// relative to their raw sums of squares are collinear with the fixed
/// effects or with each other.
pub fn check_absorbed(sample: &Sample, demeaned: &DMatrix<f64>) -> Result<()> {
    let gram = weighted_gram(demeaned, &vec![1.0; demeaned.nrows()]);
    let reference: Vec<f64> = sample.x.column_iter().map(|c| c.norm_squared()).collect();
    let keep = independent_columns(&gram, &reference);
    require_regressors(&keep, 0, &sample.names)
}
