//! Dense linear algebra on nested `Vec`s, written for clarity rather than
//! speed.

pub type Mat = Vec<Vec<f64>>;

/// `a · b` by the textbook triple loop, summing over `k` in order from zero.
pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (n, m) = (a.len(), b.first().map_or(0, Vec::len));
    let inner = b.len();
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        assert_eq!(a[i].len(), inner);
        for j in 0..m {
            let mut acc = 0.0;
            for k in 0..inner {
                acc += a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

pub fn transpose(a: &Mat) -> Mat {
    let m = a.first().map_or(0, Vec::len);
    (0..m).map(|j| a.iter().map(|row| row[j]).collect()).collect()
}

/// Gauss-Jordan inverse with partial pivoting; `None` if singular.
pub fn inverse(a: &Mat) -> Option<Mat> {
    let n = a.len();
    let mut aug: Mat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| aug[x][col].abs().total_cmp(&aug[y][col].abs()))?;
        if aug[pivot][col].abs() < 1e-300 {
            return None;
        }
        aug.swap(col, pivot);
        let p = aug[col][col];
        for v in aug[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = aug[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        aug[r][c] -= f * aug[col][c];
                    }
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `a x = b` through the explicit inverse.
pub fn solve(a: &Mat, b: &[f64]) -> Option<Vec<f64>> {
    let inv = inverse(a)?;
    Some(inv.iter().map(|row| row.iter().zip(b).map(|(x, y)| x * y).sum()).collect())
}
