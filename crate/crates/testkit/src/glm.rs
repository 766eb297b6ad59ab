//! Reference regressions on explicit designs: Newton–Raphson for the
//! Poisson likelihood and normal equations for least squares.

use crate::linalg::{solve, Mat};

/// Intercept plus one indicator per level of every factor (levels are
/// dense ids), then `extra` columns; linearly dependent columns are
/// removed by modified Gram–Schmidt, left to right. Returns row-major
/// design and the kept original column indices.
pub fn dummy_design(factors: &[Vec<usize>], extra: &[Vec<f64>]) -> (Mat, Vec<usize>) {
    let n = extra.first().map(Vec::len).or(factors.first().map(Vec::len)).unwrap_or(0);
    let mut cols: Vec<Vec<f64>> = vec![vec![1.0; n]];
    for f in factors {
        let levels = f.iter().max().map_or(0, |m| m + 1);
        for l in 0..levels {
            cols.push(f.iter().map(|&g| if g == l { 1.0 } else { 0.0 }).collect());
        }
    }
    cols.extend(extra.iter().cloned());

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut kept = Vec::new();
    for (j, c) in cols.iter().enumerate() {
        let norm0 = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut r = c.clone();
        for q in &basis {
            let d: f64 = q.iter().zip(&r).map(|(a, b)| a * b).sum();
            r.iter_mut().zip(q).for_each(|(v, qv)| *v -= d * qv);
        }
        let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm0 > 0.0 && norm > 1e-8 * norm0 {
            basis.push(r.iter().map(|v| v / norm).collect());
            kept.push(j);
        }
    }
    let design = (0..n).map(|i| kept.iter().map(|&j| cols[j][i]).collect()).collect();
    (design, kept)
}

fn xtwx(x: &Mat, w: &[f64]) -> Mat {
    let p = x.first().map_or(0, Vec::len);
    let mut out = vec![vec![0.0; p]; p];
    for (row, &wi) in x.iter().zip(w) {
        for a in 0..p {
            let ra = row[a] * wi;
            if ra == 0.0 {
                continue;
            }
            for b in 0..p {
                out[a][b] += ra * row[b];
            }
        }
    }
    out
}

fn xtv(x: &Mat, v: &[f64]) -> Vec<f64> {
    let p = x.first().map_or(0, Vec::len);
    let mut out = vec![0.0; p];
    for (row, &vi) in x.iter().zip(v) {
        for a in 0..p {
            out[a] += row[a] * vi;
        }
    }
    out
}

fn loglik(x: &Mat, y: &[f64], beta: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(row, &yi)| {
            let eta: f64 = row.iter().zip(beta).map(|(a, b)| a * b).sum();
            yi * eta - eta.exp()
        })
        .sum()
}

/// Maximizes `Σ y·η - e^η` by Newton steps with halving; the first column
/// must be the intercept.
pub fn poisson_newton(x: &Mat, y: &[f64]) -> Vec<f64> {
    let p = x[0].len();
    let ybar = y.iter().sum::<f64>() / y.len() as f64;
    let mut beta = vec![0.0; p];
    beta[0] = ybar.ln();
    let mut ll = loglik(x, y, &beta);
    for _ in 0..200 {
        let mu: Vec<f64> = x.iter().map(|row| row.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>().exp()).collect();
        let g = xtv(x, &y.iter().zip(&mu).map(|(a, b)| a - b).collect::<Vec<_>>());
        let step = solve(&xtwx(x, &mu), &g).expect("full-rank design");
        let mut t = 1.0;
        loop {
            let cand: Vec<f64> = beta.iter().zip(&step).map(|(b, s)| b + t * s).collect();
            let cl = loglik(x, y, &cand);
            if cl >= ll || t < 1e-8 {
                beta = cand;
                ll = cl;
                break;
            }
            t *= 0.5;
        }
        if step.iter().map(|s| s.abs()).fold(0.0, f64::max) < 1e-13 {
            break;
        }
    }
    beta
}

pub fn least_squares(x: &Mat, y: &[f64]) -> Vec<f64> {
    solve(&xtwx(x, &vec![1.0; y.len()]), &xtv(x, y)).expect("full-rank design")
}
