//! Brute-force maximization and root finding.

/// Argmax of `f` on the grid `lo, lo + step, ..., hi`.
pub fn grid_argmax<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, step: f64) -> f64 {
    let n = ((hi - lo) / step).round() as usize;
    let mut best = (lo, f(lo));
    for i in 1..=n {
        let x = (lo + step * i as f64).min(hi);
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best.0
}

/// Plain bisection for a decreasing function; `None` when `f` does not
/// change sign on `[lo, hi]`.
pub fn bisect_decreasing<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    if f(lo) < 0.0 || f(hi) > 0.0 {
        return None;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Nearest-rank percentile of unsorted data, `p` in `(0, 100]`.
pub fn nearest_rank(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((p / 100.0) * v.len() as f64).ceil().max(1.0) as usize;
    v[rank - 1]
}
