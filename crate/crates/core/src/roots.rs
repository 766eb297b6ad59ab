//! Bracketing root search: a uniform sign scan followed by bisection.

/// Bisects a sign change of `f` on `[lo, hi]` down to adjacent floats.
///
/// `f_lo` is `f(lo)`; the caller guarantees `f(lo)` and `f(hi)` have opposite
/// signs (or one of them is zero).
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    if f_lo == 0.0 {
        return lo;
    }
    let lo_negative = f_lo < 0.0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// A located root together with the direction `f` crosses zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub x: f64,
    /// True when `f` goes from positive to negative.
    pub descending: bool,
}

/// Scans `[lo, hi]` on `intervals` uniform subintervals and bisects every
/// sign change.
pub fn find_crossings<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, intervals: usize) -> Vec<Crossing> {
    let intervals = intervals.max(1);
    let step = (hi - lo) / intervals as f64;
    let nodes: Vec<f64> = (0..=intervals)
        .map(|i| if i == intervals { hi } else { lo + step * i as f64 })
        .collect();
    let values: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
    let mut out: Vec<Crossing> = Vec::new();
    for i in 0..intervals {
        let (a, b) = (nodes[i], nodes[i + 1]);
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 {
            // a node root; direction from its neighbours
            let before = if i == 0 { fa } else { values[i - 1] };
            if i > 0 && out.last().map_or(true, |c| c.x != a) {
                out.push(Crossing {
                    x: a,
                    descending: before > 0.0 || (before == 0.0 && fb < 0.0),
                });
            }
            continue;
        }
        if fb != 0.0 && (fa < 0.0) != (fb < 0.0) {
            out.push(Crossing {
                x: bisect(&f, a, b, fa),
                descending: fa > 0.0,
            });
        }
    }
    out
}
