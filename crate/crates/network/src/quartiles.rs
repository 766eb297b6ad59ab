//! Upstreamness quartiles across industries.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{NetworkError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Quartile {
    Q1,
    Q2,
    Q3,
    Q4,
}

impl Quartile {
    pub fn label(self) -> &'static str {
        match self {
            Quartile::Q1 => "Q1",
            Quartile::Q2 => "Q2",
            Quartile::Q3 => "Q3",
            Quartile::Q4 => "Q4",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub assignment: BTreeMap<String, Quartile>,
    /// 25th, 50th and 75th nearest-rank percentiles.
    pub cuts: [f64; 3],
    /// Some quartile is empty because of ties.
    pub degenerate: bool,
}

/// Nearest-rank percentile of sorted data, `p` in `(0, 100]`.
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    let rank = ((p / 100.0) * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

/// Values on a cut point go to the lower quartile.
pub fn upstream_quartiles(ups: &BTreeMap<String, f64>) -> Result<Quartiles> {
    if ups.len() < 4 {
        return Err(NetworkError::TooFewIndustries(ups.len()));
    }
    let mut sorted: Vec<f64> = ups.values().copied().collect();
    sorted.sort_by(f64::total_cmp);
    let cuts = [25.0, 50.0, 75.0].map(|p| nearest_rank(&sorted, p));
    let assignment: BTreeMap<String, Quartile> = ups
        .iter()
        .map(|(code, &u)| {
            let q = if u <= cuts[0] {
                Quartile::Q1
            } else if u <= cuts[1] {
                Quartile::Q2
            } else if u <= cuts[2] {
                Quartile::Q3
            } else {
                Quartile::Q4
            };
            (code.clone(), q)
        })
        .collect();
    let used: std::collections::BTreeSet<Quartile> = assignment.values().copied().collect();
    Ok(Quartiles {
        assignment,
        cuts,
        degenerate: used.len() < 4,
    })
}
