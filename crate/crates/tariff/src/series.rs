//! Year × key series, lags and winsorization.

use std::collections::BTreeMap;

use crate::error::{Result, TariffError};

pub type Key = (i32, String);

/// Values keyed by `(year, industry or sector)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct YearSeries {
    pub values: BTreeMap<Key, f64>,
}

impl YearSeries {
    pub fn get(&self, year: i32, key: &str) -> Option<f64> {
        self.values.get(&(year, key.to_string())).copied()
    }

    pub fn insert(&mut self, year: i32, key: impl Into<String>, value: f64) {
        self.values.insert((year, key.into()), value);
    }

    pub fn years(&self) -> Option<(i32, i32)> {
        let first = self.values.keys().next()?.0;
        let last = self.values.keys().map(|k| k.0).max()?;
        Some((first, last))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn shift(&self, k: u32, forward: bool) -> Result<Self> {
        if k == 0 {
            return Err(TariffError::ZeroLag);
        }
        let Some((first, last)) = self.years() else {
            return Ok(Self::default());
        };
        let span = last - first;
        let k = k as i32;
        if k > span {
            return Err(TariffError::LagTooLong { k: k as u32, span: span + 1 });
        }
        let values = self
            .values
            .iter()
            .filter_map(|((year, key), &v)| {
                let to = if forward { year + k } else { year - k };
                (first..=last).contains(&to).then(|| ((to, key.clone()), v))
            })
            .collect();
        Ok(Self { values })
    }
}

/// The value at `(year, key)` becomes the value at `(year - k, key)`; the
/// first `k` years drop out.
pub fn lag_series(series: &YearSeries, k: u32) -> Result<YearSeries> {
    series.shift(k, true)
}

/// Inverse of [`lag_series`] on the overlapping years.
pub fn lead_series(series: &YearSeries, k: u32) -> Result<YearSeries> {
    series.shift(k, false)
}

/// Nearest-rank percentile of sorted data, `p` in `[0, 100]`.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let rank = ((p / 100.0) * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

/// Clamps finite values to their `lo`-th and `hi`-th percentiles, leaving
/// NaNs alone. Returns the bounds used.
pub fn winsorize(values: &mut [f64], lo: f64, hi: f64) -> Result<Option<(f64, f64)>> {
    if !(0.0..=100.0).contains(&lo) || !(0.0..=100.0).contains(&hi) || lo >= hi {
        return Err(TariffError::Percentiles { lo, hi });
    }
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if sorted.is_empty() {
        return Ok(None);
    }
    sorted.sort_by(f64::total_cmp);
    let (a, b) = (percentile(&sorted, lo), percentile(&sorted, hi));
    for v in values.iter_mut().filter(|v| v.is_finite()) {
        *v = v.clamp(a, b);
    }
    Ok(Some((a, b)))
}
