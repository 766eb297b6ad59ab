//! Upstreamness: the output-weighted average number of production stages
//! between an industry and final use,
//!
//! ```text
//! UPS_i = 1·F_i/Y_i + 2·Σ_j d_ij F_j / Y_i + 3·Σ_jk d_ij d_jk F_k / Y_i + ...
//! ```
//!
//! Writing `Y_i·UPS_i = Σ_n n·(D^(n-1) F)_i = ((I - D)^-2 F)_i` and using the
//! accounting identity `Y = (I - D)^-1 F` gives `Ŷ·UPS = (I - D)^-1 Y`, i.e.
//! `UPS = (I - Δ)^-1 1` with `Δ = Ŷ^-1 D Ŷ`, `Δ_ij = d_ij Y_j / Y_i`. `Δ` is
//! similar to `D`, so both share a spectral radius below one whenever every
//! column of `D` sums to less than one.
//!
//! The identity only holds when `F` is output net of intermediate sales, so
//! both methods use `F_i = Y_i - Σ_j flows_ij` rather than a reported final
//! demand column that may omit inventories and residuals.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{NetworkError, Result};
use crate::io_table::IoTable;

/// `d_ij = flows_ij / Y_j`, checked for viability.
pub fn direct_requirements(io: &IoTable) -> Result<DMatrix<f64>> {
    let y = io.total_output();
    for (j, s) in io.sectors().iter().enumerate() {
        if y[j] <= 0.0 {
            return Err(NetworkError::ZeroOutput { sector: s.clone() });
        }
    }
    let d = DMatrix::from_fn(io.len(), io.len(), |i, j| io.flows()[(i, j)] / y[j]);
    for (j, s) in io.sectors().iter().enumerate() {
        let column_sum = d.column(j).sum();
        if column_sum >= 1.0 {
            return Err(NetworkError::NonViable {
                sector: s.clone(),
                column_sum,
            });
        }
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Truncated sum of the first `n` terms.
    Series(usize),
    /// Direct solution of `(I - Δ) UPS = 1`.
    Solve,
}

impl Default for Method {
    fn default() -> Self {
        Method::Solve
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpstreamnessVector {
    pub sectors: Vec<String>,
    pub values: Vec<f64>,
}

impl UpstreamnessVector {
    pub fn get(&self, sector: &str) -> Option<f64> {
        self.sectors.iter().position(|s| s == sector).map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.sectors.iter().map(String::as_str).zip(self.values.iter().copied())
    }
}

pub fn upstreamness(io: &IoTable, method: Method) -> Result<UpstreamnessVector> {
    let d = direct_requirements(io)?;
    let y = io.total_output();
    let values = match method {
        Method::Series(terms) => series(&d, y, &io.effective_final_use(), terms)?,
        Method::Solve => solve(&d, y)?,
    };
    Ok(UpstreamnessVector {
        sectors: io.sectors().to_vec(),
        values,
    })
}

fn series(d: &DMatrix<f64>, y: &DVector<f64>, f: &DVector<f64>, terms: usize) -> Result<Vec<f64>> {
    if terms == 0 {
        return Err(NetworkError::NonConvergence("series needs at least one term".into()));
    }
    // Accumulate Σ n·D^(n-1)F, highest power last.
    let mut acc = DVector::zeros(f.len());
    let mut power = f.clone();
    for n in 1..=terms {
        acc.axpy(n as f64, &power, 1.0);
        power = d * power;
    }
    let ups: Vec<f64> = acc.iter().zip(y.iter()).map(|(a, y)| a / y).collect();
    if ups.iter().any(|u| !u.is_finite()) {
        return Err(NetworkError::NonConvergence(format!("non-finite value after {terms} terms")));
    }
    Ok(ups)
}

fn solve(d: &DMatrix<f64>, y: &DVector<f64>) -> Result<Vec<f64>> {
    let n = y.len();
    let delta = DMatrix::from_fn(n, n, |i, j| d[(i, j)] * y[j] / y[i]);
    let system = DMatrix::identity(n, n) - delta;
    let ups = system
        .lu()
        .solve(&DVector::from_element(n, 1.0))
        .ok_or(NetworkError::Singular)?;
    if ups.iter().any(|u| !u.is_finite()) {
        return Err(NetworkError::Singular);
    }
    Ok(ups.iter().copied().collect())
}

/// One row of an IO-sector to industry-code concordance.
#[derive(Debug, Clone, PartialEq, serde::Deserialize)]
pub struct ConcordanceRow {
    pub io_sector: String,
    pub industry_code: String,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

pub fn read_concordance<R: std::io::Read>(reader: R) -> Result<Vec<ConcordanceRow>> {
    let rows: Vec<ConcordanceRow> = csv::Reader::from_reader(reader).deserialize().collect::<Result<_, _>>()?;
    for r in &rows {
        crate::deals::check_code(&r.industry_code)?;
        if !(r.weight >= 0.0 && r.weight.is_finite()) {
            return Err(NetworkError::InvalidValue {
                field: "weight",
                key: format!("{} -> {}", r.io_sector, r.industry_code),
                value: r.weight,
            });
        }
    }
    Ok(rows)
}

/// Upstreamness per industry code: the average over mapped IO sectors,
/// weighted by `weight · Y_sector`.
pub fn sector_concordance(
    ups: &UpstreamnessVector,
    io: &IoTable,
    rows: &[ConcordanceRow],
) -> Result<BTreeMap<String, f64>> {
    let mut sums: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for r in rows {
        let i = io
            .index_of(&r.io_sector)
            .ok_or_else(|| NetworkError::UnknownSector(r.io_sector.clone()))?;
        let u = ups
            .get(&r.io_sector)
            .ok_or_else(|| NetworkError::UnknownSector(r.io_sector.clone()))?;
        let w = r.weight * io.total_output()[i];
        let e = sums.entry(r.industry_code.clone()).or_default();
        e.0 += w * u;
        e.1 += w;
    }
    sums.into_iter()
        .map(|(code, (wu, w))| {
            if w > 0.0 {
                Ok((code, wu / w))
            } else {
                Err(NetworkError::InvalidValue {
                    field: "concordance weight",
                    key: code,
                    value: w,
                })
            }
        })
        .collect()
}
