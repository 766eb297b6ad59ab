//! Upstream tariffs: each sector's exposure to tariffs on its inputs,
//! `upstream_{t,i} = Σ_j tariff_{t,j} · IO_{j,i}`.

use std::collections::BTreeMap;

use holdup_network::upstreamness::ConcordanceRow;
use holdup_network::{direct_requirements, IoTable};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TariffError};
use crate::series::YearSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Requirements {
    /// Direct requirement coefficients `d_ji`.
    #[default]
    Direct,
    /// `(I - D)^-1 - I`, each column scaled to sum to one.
    Complete,
}

/// `tariffs (years × sectors) · io (sectors × sectors)`, accumulating over
/// input sectors in index order.
pub fn upstream_tariff(tariffs: &DMatrix<f64>, io: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if tariffs.ncols() != io.nrows() {
        return Err(TariffError::Dimension(format!(
            "tariff matrix has {} sectors, IO matrix {} rows",
            tariffs.ncols(),
            io.nrows()
        )));
    }
    let (years, sectors, inputs) = (tariffs.nrows(), io.ncols(), io.nrows());
    Ok(DMatrix::from_fn(years, sectors, |t, i| {
        let mut acc = 0.0;
        for j in 0..inputs {
            acc += tariffs[(t, j)] * io[(j, i)];
        }
        acc
    }))
}

/// Total (direct plus indirect) requirements net of the identity, with
/// every nonzero column normalized to sum to one.
pub fn complete_requirements(d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = d.nrows();
    if d.ncols() != n {
        return Err(TariffError::Dimension(format!("requirements matrix is {:?}", d.shape())));
    }
    let identity = DMatrix::<f64>::identity(n, n);
    let leontief = (&identity - d).try_inverse().ok_or(TariffError::Singular)?;
    let mut b = leontief - identity;
    for mut col in b.column_iter_mut() {
        let s = col.sum();
        if s > 0.0 {
            col /= s;
        }
    }
    Ok(b)
}

pub fn requirement_matrix(io: &IoTable, mode: Requirements) -> Result<DMatrix<f64>> {
    let d = direct_requirements(io)?;
    match mode {
        Requirements::Direct => Ok(d),
        Requirements::Complete => complete_requirements(&d),
    }
}

/// Industry tariffs averaged onto IO sectors with the concordance weights.
/// Industries without a tariff in a year are skipped; a sector with none
/// of its industries observed has no value that year.
pub fn sector_tariffs(industry: &YearSeries, concordance: &[ConcordanceRow]) -> YearSeries {
    let mut sums: BTreeMap<(i32, String), (f64, f64)> = BTreeMap::new();
    for ((year, code), &rate) in &industry.values {
        for row in concordance.iter().filter(|r| &r.industry_code == code && r.weight > 0.0) {
            let e = sums.entry((*year, row.io_sector.clone())).or_default();
            e.0 += row.weight * rate;
            e.1 += row.weight;
        }
    }
    YearSeries {
        values: sums.into_iter().map(|(k, (wr, w))| (k, wr / w)).collect(),
    }
}

/// Sector values mapped back to industries, weighted by `weight · Y_sector`
/// as for upstreamness.
pub fn industry_from_sectors(sector: &YearSeries, io: &IoTable, concordance: &[ConcordanceRow]) -> YearSeries {
    let mut sums: BTreeMap<(i32, String), (f64, f64)> = BTreeMap::new();
    for ((year, s), &v) in &sector.values {
        let Some(idx) = io.index_of(s) else { continue };
        let y = io.total_output()[idx];
        for row in concordance.iter().filter(|r| &r.io_sector == s) {
            let w = row.weight * y;
            if w > 0.0 {
                let e = sums.entry((*year, row.industry_code.clone())).or_default();
                e.0 += w * v;
                e.1 += w;
            }
        }
    }
    YearSeries {
        values: sums.into_iter().map(|(k, (wv, w))| (k, wv / w)).collect(),
    }
}

/// The table for `year`: the latest one not after it, else the earliest.
pub fn table_for_year(tables: &BTreeMap<i32, IoTable>, year: i32) -> Option<&IoTable> {
    tables
        .range(..=year)
        .next_back()
        .or_else(|| tables.iter().next())
        .map(|(_, t)| t)
}

/// Upstream tariffs per industry-year from industry tariffs.
///
/// Each year's industry tariffs are averaged onto IO sectors, multiplied
/// through the requirement matrix of that year's table and mapped back to
/// industries. Sectors without an observed tariff count as zero-tariff
/// inputs.
pub fn upstream_industry_tariffs(
    industry: &YearSeries,
    tables: &BTreeMap<i32, IoTable>,
    concordance: &[ConcordanceRow],
    mode: Requirements,
) -> Result<YearSeries> {
    let sector = sector_tariffs(industry, concordance);
    let years: std::collections::BTreeSet<i32> = industry.values.keys().map(|k| k.0).collect();
    let mut out = YearSeries::default();
    for year in years {
        let Some(io) = table_for_year(tables, year) else {
            continue;
        };
        let req = requirement_matrix(io, mode)?;
        let row = DMatrix::from_fn(1, io.len(), |_, j| sector.get(year, &io.sectors()[j]).unwrap_or(0.0));
        let up = upstream_tariff(&row, &req)?;
        let mut by_sector = YearSeries::default();
        for (i, s) in io.sectors().iter().enumerate() {
            by_sector.insert(year, s.clone(), up[(0, i)]);
        }
        out.values.extend(industry_from_sectors(&by_sector, io, concordance).values);
    }
    Ok(out)
}
