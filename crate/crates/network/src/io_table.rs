//! Input-output tables and their CSV long form.

use std::collections::{BTreeMap, HashMap};
use std::io::Read;

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::error::{NetworkError, Result};

/// Slack allowed in `Y_i >= F_i + Σ_j flows_ij` for inventory and residual
/// columns.
pub const ACCOUNTING_SLACK: f64 = 1e-6;

/// One year's table. `flows[(i, j)]` is what sector `i` sells to sector `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct IoTable {
    year: i32,
    sectors: Vec<String>,
    flows: DMatrix<f64>,
    final_demand: DVector<f64>,
    total_output: DVector<f64>,
}

impl IoTable {
    pub fn new(
        year: i32,
        sectors: Vec<String>,
        flows: DMatrix<f64>,
        final_demand: DVector<f64>,
        total_output: DVector<f64>,
    ) -> Result<Self> {
        let n = sectors.len();
        if flows.shape() != (n, n) || final_demand.len() != n || total_output.len() != n {
            return Err(NetworkError::Dimension(format!(
                "{n} sectors, flows {:?}, final demand {}, total output {}",
                flows.shape(),
                final_demand.len(),
                total_output.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for s in &sectors {
            if !seen.insert(s) {
                return Err(NetworkError::Duplicate(format!("sector {s}")));
            }
        }
        for ((i, j), &x) in flows.iter().enumerate().map(|(k, x)| ((k % n, k / n), x)) {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(NetworkError::InvalidValue {
                    field: "flow",
                    key: format!("{} -> {}", sectors[i], sectors[j]),
                    value: x,
                });
            }
        }
        for (i, s) in sectors.iter().enumerate() {
            let (f, y) = (final_demand[i], total_output[i]);
            if !(f >= 0.0 && f.is_finite()) {
                return Err(NetworkError::InvalidValue { field: "final_demand", key: s.clone(), value: f });
            }
            if !(y >= 0.0 && y.is_finite()) {
                return Err(NetworkError::InvalidValue { field: "total_output", key: s.clone(), value: y });
            }
            let uses = f + flows.row(i).sum();
            if uses > y * (1.0 + ACCOUNTING_SLACK) {
                return Err(NetworkError::Accounting { sector: s.clone(), uses, output: y });
            }
        }
        Ok(Self {
            year,
            sectors,
            flows,
            final_demand,
            total_output,
        })
    }

    pub fn year(&self) -> i32 {
        self.year
    }
    pub fn sectors(&self) -> &[String] {
        &self.sectors
    }
    pub fn flows(&self) -> &DMatrix<f64> {
        &self.flows
    }
    pub fn final_demand(&self) -> &DVector<f64> {
        &self.final_demand
    }
    pub fn total_output(&self) -> &DVector<f64> {
        &self.total_output
    }
    pub fn len(&self) -> usize {
        self.sectors.len()
    }
    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }
    pub fn index_of(&self, sector: &str) -> Option<usize> {
        self.sectors.iter().position(|s| s == sector)
    }

    /// Output not sold to other sectors, `Y_i - Σ_j flows_ij`. Equals
    /// `F_i` when the table has no residual columns.
    pub fn effective_final_use(&self) -> DVector<f64> {
        DVector::from_fn(self.len(), |i, _| (self.total_output[i] - self.flows.row(i).sum()).max(0.0))
    }
}

#[derive(Debug, Deserialize)]
struct FlowRow {
    year: i32,
    seller_sector: String,
    buyer_sector: String,
    flow: f64,
}

#[derive(Debug, Deserialize)]
struct TotalsRow {
    year: i32,
    sector: String,
    final_demand: f64,
    total_output: f64,
}

/// Tables for every year in `totals`, sectors in order of first appearance.
/// Flow pairs not listed are zero.
pub fn read_io_tables<F: Read, T: Read>(flow_csv: F, totals: T) -> Result<BTreeMap<i32, IoTable>> {
    let mut by_year: BTreeMap<i32, (Vec<String>, Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for row in csv::Reader::from_reader(totals).deserialize() {
        let row: TotalsRow = row?;
        let entry = by_year.entry(row.year).or_default();
        if entry.0.contains(&row.sector) {
            return Err(NetworkError::Duplicate(format!("totals for {} in {}", row.sector, row.year)));
        }
        entry.0.push(row.sector);
        entry.1.push(row.final_demand);
        entry.2.push(row.total_output);
    }

    let index: HashMap<i32, HashMap<String, usize>> = by_year
        .iter()
        .map(|(&y, (s, _, _))| (y, s.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect()))
        .collect();
    let mut flows: HashMap<i32, DMatrix<f64>> = by_year
        .iter()
        .map(|(&y, (s, _, _))| (y, DMatrix::from_element(s.len(), s.len(), f64::NAN)))
        .collect();
    for row in csv::Reader::from_reader(flow_csv).deserialize() {
        let row: FlowRow = row?;
        let idx = index.get(&row.year).ok_or(NetworkError::MissingYear(row.year))?;
        let lookup = |s: &String| idx.get(s).copied().ok_or_else(|| NetworkError::UnknownSector(s.clone()));
        let (i, j) = (lookup(&row.seller_sector)?, lookup(&row.buyer_sector)?);
        if !row.flow.is_finite() {
            return Err(NetworkError::InvalidValue {
                field: "flow",
                key: format!("{} -> {}", row.seller_sector, row.buyer_sector),
                value: row.flow,
            });
        }
        let m = flows.get_mut(&row.year).expect("year indexed");
        if !m[(i, j)].is_nan() {
            return Err(NetworkError::Duplicate(format!(
                "flow {} -> {} in {}",
                row.seller_sector, row.buyer_sector, row.year
            )));
        }
        m[(i, j)] = row.flow;
    }

    by_year
        .into_iter()
        .map(|(year, (sectors, f, y))| {
            let m = flows.remove(&year).expect("year indexed").map(|x| if x.is_nan() { 0.0 } else { x });
            let table = IoTable::new(year, sectors, m, DVector::from_vec(f), DVector::from_vec(y))?;
            Ok((year, table))
        })
        .collect()
}
