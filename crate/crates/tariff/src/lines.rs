//! Product-level tariff lines and their aggregation to industries.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TariffError};
use crate::series::{Key, YearSeries};

/// Rates are in percentage points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TariffLine {
    pub year: i32,
    pub hs6: String,
    pub mfn_rate: f64,
    #[serde(default)]
    pub ahs_rate: Option<f64>,
    #[serde(default)]
    pub import_value: Option<f64>,
}

impl TariffLine {
    fn validate(&self) -> Result<()> {
        if self.hs6.len() != 6 || !self.hs6.bytes().all(|b| b.is_ascii_digit()) {
            return Err(TariffError::BadHs6(self.hs6.clone()));
        }
        let negative = |field, value: f64| {
            (!(value >= 0.0 && value.is_finite())).then(|| TariffError::NegativeRate {
                field,
                hs6: self.hs6.clone(),
                year: self.year,
                value,
            })
        };
        if let Some(e) = negative("mfn_rate", self.mfn_rate)
            .or_else(|| self.ahs_rate.and_then(|r| negative("ahs_rate", r)))
            .or_else(|| self.import_value.and_then(|v| negative("import_value", v)))
        {
            return Err(e);
        }
        Ok(())
    }
}

pub fn read_tariff_lines<R: Read>(reader: R) -> Result<Vec<TariffLine>> {
    let lines: Vec<TariffLine> = csv::Reader::from_reader(reader).deserialize().collect::<Result<_, _>>()?;
    for l in &lines {
        l.validate()?;
    }
    Ok(lines)
}

/// HS6 → industry codes. A product mapped to several industries enters
/// each of them in full.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HsConcordance {
    map: BTreeMap<String, Vec<String>>,
}

impl HsConcordance {
    pub fn from_pairs<I, A, B>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (hs6, code) in pairs {
            let codes = map.entry(hs6.into()).or_default();
            let code = code.into();
            if !codes.contains(&code) {
                codes.push(code);
            }
        }
        Self { map }
    }

    pub fn industries(&self, hs6: &str) -> Option<&[String]> {
        self.map.get(hs6).map(Vec::as_slice)
    }
}

#[derive(Debug, Deserialize)]
struct ConcordanceRow {
    hs6: String,
    industry_code: String,
}

pub fn read_hs_concordance<R: Read>(reader: R) -> Result<HsConcordance> {
    let rows: Vec<ConcordanceRow> = csv::Reader::from_reader(reader).deserialize().collect::<Result<_, _>>()?;
    Ok(HsConcordance::from_pairs(rows.into_iter().map(|r| (r.hs6, r.industry_code))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Unweighted mean of MFN rates.
    #[default]
    Simple,
    /// Import-value-weighted mean of MFN rates.
    Weighted,
    /// Unweighted mean of applied (AHS) rates.
    Ahs,
}

/// Industry-year tariffs; `fallback` lists cells computed by the simple MFN
/// mean because the requested measure was undefined there (no import value
/// in weighted mode, no applied rate in AHS mode).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IndustryTariffs {
    pub values: YearSeries,
    pub fallback: BTreeSet<Key>,
}

#[derive(Default)]
struct Cell {
    n: usize,
    mfn_sum: f64,
    value_sum: f64,
    weighted_sum: f64,
    ahs_n: usize,
    ahs_sum: f64,
}

pub fn industry_tariff(lines: &[TariffLine], concordance: &HsConcordance, mode: Mode) -> Result<IndustryTariffs> {
    let mut cells: BTreeMap<Key, Cell> = BTreeMap::new();
    for l in lines {
        l.validate()?;
        let industries = concordance
            .industries(&l.hs6)
            .filter(|c| !c.is_empty())
            .ok_or_else(|| TariffError::Unmapped {
                hs6: l.hs6.clone(),
                year: l.year,
            })?;
        let value = match (mode, l.import_value) {
            (Mode::Weighted, None) => {
                return Err(TariffError::MissingImportValue {
                    hs6: l.hs6.clone(),
                    year: l.year,
                })
            }
            (_, v) => v.unwrap_or(0.0),
        };
        for code in industries {
            let c = cells.entry((l.year, code.clone())).or_default();
            c.n += 1;
            c.mfn_sum += l.mfn_rate;
            c.value_sum += value;
            c.weighted_sum += l.mfn_rate * value;
            if let Some(a) = l.ahs_rate {
                c.ahs_n += 1;
                c.ahs_sum += a;
            }
        }
    }

    let mut out = IndustryTariffs::default();
    for (key, c) in cells {
        let simple = c.mfn_sum / c.n as f64;
        let value = match mode {
            Mode::Simple => simple,
            Mode::Weighted if c.value_sum > 0.0 => c.weighted_sum / c.value_sum,
            Mode::Ahs if c.ahs_n > 0 => c.ahs_sum / c.ahs_n as f64,
            Mode::Weighted | Mode::Ahs => {
                out.fallback.insert(key.clone());
                simple
            }
        };
        out.values.values.insert(key, value);
    }
    Ok(out)
}
