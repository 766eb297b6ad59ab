//! Industry tariff panel and the firm-year estimation panel.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;

use holdup_network::deals::{ClassifiedDeal, Direction};
use holdup_network::Quartile;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TariffError};
use crate::lines::{industry_tariff, HsConcordance, Mode, TariffLine};
use crate::series::{lag_series, winsorize, Key, YearSeries};

/// Industry-year tariff measures.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TariffPanel {
    pub simple: YearSeries,
    pub weighted: YearSeries,
    pub ahs: YearSeries,
    pub upstream: YearSeries,
    /// Cells where the weighted or AHS measure fell back to the simple mean.
    pub weighted_fallback: BTreeSet<Key>,
    pub ahs_fallback: BTreeSet<Key>,
}

impl TariffPanel {
    /// All three industry measures; `upstream` is left empty.
    pub fn from_lines(lines: &[TariffLine], concordance: &HsConcordance) -> Result<Self> {
        let simple = industry_tariff(lines, concordance, Mode::Simple)?;
        let weighted = if lines.iter().all(|l| l.import_value.is_some()) {
            industry_tariff(lines, concordance, Mode::Weighted)?
        } else {
            // Without import values every cell falls back.
            crate::lines::IndustryTariffs {
                fallback: simple.values.values.keys().cloned().collect(),
                values: simple.values.clone(),
            }
        };
        let ahs = industry_tariff(lines, concordance, Mode::Ahs)?;
        Ok(Self {
            simple: simple.values,
            weighted: weighted.values,
            ahs: ahs.values,
            upstream: YearSeries::default(),
            weighted_fallback: weighted.fallback,
            ahs_fallback: ahs.fallback,
        })
    }

    pub fn measure(&self, mode: Mode) -> &YearSeries {
        match mode {
            Mode::Simple => &self.simple,
            Mode::Weighted => &self.weighted,
            Mode::Ahs => &self.ahs,
        }
    }

    pub const CSV_COLUMNS: [&'static str; 8] = [
        "year",
        "industry_code",
        "simple_tariff",
        "weight_tariff",
        "ahs_tariff",
        "upstream_tariff",
        "weight_fallback",
        "ahs_fallback",
    ];

    pub fn to_csv(&self) -> String {
        let keys: BTreeSet<&Key> = self
            .simple
            .values
            .keys()
            .chain(self.upstream.values.keys())
            .collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(Self::CSV_COLUMNS).expect("in-memory write");
        for key in keys {
            let cell = |s: &YearSeries| s.values.get(key).map(f64::to_string).unwrap_or_default();
            w.write_record([
                key.0.to_string(),
                key.1.clone(),
                cell(&self.simple),
                cell(&self.weighted),
                cell(&self.ahs),
                cell(&self.upstream),
                self.weighted_fallback.contains(key).to_string(),
                self.ahs_fallback.contains(key).to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirmYear {
    pub firm_id: String,
    pub year: i32,
    pub industry_code: String,
    pub controls: Vec<f64>,
    pub soe: bool,
    pub high_tech: bool,
    pub differentiated: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FirmYears {
    pub control_names: Vec<String>,
    pub rows: Vec<FirmYear>,
}

const FIRM_KEYS: [&str; 6] = ["firm_id", "year", "industry_code", "soe", "high_tech", "differentiated"];

fn parse_flag(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" => Some(true),
        "0" | "false" | "no" => Some(false),
        _ => None,
    }
}

/// Reads `firm_id, year, industry_code, soe, high_tech` plus an optional
/// `differentiated` flag; every other column is a numeric control.
pub fn read_firm_years<R: Read>(reader: R) -> Result<FirmYears> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let required = |name: &str| col(name).ok_or_else(|| TariffError::FirmYears(format!("missing column {name}")));
    let (firm, year, industry, soe, tech) = (
        required("firm_id")?,
        required("year")?,
        required("industry_code")?,
        required("soe")?,
        required("high_tech")?,
    );
    let diff = col("differentiated");
    let controls: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| !FIRM_KEYS.contains(h))
        .map(|(i, h)| (i, h.to_string()))
        .collect();

    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let at = |i: usize| rec.get(i).unwrap_or("");
        let bad = |what: &str, i: usize| TariffError::FirmYears(format!("row {}: bad {what} {:?}", line + 2, at(i)));
        rows.push(FirmYear {
            firm_id: at(firm).to_string(),
            year: at(year).trim().parse().map_err(|_| bad("year", year))?,
            industry_code: at(industry).to_string(),
            controls: controls
                .iter()
                .map(|(i, _)| {
                    let s = at(*i).trim();
                    if s.is_empty() {
                        Ok(f64::NAN)
                    } else {
                        s.parse().map_err(|_| bad("control", *i))
                    }
                })
                .collect::<Result<_>>()?,
            soe: parse_flag(at(soe)).ok_or_else(|| bad("soe", soe))?,
            high_tech: parse_flag(at(tech)).ok_or_else(|| bad("high_tech", tech))?,
            differentiated: match diff {
                Some(i) if !at(i).trim().is_empty() => Some(parse_flag(at(i)).ok_or_else(|| bad("differentiated", i))?),
                _ => None,
            },
        });
    }
    Ok(FirmYears {
        control_names: controls.into_iter().map(|(_, h)| h).collect(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PanelOptions {
    /// Industry measure used for `tariff`.
    pub measure: Mode,
    /// Depth of the lagged tariff columns; `None` omits them.
    pub lag: Option<u32>,
    /// Deal statuses counted; empty counts every deal.
    pub statuses: Vec<String>,
    /// Percentiles for clamping controls; `None` leaves them raw.
    pub winsorize_controls: Option<(f64, f64)>,
    /// Percentiles for clamping the tariff columns.
    pub winsorize_tariffs: Option<(f64, f64)>,
}

impl Default for PanelOptions {
    fn default() -> Self {
        Self {
            measure: Mode::Simple,
            lag: Some(1),
            statuses: Vec::new(),
            winsorize_controls: Some((1.0, 99.0)),
            winsorize_tariffs: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelRow {
    pub firm_id: String,
    pub year: i32,
    pub industry_code: String,
    pub backward_count: u32,
    pub forward_count: u32,
    pub horizontal_count: u32,
    pub tariff: Option<f64>,
    pub upstream_tariff: Option<f64>,
    pub tariff_lag: Option<f64>,
    pub upstream_tariff_lag: Option<f64>,
    pub controls: Vec<f64>,
    pub soe: bool,
    pub high_tech: bool,
    pub differentiated: Option<bool>,
    pub quartile: Option<Quartile>,
}

/// Join misses, counted per joined column.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinReport {
    pub rows: usize,
    pub tariff_misses: usize,
    pub upstream_misses: usize,
    pub tariff_lag_misses: usize,
    pub upstream_lag_misses: usize,
    pub quartile_misses: usize,
    /// Deals whose acquirer-year has no firm-year row.
    pub unmatched_deals: usize,
    /// Deals dropped by the status filter.
    pub filtered_deals: usize,
}

impl JoinReport {
    pub fn total_misses(&self) -> usize {
        self.tariff_misses
            + self.upstream_misses
            + self.tariff_lag_misses
            + self.upstream_lag_misses
            + self.quartile_misses
            + self.unmatched_deals
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirmYearPanel {
    pub control_names: Vec<String>,
    pub lag: Option<u32>,
    pub rows: Vec<PanelRow>,
}

fn clamp_column<F>(rows: &mut [PanelRow], pct: (f64, f64), get: F) -> Result<()>
where
    F: Fn(&mut PanelRow) -> &mut Option<f64>,
{
    let mut values: Vec<f64> = rows.iter_mut().map(|r| get(r).unwrap_or(f64::NAN)).collect();
    winsorize(&mut values, pct.0, pct.1)?;
    for (r, v) in rows.iter_mut().zip(values) {
        if let Some(x) = get(r) {
            *x = v;
        }
    }
    Ok(())
}

/// One row per firm-year, in input order. Deal counts default to zero and
/// every join miss leaves the cell empty and is counted in the report.
pub fn build_panel(
    firm_years: &FirmYears,
    tariffs: &TariffPanel,
    quartiles: &BTreeMap<String, Quartile>,
    deals: &[ClassifiedDeal],
    opts: &PanelOptions,
) -> Result<(FirmYearPanel, JoinReport)> {
    let mut report = JoinReport {
        rows: firm_years.rows.len(),
        ..JoinReport::default()
    };

    let mut counts: HashMap<(&str, i32), [u32; 3]> = HashMap::new();
    let known: BTreeSet<(&str, i32)> = firm_years.rows.iter().map(|r| (r.firm_id.as_str(), r.year)).collect();
    for d in deals {
        if !opts.statuses.is_empty() && !opts.statuses.contains(&d.deal.status) {
            report.filtered_deals += 1;
            continue;
        }
        let key = (d.deal.acquirer_firm_id.as_str(), d.deal.year);
        if !known.contains(&key) {
            report.unmatched_deals += 1;
            continue;
        }
        let slot = match d.direction {
            Direction::Backward => 0,
            Direction::Forward => 1,
            Direction::Horizontal => 2,
        };
        counts.entry(key).or_default()[slot] += 1;
    }

    let base = tariffs.measure(opts.measure);
    let (base_lag, up_lag) = match opts.lag {
        Some(k) => (Some(lag_series(base, k)?), Some(lag_series(&tariffs.upstream, k)?)),
        None => (None, None),
    };
    let miss = |found: Option<f64>, counter: &mut usize| {
        if found.is_none() {
            *counter += 1;
        }
        found
    };

    let mut rows = Vec::with_capacity(firm_years.rows.len());
    for fy in &firm_years.rows {
        let (y, code) = (fy.year, fy.industry_code.as_str());
        let c = counts.get(&(fy.firm_id.as_str(), y)).copied().unwrap_or_default();
        let quartile = quartiles.get(code).copied();
        if quartile.is_none() {
            report.quartile_misses += 1;
        }
        rows.push(PanelRow {
            firm_id: fy.firm_id.clone(),
            year: y,
            industry_code: fy.industry_code.clone(),
            backward_count: c[0],
            forward_count: c[1],
            horizontal_count: c[2],
            tariff: miss(base.get(y, code), &mut report.tariff_misses),
            upstream_tariff: miss(tariffs.upstream.get(y, code), &mut report.upstream_misses),
            tariff_lag: match &base_lag {
                Some(s) => miss(s.get(y, code), &mut report.tariff_lag_misses),
                None => None,
            },
            upstream_tariff_lag: match &up_lag {
                Some(s) => miss(s.get(y, code), &mut report.upstream_lag_misses),
                None => None,
            },
            controls: fy.controls.clone(),
            soe: fy.soe,
            high_tech: fy.high_tech,
            differentiated: fy.differentiated,
            quartile,
        });
    }

    if let Some(pct) = opts.winsorize_controls {
        for k in 0..firm_years.control_names.len() {
            let mut col: Vec<f64> = rows.iter().map(|r| r.controls[k]).collect();
            winsorize(&mut col, pct.0, pct.1)?;
            for (r, v) in rows.iter_mut().zip(col) {
                r.controls[k] = v;
            }
        }
    }
    if let Some(pct) = opts.winsorize_tariffs {
        clamp_column(&mut rows, pct, |r| &mut r.tariff)?;
        clamp_column(&mut rows, pct, |r| &mut r.upstream_tariff)?;
        clamp_column(&mut rows, pct, |r| &mut r.tariff_lag)?;
        clamp_column(&mut rows, pct, |r| &mut r.upstream_tariff_lag)?;
    }

    Ok((
        FirmYearPanel {
            control_names: firm_years.control_names.clone(),
            lag: opts.lag,
            rows,
        },
        report,
    ))
}

impl FirmYearPanel {
    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = [
            "firm_id",
            "year",
            "industry_code",
            "backward_count",
            "forward_count",
            "horizontal_count",
            "tariff",
            "upstream_tariff",
        ]
        .map(String::from)
        .to_vec();
        if let Some(k) = self.lag {
            cols.push(format!("tariff_lag{k}"));
            cols.push(format!("upstream_tariff_lag{k}"));
        }
        cols.extend(["soe", "high_tech", "differentiated", "quartile"].map(String::from));
        cols.extend(self.control_names.iter().cloned());
        cols
    }

    pub fn to_csv(&self) -> String {
        let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let flag = |b: bool| if b { "1" } else { "0" }.to_string();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.columns()).expect("in-memory write");
        for r in &self.rows {
            let mut rec = vec![
                r.firm_id.clone(),
                r.year.to_string(),
                r.industry_code.clone(),
                r.backward_count.to_string(),
                r.forward_count.to_string(),
                r.horizontal_count.to_string(),
                num(r.tariff),
                num(r.upstream_tariff),
            ];
            if self.lag.is_some() {
                rec.push(num(r.tariff_lag));
                rec.push(num(r.upstream_tariff_lag));
            }
            rec.push(flag(r.soe));
            rec.push(flag(r.high_tech));
            rec.push(r.differentiated.map(flag).unwrap_or_default());
            rec.push(r.quartile.map(|q| q.label().to_string()).unwrap_or_default());
            rec.extend(r.controls.iter().map(|&c| if c.is_nan() { String::new() } else { c.to_string() }));
            w.write_record(rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}
