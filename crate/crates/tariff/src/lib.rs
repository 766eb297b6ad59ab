//! Tariff measures for the hold-up regressions: product lines aggregated to
//! industries (simple, import-weighted and applied-rate means), upstream
//! tariffs through the input-output matrix, lags, and the firm-year panel
//! that joins them with deal counts.

pub mod error;
pub mod lines;
pub mod panel;
pub mod series;
pub mod upstream;

pub use error::{Result, TariffError};
pub use lines::{industry_tariff, read_hs_concordance, read_tariff_lines, HsConcordance, IndustryTariffs, Mode, TariffLine};
pub use panel::{build_panel, read_firm_years, FirmYearPanel, FirmYears, JoinReport, PanelOptions, PanelRow, TariffPanel};
pub use series::{lag_series, lead_series, winsorize, YearSeries};
pub use upstream::{complete_requirements, upstream_industry_tariffs, upstream_tariff, Requirements};
