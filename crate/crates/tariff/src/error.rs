use thiserror::Error;

#[derive(Debug, Error)]
pub enum TariffError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Network(#[from] holdup_network::NetworkError),
    #[error("malformed hs6 code {0:?}: expected 6 digits")]
    BadHs6(String),
    #[error("hs6 {hs6} ({year}) has no industry in the concordance")]
    Unmapped { hs6: String, year: i32 },
    #[error("negative {field} {value} for hs6 {hs6} in {year}")]
    NegativeRate { field: &'static str, hs6: String, year: i32, value: f64 },
    #[error("hs6 {hs6} ({year}) has no import value, required for weighted averages")]
    MissingImportValue { hs6: String, year: i32 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("Leontief matrix is singular")]
    Singular,
    #[error("lag {k} exceeds the {span}-year span of the series")]
    LagTooLong { k: u32, span: i32 },
    #[error("lag must be at least 1")]
    ZeroLag,
    #[error("invalid percentiles ({lo}, {hi})")]
    Percentiles { lo: f64, hi: f64 },
    #[error("firm-year file: {0}")]
    FirmYears(String),
}

pub type Result<T, E = TariffError> = std::result::Result<T, E>;
