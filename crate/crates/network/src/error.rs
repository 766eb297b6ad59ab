use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid value in {field} for {key}: {value}")]
    InvalidValue { field: &'static str, key: String, value: f64 },
    #[error("sector {sector} has zero total output")]
    ZeroOutput { sector: String },
    #[error("sector {sector} uses more inputs than it produces ({column_sum} >= 1 per unit of output)")]
    NonViable { sector: String, column_sum: f64 },
    #[error("sector {sector}: final demand plus intermediate sales {uses} exceed total output {output}")]
    Accounting { sector: String, uses: f64, output: f64 },
    #[error("unknown sector {0}")]
    UnknownSector(String),
    #[error("duplicate entry {0}")]
    Duplicate(String),
    #[error("no data for year {0}")]
    MissingYear(i32),
    #[error("upstreamness series did not converge: {0}")]
    NonConvergence(String),
    #[error("upstreamness system is singular")]
    Singular,
    #[error("industry {0} has no upstreamness value")]
    UnknownIndustry(String),
    #[error("malformed industry code {0:?}: expected 4 digits")]
    BadIndustryCode(String),
    #[error("quartiles need at least 4 industries, got {0}")]
    TooFewIndustries(usize),
}

pub type Result<T, E = NetworkError> = std::result::Result<T, E>;
