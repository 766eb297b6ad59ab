use holdup_core::ModelError;
use holdup_econometrics::EconError;
use holdup_network::NetworkError;
use holdup_tariff::TariffError;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numerical(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Config,
    Data,
    Numerical,
}

impl CliError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            CliError::Config(_) => ErrorKind::Config,
            CliError::Data(_) => ErrorKind::Data,
            CliError::Numerical(_) => ErrorKind::Numerical,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Config => 2,
            ErrorKind::Data => 3,
            ErrorKind::Numerical => 4,
        }
    }

    /// One-line JSON for stderr.
    pub fn report(&self, command: &str) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            status: &'static str,
            command: &'a str,
            kind: ErrorKind,
            exit_code: i32,
            message: String,
        }
        serde_json::to_string(&Report {
            status: "error",
            command,
            kind: self.kind(),
            exit_code: self.exit_code(),
            message: self.to_string(),
        })
        .expect("plain struct serializes")
    }

    pub fn context(self, what: &str) -> Self {
        match self {
            CliError::Config(m) => CliError::Config(format!("{what}: {m}")),
            CliError::Data(m) => CliError::Data(format!("{what}: {m}")),
            CliError::Numerical(m) => CliError::Numerical(format!("{what}: {m}")),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(format!("invalid JSON: {e}"))
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        let m = e.to_string();
        match e {
            ModelError::InvalidPrimitives(_)
            | ModelError::Domain { .. }
            | ModelError::EmptyGrid(_)
            | ModelError::InvalidStep(_)
            | ModelError::Config(_) => CliError::Config(m),
            _ => CliError::Numerical(m),
        }
    }
}

impl From<NetworkError> for CliError {
    fn from(e: NetworkError) -> Self {
        let m = e.to_string();
        match e {
            NetworkError::NonConvergence(_) | NetworkError::Singular => CliError::Numerical(m),
            _ => CliError::Data(m),
        }
    }
}

impl From<TariffError> for CliError {
    fn from(e: TariffError) -> Self {
        match e {
            TariffError::Network(n) => n.into(),
            TariffError::Singular => CliError::Numerical(e.to_string()),
            TariffError::LagTooLong { .. } | TariffError::ZeroLag | TariffError::Percentiles { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<EconError> for CliError {
    fn from(e: EconError) -> Self {
        let m = e.to_string();
        match e {
            EconError::Spec(_) | EconError::Config(_) | EconError::UnknownColumn(_) => CliError::Config(m),
            EconError::Io(_) | EconError::Csv(_) | EconError::BadColumn { .. } | EconError::NoObservations { .. } | EconError::EmptyResults => {
                CliError::Data(m)
            }
            _ => CliError::Numerical(m),
        }
    }
}
