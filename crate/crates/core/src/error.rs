use thiserror::Error;

use crate::bargain::Regime;
use crate::quadrature::QuadratureError;

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid primitives: {0}")]
    InvalidPrimitives(String),

    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: String,
    },

    /// The maintained assumption `c(e) <= V(t)` does not hold.
    #[error("infeasible: c(e) = {cost} exceeds V(t) = {value}")]
    Infeasible { cost: f64, value: f64 },

    #[error(transparent)]
    Quadrature(#[from] QuadratureError),

    #[error("second-order condition fails for {regime:?}: objective second difference {second_difference:.3e} at FOC root e = {e}")]
    SocFailure {
        regime: Regime,
        e: f64,
        second_difference: f64,
    },

    #[error("no maximizer found for {0:?}")]
    NoMaximum(Regime),

    #[error("{regime:?} equilibrium at e = {e} is a corner solution")]
    NonInterior { regime: Regime, e: f64 },

    #[error("empty grid: {0}")]
    EmptyGrid(String),

    #[error("finite-difference step must be positive, got {0}")]
    InvalidStep(f64),

    #[error("config: {0}")]
    Config(String),
}

impl From<serde_json::Error> for ModelError {
    fn from(err: serde_json::Error) -> Self {
        ModelError::Config(err.to_string())
    }
}
