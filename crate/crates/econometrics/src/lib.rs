//! Count-data regressions for firm-year panels: PPML with absorbed fixed
//! effects and clustered errors, OLS and logit variants, and a synthetic
//! panel generator for planted-coefficient Monte Carlo checks.

pub mod absorb;
pub mod error;
pub mod exec;
pub mod frame;
pub mod linalg;
pub mod logit;
pub mod montecarlo;
pub mod ols;
pub mod ppml;
pub mod result;
pub mod sample;
pub mod spec;
pub mod synth;
pub mod table;
pub mod vcov;

pub use error::{EconError, Result};
pub use exec::Execution;
pub use frame::{Column, Frame};
pub use logit::logit_fit;
pub use montecarlo::{run_monte_carlo, MonteCarloConfig, MonteCarloReport, MonteCarloSummary};
pub use ols::ols_fit;
pub use ppml::{poisson_loglik, ppml_fit};
pub use result::{pseudo_r2, Coefficient, EstimationResult};
pub use sample::{Dropped, INTERCEPT};
pub use spec::{Absorption, EstimationSpec, Estimator, NullModel};
pub use synth::{synth_dgp, synth_with_rng, ControlSpec, SynthConfig};
pub use table::{coefficients_csv, regression_table, stars};

pub fn fit(frame: &Frame, spec: &EstimationSpec) -> Result<EstimationResult> {
    match spec.estimator {
        Estimator::Ppml => ppml_fit(frame, spec),
        Estimator::Ols => ols_fit(frame, spec),
        Estimator::Logit => logit_fit(frame, spec),
    }
}
