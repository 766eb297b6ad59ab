use serde::{Deserialize, Serialize};

use crate::absorb::ABSORB_TOLERANCE;
use crate::error::{EconError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    #[default]
    Ppml,
    Ols,
    /// Any-deal indicator `outcome > 0`.
    Logit,
}

impl Estimator {
    pub fn label(self) -> &'static str {
        match self {
            Estimator::Ppml => "PPML",
            Estimator::Ols => "OLS",
            Estimator::Logit => "Logit",
        }
    }
}

/// How fixed effects enter the fit. Logit always uses indicator columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Absorption {
    #[default]
    Demean,
    Dummies,
}

/// Reference model for the pseudo R-squared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NullModel {
    #[default]
    Intercept,
    FixedEffects,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimationSpec {
    pub outcome: String,
    pub regressors: Vec<String>,
    pub fixed_effects: Vec<String>,
    /// Without a cluster column the errors are heteroskedasticity-robust.
    pub cluster: Option<String>,
    pub estimator: Estimator,
    pub absorption: Absorption,
    pub null_model: NullModel,
    /// Largest absolute coefficient change at convergence.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub absorb_tolerance: f64,
}

impl Default for EstimationSpec {
    fn default() -> Self {
        Self {
            outcome: "backward_count".into(),
            regressors: vec!["tariff".into()],
            fixed_effects: vec!["firm_id".into(), "industry_code".into(), "year".into()],
            cluster: Some("firm_id".into()),
            estimator: Estimator::Ppml,
            absorption: Absorption::Demean,
            null_model: NullModel::Intercept,
            tolerance: 1e-8,
            max_iterations: 100,
            absorb_tolerance: ABSORB_TOLERANCE,
        }
    }
}

impl EstimationSpec {
    pub fn new(estimator: Estimator, outcome: &str, regressors: &[&str], fixed_effects: &[&str]) -> Self {
        Self {
            outcome: outcome.into(),
            regressors: regressors.iter().map(|s| s.to_string()).collect(),
            fixed_effects: fixed_effects.iter().map(|s| s.to_string()).collect(),
            cluster: None,
            estimator,
            ..Self::default()
        }
    }

    pub fn clustered(mut self, column: &str) -> Self {
        self.cluster = Some(column.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(EconError::Spec(m.into()));
        if self.outcome.is_empty() {
            return bad("missing outcome column");
        }
        if !(self.tolerance > 0.0 && self.absorb_tolerance > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive");
        }
        let mut seen = std::collections::BTreeSet::new();
        for r in &self.regressors {
            if r == &self.outcome || !seen.insert(r) {
                return Err(EconError::Spec(format!("column {r} listed twice")));
            }
        }
        let fe: std::collections::BTreeSet<_> = self.fixed_effects.iter().collect();
        if fe.len() != self.fixed_effects.len() {
            return bad("duplicate fixed-effect column");
        }
        Ok(())
    }
}
