//! Model primitives and their JSON configuration.
//!
//! ```json
//! {
//!   "alpha": 0.5, "t": 1.0, "tau": 0.0, "k_fixed": 0.5,
//!   "value_params": {"v0": 10.0, "a1": 0.5, "a2": 0.05},
//!   "cost_params": {"family": "exponential", "c0": 4.0, "lambda": 1.5},
//!   "price_dist": {"family": "exponential", "mean": 5.0},
//!   "e_max": 6.0,
//!   "constrained_variant": false
//! }
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// `V(t) = v0 - a1·t - a2·t²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueParams {
    pub v0: f64,
    pub a1: f64,
    pub a2: f64,
}

impl ValueParams {
    pub fn value(&self, t: f64) -> f64 {
        self.v0 - self.a1 * t - self.a2 * t * t
    }
}

impl Default for ValueParams {
    fn default() -> Self {
        Self {
            v0: 10.0,
            a1: 0.5,
            a2: 0.05,
        }
    }
}

/// Supplier unit cost as a function of investment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CostParams {
    /// `c(e) = c0·exp(-λe)`; decreasing and convex.
    Exponential { c0: f64, lambda: f64 },
    /// `c(e) = c0 - b1·e - b2·e²`; decreasing and concave.
    Quadratic { c0: f64, b1: f64, b2: f64 },
}

impl CostParams {
    pub fn cost(&self, e: f64) -> f64 {
        match *self {
            CostParams::Exponential { c0, lambda } => c0 * (-lambda * e).exp(),
            CostParams::Quadratic { c0, b1, b2 } => c0 - b1 * e - b2 * e * e,
        }
    }

    pub fn marginal_cost(&self, e: f64) -> f64 {
        match *self {
            CostParams::Exponential { c0, lambda } => -lambda * c0 * (-lambda * e).exp(),
            CostParams::Quadratic { b1, b2, .. } => -b1 - 2.0 * b2 * e,
        }
    }

    /// Smallest `e` in `[0, e_max]` with `c(e) <= level`, if any. The
    /// returned point always satisfies the inequality.
    pub(crate) fn inverse_at_most(&self, level: f64, e_max: f64) -> Option<f64> {
        if self.cost(0.0) <= level {
            return Some(0.0);
        }
        if self.cost(e_max) > level {
            return None;
        }
        let (mut lo, mut hi) = (0.0, e_max);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Some(hi);
            }
            if self.cost(mid) > level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
}

impl Default for CostParams {
    fn default() -> Self {
        CostParams::Exponential {
            c0: 4.0,
            lambda: 1.5,
        }
    }
}

/// Distribution of the foreign input price, supported on `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PriceDist {
    Exponential { mean: f64 },
}

impl PriceDist {
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            PriceDist::Exponential { mean } => -(-x / mean).exp_m1(),
        }
    }

    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        match *self {
            PriceDist::Exponential { mean } => (-x / mean).exp(),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match *self {
            PriceDist::Exponential { mean } => (-x / mean).exp() / mean,
        }
    }
}

impl Default for PriceDist {
    fn default() -> Self {
        PriceDist::Exponential { mean: 5.0 }
    }
}

/// Serializable description of the game; validated into [`ModelPrimitives`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub alpha: f64,
    pub t: f64,
    pub tau: f64,
    pub k_fixed: f64,
    #[serde(default)]
    pub value_params: ValueParams,
    #[serde(default)]
    pub cost_params: CostParams,
    #[serde(default)]
    pub price_dist: PriceDist,
    pub e_max: f64,
    #[serde(default)]
    pub constrained_variant: bool,
}

impl ModelConfig {
    /// α = 0.5, t = 1, τ = 0, K = 0.5, e ∈ [0, 6] with the default families.
    pub fn canonical() -> Self {
        Self {
            alpha: 0.5,
            t: 1.0,
            tau: 0.0,
            k_fixed: 0.5,
            value_params: ValueParams::default(),
            cost_params: CostParams::default(),
            price_dist: PriceDist::default(),
            e_max: 6.0,
            constrained_variant: false,
        }
    }
}

/// Validated primitives of the bargaining game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ModelPrimitives {
    cfg: ModelConfig,
}

const SHAPE_GRID: usize = 32;
const SHAPE_STEP: f64 = 1e-4;

impl ModelPrimitives {
    pub fn new(cfg: ModelConfig) -> Result<Self> {
        let bad = |msg: String| Err(ModelError::InvalidPrimitives(msg));
        let finite = [cfg.alpha, cfg.t, cfg.tau, cfg.k_fixed, cfg.e_max];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("non-finite scalar parameter".into());
        }
        if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", cfg.alpha));
        }
        if cfg.t < 0.0 || cfg.tau < 0.0 {
            return bad(format!("tariffs must be nonnegative, got t = {}, tau = {}", cfg.t, cfg.tau));
        }
        if cfg.k_fixed < 0.0 {
            return bad(format!("k_fixed must be nonnegative, got {}", cfg.k_fixed));
        }
        if cfg.e_max <= 0.0 {
            return bad(format!("e_max must be positive, got {}", cfg.e_max));
        }

        // V strictly decreasing and concave, checked by finite differences.
        let v = cfg.value_params;
        let t_hi = cfg.t.max(2.0);
        for i in 0..=SHAPE_GRID {
            let t = t_hi * i as f64 / SHAPE_GRID as f64;
            let h = SHAPE_STEP;
            let d1 = (v.value(t + h) - v.value(t - h)) / (2.0 * h);
            let d2 = (v.value(t + h) - 2.0 * v.value(t) + v.value(t - h)) / (h * h);
            if !(d1 < 0.0) {
                return bad(format!("V must be strictly decreasing; V'({t}) = {d1}"));
            }
            if !(d2 < 0.0) {
                return bad(format!("V must be strictly concave; V''({t}) = {d2}"));
            }
        }

        let c = cfg.cost_params;
        let mut prev = c.cost(0.0);
        for i in 1..=SHAPE_GRID {
            let e = cfg.e_max * i as f64 / SHAPE_GRID as f64;
            let ce = c.cost(e);
            if !(ce < prev) {
                return bad(format!("c must be strictly decreasing on [0, e_max]; c({e}) = {ce}"));
            }
            prev = ce;
        }
        if !(c.cost(cfg.e_max) > 0.0) {
            return bad(format!("c(e_max) must be positive, got {}", c.cost(cfg.e_max)));
        }

        let f = cfg.price_dist;
        let PriceDist::Exponential { mean } = f;
        if !(mean > 0.0 && mean.is_finite()) {
            return bad(format!("price distribution mean must be positive, got {mean}"));
        }
        if f.cdf(0.0) != 0.0 {
            return bad("F(0) must be 0".into());
        }
        let mut prev = 0.0;
        for i in 1..=SHAPE_GRID {
            let x = mean * 0.5 * i as f64;
            let fx = f.cdf(x);
            if fx < prev {
                return bad(format!("F must be nondecreasing; F({x}) = {fx}"));
            }
            prev = fx;
        }
        if f.cdf(1e6 * mean) < 1.0 - 1e-9 {
            return bad("F(x) must tend to 1".into());
        }

        Ok(Self { cfg })
    }

    pub fn canonical() -> Self {
        Self::new(ModelConfig::canonical()).expect("canonical parameterization is valid")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Self::new(serde_json::from_str(json)?)
    }

    pub fn config(&self) -> &ModelConfig {
        &self.cfg
    }

    pub fn alpha(&self) -> f64 {
        self.cfg.alpha
    }
    pub fn t(&self) -> f64 {
        self.cfg.t
    }
    pub fn tau(&self) -> f64 {
        self.cfg.tau
    }
    pub fn k_fixed(&self) -> f64 {
        self.cfg.k_fixed
    }
    pub fn e_max(&self) -> f64 {
        self.cfg.e_max
    }
    pub fn constrained(&self) -> bool {
        self.cfg.constrained_variant
    }
    pub fn price_dist(&self) -> &PriceDist {
        &self.cfg.price_dist
    }

    pub fn value(&self) -> f64 {
        self.cfg.value_params.value(self.cfg.t)
    }

    pub fn cost(&self, e: f64) -> f64 {
        self.cfg.cost_params.cost(e)
    }

    pub fn marginal_cost(&self, e: f64) -> f64 {
        self.cfg.cost_params.marginal_cost(e)
    }

    /// Rebuilds with a new bargaining weight, revalidating.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(ModelConfig { alpha, ..self.cfg })
    }

    pub fn with_tariffs(&self, t: f64, tau: f64) -> Result<Self> {
        Self::new(ModelConfig { t, tau, ..self.cfg })
    }

    pub fn with_k_fixed(&self, k_fixed: f64) -> Result<Self> {
        Self::new(ModelConfig { k_fixed, ..self.cfg })
    }

    pub fn with_constrained(&self, constrained_variant: bool) -> Self {
        Self {
            cfg: ModelConfig {
                constrained_variant,
                ..self.cfg
            },
        }
    }

    /// Finite-difference probes may step just outside `t, τ >= 0`; the
    /// functional forms are defined there.
    pub(crate) fn probe(&self, t: f64, tau: f64) -> Self {
        Self {
            cfg: ModelConfig { t, tau, ..self.cfg },
        }
    }

    pub(crate) fn check_investment(&self, e: f64) -> Result<()> {
        if e.is_finite() && (0.0..=self.cfg.e_max).contains(&e) {
            Ok(())
        } else {
            Err(ModelError::Domain {
                name: "e",
                value: e,
                domain: format!("[0, {}]", self.cfg.e_max),
            })
        }
    }
}
