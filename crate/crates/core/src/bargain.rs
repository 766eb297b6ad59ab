//! Price bargaining, ex-post sourcing, expected profits and the investment
//! and integration decisions.
//!
//! Expected values are integrals over the foreign price `p_f` with respect to
//! `F`. Finite pieces use adaptive quadrature; the upper tail beyond
//! `V(t) - τ` has a constant integrand and is taken from the survival function
//! directly. Integration limits are clamped to `[0, ∞)`.
//!
//! When `c(e) > V(t)` there are no gains from domestic trade: the seller earns
//! `-e` and the buyer imports whenever `p_f + τ <= V(t)`.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::primitives::{ModelPrimitives, PriceDist};
use crate::quadrature::Quadrature;
use crate::roots::find_crossings;

/// Subintervals for the sign scan of the first-order condition.
pub const SCAN_INTERVALS: usize = 64;
/// Step of the central second difference used for curvature checks.
pub const SOC_STEP: f64 = 1e-3;
/// A sign change of the first-order condition whose bisected residual
/// exceeds this is a jump (where `c(e)` crosses `V(t)`), not a root.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-6;
/// Differences in `ΔU - K` below this are treated as ties.
pub const CHOICE_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    NonIntegration,
    Integration,
}

/// Which branch of the ex-post sourcing decision a price realization falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourcingCase {
    /// `p_f + τ <= c(e)`: the buyer imports.
    CaseImport,
    /// `c(e) < p_f + τ <= V(t)`: domestic purchase, import is the threat point.
    CaseDomesticInterior,
    /// `p_f + τ > V(t)`: domestic purchase, no credible import threat.
    CaseDomesticCapped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrgChoice {
    Integrate,
    NotIntegrate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    pub regime: Regime,
    pub e_star: f64,
    /// `e_star` is a root of the first-order condition strictly inside the
    /// search interval.
    pub interior: bool,
    /// The constrained variant's `c(e) <= V(t)` restriction binds.
    pub constraint_binding: bool,
    pub foc_residual: f64,
    pub seller_profit: Option<f64>,
    pub buyer_profit: Option<f64>,
    pub total_surplus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSolution {
    pub non_integration: EquilibriumSolution,
    pub integration: EquilibriumSolution,
    pub delta_u: f64,
    pub k_fixed: f64,
    pub choice: OrgChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SocStatus {
    Pass,
    Fail,
    /// No interior root of the first-order condition; the optimum is a corner.
    Boundary,
    /// The objective could not be evaluated.
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SocReport {
    pub regime: Regime,
    pub e: Option<f64>,
    pub second_difference: Option<f64>,
    pub status: SocStatus,
}

/// Scalars of one game instance, with `α` free so that limiting weights can be
/// evaluated directly.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Game {
    pub alpha: f64,
    pub value: f64,
    pub tau: f64,
    pub dist: PriceDist,
    pub quad: Quadrature,
}

impl Game {
    pub fn new(prim: &ModelPrimitives) -> Self {
        Self {
            alpha: prim.alpha(),
            value: prim.value(),
            tau: prim.tau(),
            dist: *prim.price_dist(),
            quad: Quadrature::default(),
        }
    }

    fn import_cutoff(&self, cost: f64) -> f64 {
        (cost - self.tau).max(0.0)
    }

    fn value_cutoff(&self) -> f64 {
        (self.value - self.tau).max(0.0)
    }

    /// `∫_lo^hi g(p) dF(p)`.
    fn expect<G: Fn(f64) -> f64>(&self, g: G, lo: f64, hi: f64) -> Result<f64> {
        let dist = self.dist;
        Ok(self.quad.integrate(|p| g(p) * dist.pdf(p), lo, hi)?)
    }

    /// Buyer payoff from importing over `p_f ∈ [0, hi]`.
    fn import_payoff(&self, hi: f64) -> Result<f64> {
        let (v, tau) = (self.value, self.tau);
        self.expect(|p| v - p - tau, 0.0, hi)
    }

    pub fn seller(&self, cost: f64, e: f64) -> Result<f64> {
        let (v, tau, alpha) = (self.value, self.tau, self.alpha);
        if cost >= v {
            return Ok(-e);
        }
        let (a, b) = (self.import_cutoff(cost), self.value_cutoff());
        let bargained = self.expect(|p| alpha * (p + tau - cost), a, b)?;
        Ok(bargained + alpha * (v - cost) * self.dist.survival(b) - e)
    }

    pub fn buyer(&self, cost: f64) -> Result<f64> {
        let (v, tau, alpha) = (self.value, self.tau, self.alpha);
        if cost >= v {
            return self.import_payoff(self.value_cutoff());
        }
        let (a, b) = (self.import_cutoff(cost), self.value_cutoff());
        let imported = self.import_payoff(a)?;
        let bargained = self.expect(|p| v - alpha * (p + tau) - (1.0 - alpha) * cost, a, b)?;
        Ok(imported + bargained + (1.0 - alpha) * (v - cost) * self.dist.survival(b))
    }

    pub fn integrated(&self, cost: f64, e: f64) -> Result<f64> {
        let v = self.value;
        if cost >= v {
            return Ok(self.import_payoff(self.value_cutoff())? - e);
        }
        let a = self.import_cutoff(cost);
        Ok(self.import_payoff(a)? + (v - cost) * self.dist.survival(a) - e)
    }

    /// `-c'(e)·[1 - F(c(e) - τ)]`: marginal joint return on investment, zero
    /// where the domestic input is never traded.
    pub fn marginal_return(&self, cost: f64, marginal_cost: f64) -> f64 {
        if cost > self.value {
            return 0.0;
        }
        -marginal_cost * self.dist.survival(cost - self.tau)
    }
}

/// Domestic input price from Nash bargaining.
pub fn price_schedule(prim: &ModelPrimitives, e: f64, p_f: f64) -> Result<f64> {
    prim.check_investment(e)?;
    check_price(p_f)?;
    let (alpha, v, cost) = (prim.alpha(), prim.value(), prim.cost(e));
    let landed = p_f + prim.tau();
    Ok(if v >= landed {
        alpha * landed + (1.0 - alpha) * cost
    } else {
        alpha * v + (1.0 - alpha) * cost
    })
}

/// Classifies a foreign price draw into the three sourcing cases.
pub fn ex_post_sourcing(prim: &ModelPrimitives, e: f64, p_f: f64) -> Result<SourcingCase> {
    prim.check_investment(e)?;
    check_price(p_f)?;
    let (v, cost) = (prim.value(), prim.cost(e));
    if cost > v {
        return Err(ModelError::Infeasible { cost, value: v });
    }
    let landed = p_f + prim.tau();
    Ok(if landed <= cost {
        SourcingCase::CaseImport
    } else if landed <= v {
        SourcingCase::CaseDomesticInterior
    } else {
        SourcingCase::CaseDomesticCapped
    })
}

fn check_price(p_f: f64) -> Result<()> {
    if p_f.is_finite() && p_f >= 0.0 {
        Ok(())
    } else {
        Err(ModelError::Domain {
            name: "p_f",
            value: p_f,
            domain: "[0, inf)".into(),
        })
    }
}

/// Seller's expected profit under non-integration, net of investment.
pub fn seller_expected_profit(prim: &ModelPrimitives, e: f64) -> Result<f64> {
    prim.check_investment(e)?;
    Game::new(prim).seller(prim.cost(e), e)
}

/// Buyer's expected profit under non-integration.
pub fn buyer_expected_profit(prim: &ModelPrimitives, e: f64) -> Result<f64> {
    prim.check_investment(e)?;
    Game::new(prim).buyer(prim.cost(e))
}

/// Expected profit of the integrated firm, net of investment.
pub fn integrated_expected_profit(prim: &ModelPrimitives, e: f64) -> Result<f64> {
    prim.check_investment(e)?;
    Game::new(prim).integrated(prim.cost(e), e)
}

pub(crate) fn objective(prim: &ModelPrimitives, regime: Regime, e: f64) -> Result<f64> {
    let game = Game::new(prim);
    let cost = prim.cost(e);
    match regime {
        Regime::NonIntegration => game.seller(cost, e),
        Regime::Integration => game.integrated(cost, e),
    }
}

fn foc_target(prim: &ModelPrimitives, regime: Regime) -> f64 {
    match regime {
        Regime::NonIntegration => 1.0 / prim.alpha(),
        Regime::Integration => 1.0,
    }
}

fn foc(prim: &ModelPrimitives, regime: Regime, e: f64) -> f64 {
    Game::new(prim).marginal_return(prim.cost(e), prim.marginal_cost(e)) - foc_target(prim, regime)
}

/// Investment search interval; under the constrained variant only
/// `{e : c(e) <= V(t)}` is admissible.
fn search_bounds(prim: &ModelPrimitives) -> Result<(f64, f64)> {
    let e_max = prim.e_max();
    if !prim.constrained() {
        return Ok((0.0, e_max));
    }
    let v = prim.value();
    prim.config()
        .cost_params
        .inverse_at_most(v, e_max)
        .map(|lo| (lo, e_max))
        .ok_or(ModelError::Infeasible {
            cost: prim.cost(e_max),
            value: v,
        })
}

/// Second difference of the objective near `e`. The stencil stays on the
/// same side of the trade cutoff `c(e) = V` as `e` and inside the search
/// bounds, shifting off-centre when `e` is within a step of either.
fn second_difference(prim: &ModelPrimitives, regime: Regime, e: f64) -> Result<f64> {
    let (mut lo, mut hi) = search_bounds(prim)?;
    if let Some(kink) = prim.config().cost_params.inverse_at_most(prim.value(), prim.e_max()) {
        if kink > lo && kink < hi {
            if e >= kink {
                lo = kink;
            } else {
                hi = kink;
            }
        }
    }
    let h = SOC_STEP.min(0.5 * (hi - lo));
    let centre = e.clamp(lo + h, hi - h);
    let up = objective(prim, regime, centre + h)?;
    let mid = objective(prim, regime, centre)?;
    let down = objective(prim, regime, centre - h)?;
    Ok((up - 2.0 * mid + down) / (h * h))
}

/// Sign changes of the first-order condition strictly inside `(lo, hi)`,
/// split into genuine roots and jump points.
fn foc_crossings(prim: &ModelPrimitives, regime: Regime, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let (mut roots, mut jumps) = (Vec::new(), Vec::new());
    if hi <= lo {
        return (roots, jumps);
    }
    for c in find_crossings(|e| foc(prim, regime, e), lo, hi, SCAN_INTERVALS) {
        if c.x <= lo || c.x >= hi {
            continue;
        }
        if foc(prim, regime, c.x).abs() <= ROOT_RESIDUAL_TOL {
            roots.push(c.x);
        } else {
            jumps.push(c.x);
        }
    }
    (roots, jumps)
}

/// Optimal investment for `regime`.
///
/// Every sign change of the first-order condition is located by a uniform
/// scan and bisection. A root at which the objective is locally convex is an
/// error. The remaining roots, any jump points and both interval endpoints
/// are compared on the objective itself.
pub fn solve_investment(prim: &ModelPrimitives, regime: Regime) -> Result<EquilibriumSolution> {
    let (lo, hi) = search_bounds(prim)?;
    let (roots, jumps) = foc_crossings(prim, regime, lo, hi);
    for &e in &roots {
        let sd = second_difference(prim, regime, e)?;
        if !(sd < 0.0) {
            return Err(ModelError::SocFailure {
                regime,
                e,
                second_difference: sd,
            });
        }
    }

    let mut best: Option<(f64, f64, bool)> = None;
    let candidates = roots
        .iter()
        .map(|&e| (e, true))
        .chain(jumps.iter().map(|&e| (e, false)))
        .chain([(lo, false), (hi, false)]);
    for (e, is_root) in candidates {
        let value = objective(prim, regime, e)?;
        if !value.is_finite() {
            continue;
        }
        if best.map_or(true, |(_, v, _)| value > v) {
            best = Some((e, value, is_root));
        }
    }
    let (e_star, _, interior) = best.ok_or(ModelError::NoMaximum(regime))?;
    let constraint_binding = prim.constrained() && !interior && e_star == lo && lo > 0.0;
    build_solution(prim, regime, e_star, interior, constraint_binding)
}

fn build_solution(
    prim: &ModelPrimitives,
    regime: Regime,
    e_star: f64,
    interior: bool,
    constraint_binding: bool,
) -> Result<EquilibriumSolution> {
    let game = Game::new(prim);
    let cost = prim.cost(e_star);
    let (seller_profit, buyer_profit, total_surplus) = match regime {
        Regime::NonIntegration => {
            let s = game.seller(cost, e_star)?;
            let b = game.buyer(cost)?;
            (Some(s), Some(b), s + b)
        }
        Regime::Integration => (None, None, game.integrated(cost, e_star)?),
    };
    Ok(EquilibriumSolution {
        regime,
        e_star,
        interior,
        constraint_binding,
        foc_residual: foc(prim, regime, e_star),
        seller_profit,
        buyer_profit,
        total_surplus,
    })
}

/// `U^v - U^n` at the respective optimal investments.
pub fn delta_surplus(prim: &ModelPrimitives) -> Result<f64> {
    let n = solve_investment(prim, Regime::NonIntegration)?;
    let v = solve_investment(prim, Regime::Integration)?;
    Ok(v.total_surplus - n.total_surplus)
}

/// Integrate iff `ΔU > K`; ties resolve to not integrating.
pub fn organizational_choice(prim: &ModelPrimitives) -> Result<OrgChoice> {
    Ok(choose(delta_surplus(prim)?, prim.k_fixed()))
}

fn choose(delta_u: f64, k_fixed: f64) -> OrgChoice {
    if delta_u - k_fixed > CHOICE_TIE_TOL {
        OrgChoice::Integrate
    } else {
        OrgChoice::NotIntegrate
    }
}

/// Both regimes, the integration premium and the resulting choice.
pub fn solve_model(prim: &ModelPrimitives) -> Result<ModelSolution> {
    let non_integration = solve_investment(prim, Regime::NonIntegration)?;
    let integration = solve_investment(prim, Regime::Integration)?;
    let delta_u = integration.total_surplus - non_integration.total_surplus;
    Ok(ModelSolution {
        non_integration,
        integration,
        delta_u,
        k_fixed: prim.k_fixed(),
        choice: choose(delta_u, prim.k_fixed()),
    })
}

/// Curvature of the regime objective at its first-order root.
pub fn soc_check(prim: &ModelPrimitives, regime: Regime) -> SocReport {
    let undetermined = SocReport {
        regime,
        e: None,
        second_difference: None,
        status: SocStatus::Undetermined,
    };
    let Ok((lo, hi)) = search_bounds(prim) else {
        return undetermined;
    };
    let (roots, _) = foc_crossings(prim, regime, lo, hi);
    if roots.is_empty() {
        let e = match solve_investment(prim, regime) {
            Ok(sol) => Some(sol.e_star),
            Err(_) => None,
        };
        return SocReport {
            regime,
            e,
            second_difference: None,
            status: SocStatus::Boundary,
        };
    }
    // Report the least concave root.
    let mut worst: Option<(f64, f64)> = None;
    for e in roots {
        match second_difference(prim, regime, e) {
            Ok(sd) if worst.map_or(true, |(_, w)| sd > w) => worst = Some((e, sd)),
            Ok(_) => {}
            Err(_) => return SocReport { e: Some(e), ..undetermined },
        }
    }
    let (e, sd) = worst.expect("nonempty roots");
    SocReport {
        regime,
        e: Some(e),
        second_difference: Some(sd),
        status: if sd < 0.0 { SocStatus::Pass } else { SocStatus::Fail },
    }
}
