//! Two-firm hold-up model of sourcing and vertical integration.
//!
//! A domestic supplier invests `e` to lower its cost `c(e)` of a specialized
//! input; the downstream buyer can instead import a standardized input at a
//! random price `p_f` plus an upstream tariff `τ`. The input is worth `V(t)` to
//! the buyer, where `t` is the downstream tariff. Without integration the
//! domestic price is set by Nash bargaining with seller weight `α`; with
//! integration the merged firm picks the cheaper source and invests to
//! maximize joint surplus.
//!
//! [`bargain`] holds the game itself (prices, sourcing cases, expected
//! profits, optimal investment, the integration decision) and [`statics`]
//! computes comparative statics of the integration premium `ΔU` with respect
//! to both tariffs, plus grid sweeps that score the model's hypotheses.

pub mod bargain;
pub mod error;
pub mod exec;
pub mod primitives;
pub mod quadrature;
pub mod roots;
pub mod statics;

pub use bargain::{
    buyer_expected_profit, delta_surplus, ex_post_sourcing, integrated_expected_profit,
    organizational_choice, price_schedule, seller_expected_profit, soc_check, solve_investment,
    solve_model, EquilibriumSolution, ModelSolution, OrgChoice, Regime, SocReport, SocStatus,
    SourcingCase,
};
pub use error::{ModelError, Result};
pub use exec::Execution;
pub use primitives::{CostParams, ModelConfig, ModelPrimitives, PriceDist, ValueParams};
