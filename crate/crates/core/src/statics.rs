//! Comparative statics of the integration premium `ΔU = U^v - U^n`.
//!
//! By the envelope theorem only the buyer's exposure to the seller's
//! investment survives in `∂ΔU/∂t` and `∂ΔU/∂τ`, and since
//! `∂U^n/∂e = (1-α)/α` at an interior `e^n`:
//!
//! ```text
//! ∂ΔU/∂t = -(1-α)/α · ∂e^n/∂t
//! ∂ΔU/∂τ = F(c(e^n) - τ) - F(c(e^v) - τ) - (1-α)/α · ∂e^n/∂τ
//! ```
//!
//! The investment responses are central differences of the solver. Every
//! analytic value is reported next to a central difference of `ΔU` itself.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bargain::{solve_investment, EquilibriumSolution, Regime};
use crate::error::{ModelError, Result};
use crate::exec::Execution;
use crate::primitives::{ModelConfig, ModelPrimitives};

/// Step for differences of the optimal investment.
pub const INVESTMENT_STEP: f64 = 1e-4;
/// Step for differences of `ΔU`.
pub const SURPLUS_STEP: f64 = 1e-3;

/// `(f(x + h) - f(x - h)) / 2h`.
pub fn fd_derivative<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(h > 0.0) || !h.is_finite() {
        return Err(ModelError::InvalidStep(h));
    }
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

/// `(1-α)/α`.
pub fn bargaining_prefactor(alpha: f64) -> f64 {
    (1.0 - alpha) / alpha
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Unconstrained,
    Constrained,
}

impl Variant {
    pub fn apply(self, prim: &ModelPrimitives) -> ModelPrimitives {
        prim.with_constrained(self == Variant::Constrained)
    }

    pub fn label(self) -> &'static str {
        match self {
            Variant::Unconstrained => "unconstrained",
            Variant::Constrained => "constrained",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Steps {
    pub investment: f64,
    pub surplus: f64,
}

impl Default for Steps {
    fn default() -> Self {
        Self {
            investment: INVESTMENT_STEP,
            surplus: SURPLUS_STEP,
        }
    }
}

fn solve_at(prim: &ModelPrimitives, regime: Regime, t: f64, tau: f64) -> Result<EquilibriumSolution> {
    solve_investment(&prim.probe(t, tau), regime)
}

fn delta_u_at(prim: &ModelPrimitives, t: f64, tau: f64) -> Result<f64> {
    let p = prim.probe(t, tau);
    let n = solve_investment(&p, Regime::NonIntegration)?;
    let v = solve_investment(&p, Regime::Integration)?;
    Ok(v.total_surplus - n.total_surplus)
}

/// `∂e^n/∂t` by central difference with step `h`.
pub fn d_en_dt(prim: &ModelPrimitives, h: f64) -> Result<f64> {
    let tau = prim.tau();
    fd_derivative(|t| Ok(solve_at(prim, Regime::NonIntegration, t, tau)?.e_star), prim.t(), h)
}

/// `∂e^n/∂τ` by central difference with step `h`.
pub fn d_en_dtau(prim: &ModelPrimitives, h: f64) -> Result<f64> {
    let t = prim.t();
    fd_derivative(|tau| Ok(solve_at(prim, Regime::NonIntegration, t, tau)?.e_star), prim.tau(), h)
}

/// Central difference of `ΔU` in `t`.
pub fn delta_u_slope_t(prim: &ModelPrimitives, h: f64) -> Result<f64> {
    let tau = prim.tau();
    fd_derivative(|t| delta_u_at(prim, t, tau), prim.t(), h)
}

/// Central difference of `ΔU` in `τ`.
pub fn delta_u_slope_tau(prim: &ModelPrimitives, h: f64) -> Result<f64> {
    let t = prim.t();
    fd_derivative(|tau| delta_u_at(prim, t, tau), prim.tau(), h)
}

/// An equilibrium is usable for the decomposition when it solves the
/// first-order condition or sits on the binding `c(e) <= V(t)` constraint.
fn require_evaluable(sol: &EquilibriumSolution) -> Result<()> {
    if sol.interior || sol.constraint_binding {
        Ok(())
    } else {
        Err(ModelError::NonInterior {
            regime: sol.regime,
            e: sol.e_star,
        })
    }
}

/// Analytic `∂ΔU/∂t`.
pub fn d_delta_u_dt(prim: &ModelPrimitives) -> Result<f64> {
    require_evaluable(&solve_investment(prim, Regime::NonIntegration)?)?;
    require_evaluable(&solve_investment(prim, Regime::Integration)?)?;
    Ok(-bargaining_prefactor(prim.alpha()) * d_en_dt(prim, INVESTMENT_STEP)?)
}

/// Analytic `∂ΔU/∂τ`.
pub fn d_delta_u_dtau(prim: &ModelPrimitives) -> Result<f64> {
    let n = solve_investment(prim, Regime::NonIntegration)?;
    let v = solve_investment(prim, Regime::Integration)?;
    require_evaluable(&n)?;
    require_evaluable(&v)?;
    Ok(tau_slope(prim, &n, &v, d_en_dtau(prim, INVESTMENT_STEP)?))
}

fn tau_slope(prim: &ModelPrimitives, n: &EquilibriumSolution, v: &EquilibriumSolution, den_dtau: f64) -> f64 {
    let f = prim.price_dist();
    let tau = prim.tau();
    f.cdf(prim.cost(n.e_star) - tau) - f.cdf(prim.cost(v.e_star) - tau)
        - bargaining_prefactor(prim.alpha()) * den_dtau
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Ok,
    SocFailure,
    Infeasible,
    Error,
}

/// Comparative statics at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticsReport {
    pub variant: Variant,
    pub alpha: f64,
    pub t: f64,
    pub tau: f64,
    pub status: PointStatus,
    pub soc_ok: bool,
    pub e_n: Option<f64>,
    pub e_v: Option<f64>,
    pub interior_n: bool,
    pub interior_v: bool,
    pub binding_n: bool,
    pub binding_v: bool,
    /// `c(e^n) > τ`: imports win with positive probability at `e^n`.
    pub import_active: bool,
    pub delta_u: Option<f64>,
    pub d_en_dt_fd: Option<f64>,
    pub d_en_dtau_fd: Option<f64>,
    pub d_delta_u_dt_analytic: Option<f64>,
    pub d_delta_u_dt_fd: Option<f64>,
    pub d_delta_u_dtau_analytic: Option<f64>,
    pub d_delta_u_dtau_fd: Option<f64>,
    pub message: Option<String>,
}

impl StaticsReport {
    /// Both regimes solve their first-order conditions and pass the SOC.
    pub fn interior_soc(&self) -> bool {
        self.soc_ok && self.interior_n && self.interior_v
    }

    /// Both regimes are interior or constraint-bound.
    pub fn evaluable(&self) -> bool {
        self.soc_ok && (self.interior_n || self.binding_n) && (self.interior_v || self.binding_v)
    }

    fn blank(variant: Variant, alpha: f64, t: f64, tau: f64) -> Self {
        Self {
            variant,
            alpha,
            t,
            tau,
            status: PointStatus::Ok,
            soc_ok: false,
            e_n: None,
            e_v: None,
            interior_n: false,
            interior_v: false,
            binding_n: false,
            binding_v: false,
            import_active: false,
            delta_u: None,
            d_en_dt_fd: None,
            d_en_dtau_fd: None,
            d_delta_u_dt_analytic: None,
            d_delta_u_dt_fd: None,
            d_delta_u_dtau_analytic: None,
            d_delta_u_dtau_fd: None,
            message: None,
        }
    }
}

/// Solves both regimes at `prim` and, where the decomposition applies, all
/// derivatives.
pub fn evaluate_point(prim: &ModelPrimitives, variant: Variant, steps: Steps) -> StaticsReport {
    let prim = variant.apply(prim);
    let mut r = StaticsReport::blank(variant, prim.alpha(), prim.t(), prim.tau());
    let fail = |mut r: StaticsReport, err: ModelError| {
        r.status = match err {
            ModelError::SocFailure { .. } => PointStatus::SocFailure,
            ModelError::Infeasible { .. } => PointStatus::Infeasible,
            _ => PointStatus::Error,
        };
        r.soc_ok = !matches!(err, ModelError::SocFailure { .. });
        r.message = Some(err.to_string());
        r
    };
    let solved = solve_investment(&prim, Regime::NonIntegration)
        .and_then(|n| Ok((n, solve_investment(&prim, Regime::Integration)?)));
    let (n, v) = match solved {
        Ok(pair) => pair,
        Err(err) => return fail(r, err),
    };
    r.soc_ok = true;
    r.e_n = Some(n.e_star);
    r.e_v = Some(v.e_star);
    r.interior_n = n.interior;
    r.interior_v = v.interior;
    r.binding_n = n.constraint_binding;
    r.binding_v = v.constraint_binding;
    r.import_active = prim.cost(n.e_star) > prim.tau();
    r.delta_u = Some(v.total_surplus - n.total_surplus);
    if !r.evaluable() {
        return r;
    }
    let derivatives = (|| -> Result<[f64; 4]> {
        Ok([
            d_en_dt(&prim, steps.investment)?,
            d_en_dtau(&prim, steps.investment)?,
            delta_u_slope_t(&prim, steps.surplus)?,
            delta_u_slope_tau(&prim, steps.surplus)?,
        ])
    })();
    match derivatives {
        Ok([den_dt, den_dtau, du_dt, du_dtau]) => {
            r.d_en_dt_fd = Some(den_dt);
            r.d_en_dtau_fd = Some(den_dtau);
            r.d_delta_u_dt_analytic = Some(-bargaining_prefactor(prim.alpha()) * den_dt);
            r.d_delta_u_dtau_analytic = Some(tau_slope(&prim, &n, &v, den_dtau));
            r.d_delta_u_dt_fd = Some(du_dt);
            r.d_delta_u_dtau_fd = Some(du_dtau);
            r
        }
        Err(err) => fail(r, err),
    }
}

/// Inclusive arithmetic grid `start, start + step, ..., stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !(self.stop >= self.start) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(ModelError::EmptyGrid(format!("{self:?}")));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| self.start + self.step * i as f64).collect())
    }
}

fn default_alphas() -> Vec<f64> {
    vec![0.3, 0.5, 0.7]
}
fn default_tariff_range() -> Range {
    Range {
        start: 0.0,
        stop: 2.0,
        step: 0.25,
    }
}
fn default_variants() -> Vec<Variant> {
    vec![Variant::Unconstrained, Variant::Constrained]
}

/// Sweep definition. Every field has a default, so `{}` is the default grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub base: ModelConfig,
    pub alphas: Vec<f64>,
    pub t: Range,
    pub tau: Range,
    pub variants: Vec<Variant>,
    pub steps: Steps,
    pub execution: Execution,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            base: ModelConfig::canonical(),
            alphas: default_alphas(),
            t: default_tariff_range(),
            tau: default_tariff_range(),
            variants: default_variants(),
            steps: Steps::default(),
            execution: Execution::default(),
        }
    }
}

impl GridSpec {
    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    /// Validated primitives for every grid point, variant-major.
    pub fn points(&self) -> Result<Vec<(ModelPrimitives, Variant)>> {
        let (ts, taus) = (self.t.values()?, self.tau.values()?);
        if self.alphas.is_empty() || self.variants.is_empty() {
            return Err(ModelError::EmptyGrid("no alphas or no variants".into()));
        }
        let base = ModelPrimitives::new(self.base)?;
        let mut out = Vec::with_capacity(self.variants.len() * self.alphas.len() * ts.len() * taus.len());
        for &variant in &self.variants {
            for &alpha in &self.alphas {
                for &t in &ts {
                    for &tau in &taus {
                        let p = base.with_alpha(alpha)?.with_tariffs(t, tau)?;
                        out.push((p, variant));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Grid-fraction verdicts for one variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantVerdict {
    pub variant: Variant,
    pub points: usize,
    pub interior_soc_points: usize,
    pub evaluable_points: usize,
    pub binding_points: usize,
    pub soc_failures: usize,
    pub errors: usize,
    pub ordering_violations: usize,
    /// Largest relative gap between analytic and differenced `∂ΔU/∂t`,
    /// `∂ΔU/∂τ` over interior SOC-passing points.
    pub max_gap_dt: f64,
    pub max_gap_dtau: f64,
    /// Evaluable points with `∂ΔU/∂t < -ZERO_SLOPE`.
    pub dt_negative: usize,
    /// Evaluable points with `|∂ΔU/∂t| <= ZERO_SLOPE`.
    pub dt_zero: usize,
    /// Points where the seller's investment sits on the feasibility bound,
    /// and those among them where both `∂ΔU/∂t` values are negative.
    pub binding_n_points: usize,
    pub binding_n_negative: usize,
    /// Evaluable points with `∂ΔU/∂τ < 0`.
    pub dtau_negative: usize,
    /// Interior SOC-passing points with `∂e^n/∂τ > 0`, and those among them
    /// where the import cutoff is active.
    pub en_tau_positive: usize,
    pub import_active_points: usize,
    pub en_tau_positive_import_active: usize,
    /// `(t, τ)` cells with every α evaluable, and those where `|∂ΔU/∂t|`
    /// strictly increases as α falls.
    pub alpha_cells: usize,
    pub alpha_monotone_cells: usize,
    /// `(1-α_lo)/α_lo ÷ (1-α_hi)/α_hi` over the grid's extreme weights.
    pub prefactor_ratio: f64,
}

impl VariantVerdict {
    pub fn fraction(count: usize, of: usize) -> f64 {
        if of == 0 {
            0.0
        } else {
            count as f64 / of as f64
        }
    }
    pub fn dt_negative_fraction(&self) -> f64 {
        Self::fraction(self.dt_negative, self.evaluable_points)
    }
    pub fn dtau_negative_fraction(&self) -> f64 {
        Self::fraction(self.dtau_negative, self.evaluable_points)
    }
    pub fn en_tau_fraction(&self) -> f64 {
        Self::fraction(self.en_tau_positive, self.interior_soc_points)
    }
    pub fn alpha_monotone_fraction(&self) -> f64 {
        Self::fraction(self.alpha_monotone_cells, self.alpha_cells)
    }
}

/// `∂ΔU/∂t` values within this of zero count as zero.
pub const ZERO_SLOPE: f64 = 1e-6;

/// Absolute differences at or below this are rounding noise: central
/// differences of `O(1)` surpluses carry about `ε·|U|/h ≈ 1e-12` of it.
pub const ZERO_FLOOR: f64 = 1e-9;

/// `|a - b| / max(|a|, |b|)`, or zero when `|a - b| <= ZERO_FLOOR`.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    if (a - b).abs() <= ZERO_FLOOR {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub verdicts: Vec<VariantVerdict>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub reports: Vec<StaticsReport>,
    pub summary: SweepSummary,
}

pub fn hypothesis_sweep(spec: &GridSpec) -> Result<SweepOutput> {
    let points = spec.points()?;
    let steps = spec.steps;
    let reports = spec
        .execution
        .map(&points, |(p, variant)| evaluate_point(p, *variant, steps));
    let summary = summarize(&reports, &spec.variants);
    Ok(SweepOutput { reports, summary })
}

fn verdict_for(variant: Variant, reports: &[&StaticsReport]) -> VariantVerdict {
    let interior: Vec<_> = reports.iter().filter(|r| r.interior_soc()).collect();
    let evaluable: Vec<_> = reports.iter().filter(|r| r.evaluable()).collect();
    let count = |it: &Vec<&&StaticsReport>, f: &dyn Fn(&StaticsReport) -> bool| it.iter().filter(|r| f(r)).count();
    let gap = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) => relative_gap(a, b),
        _ => f64::NAN,
    };

    let mut cells: BTreeMap<(u64, u64), Vec<&StaticsReport>> = BTreeMap::new();
    for r in reports {
        cells.entry((r.t.to_bits(), r.tau.to_bits())).or_default().push(r);
    }
    let alphas: Vec<f64> = {
        let mut a: Vec<f64> = reports.iter().map(|r| r.alpha).collect();
        a.sort_by(f64::total_cmp);
        a.dedup();
        a
    };
    let (mut alpha_cells, mut alpha_monotone) = (0, 0);
    for cell in cells.values() {
        if cell.len() != alphas.len() || !cell.iter().all(|r| r.evaluable()) {
            continue;
        }
        alpha_cells += 1;
        let mut by_alpha: Vec<&&StaticsReport> = cell.iter().collect();
        by_alpha.sort_by(|a, b| b.alpha.total_cmp(&a.alpha));
        let mags: Vec<f64> = by_alpha
            .iter()
            .map(|r| r.d_delta_u_dt_analytic.map_or(f64::NAN, f64::abs))
            .collect();
        if mags.windows(2).all(|w| w[1] > w[0]) {
            alpha_monotone += 1;
        }
    }
    let prefactor_ratio = match (alphas.first(), alphas.last()) {
        (Some(&lo), Some(&hi)) => bargaining_prefactor(lo) / bargaining_prefactor(hi),
        _ => f64::NAN,
    };

    VariantVerdict {
        variant,
        points: reports.len(),
        interior_soc_points: interior.len(),
        evaluable_points: evaluable.len(),
        binding_points: reports.iter().filter(|r| r.binding_n || r.binding_v).count(),
        soc_failures: reports.iter().filter(|r| r.status == PointStatus::SocFailure).count(),
        errors: reports
            .iter()
            .filter(|r| matches!(r.status, PointStatus::Error | PointStatus::Infeasible))
            .count(),
        ordering_violations: count(&interior, &|r| !(r.e_v > r.e_n)),
        max_gap_dt: interior
            .iter()
            .map(|r| gap(r.d_delta_u_dt_analytic, r.d_delta_u_dt_fd))
            .fold(0.0, f64::max),
        max_gap_dtau: interior
            .iter()
            .map(|r| gap(r.d_delta_u_dtau_analytic, r.d_delta_u_dtau_fd))
            .fold(0.0, f64::max),
        dt_negative: count(&evaluable, &|r| r.d_delta_u_dt_analytic.is_some_and(|d| d < -ZERO_SLOPE)),
        dt_zero: count(&evaluable, &|r| r.d_delta_u_dt_analytic.is_some_and(|d| d.abs() <= ZERO_SLOPE)),
        binding_n_points: reports.iter().filter(|r| r.binding_n).count(),
        binding_n_negative: reports
            .iter()
            .filter(|r| {
                r.binding_n
                    && r.d_delta_u_dt_analytic.is_some_and(|d| d < 0.0)
                    && r.d_delta_u_dt_fd.is_some_and(|d| d < 0.0)
            })
            .count(),
        dtau_negative: count(&evaluable, &|r| r.d_delta_u_dtau_analytic.is_some_and(|d| d < 0.0)),
        en_tau_positive: count(&interior, &|r| r.d_en_dtau_fd.is_some_and(|d| d > 0.0)),
        import_active_points: count(&interior, &|r| r.import_active),
        en_tau_positive_import_active: count(&interior, &|r| {
            r.import_active && r.d_en_dtau_fd.is_some_and(|d| d > 0.0)
        }),
        alpha_cells,
        alpha_monotone_cells: alpha_monotone,
        prefactor_ratio,
    }
}

pub fn summarize(reports: &[StaticsReport], variants: &[Variant]) -> SweepSummary {
    let verdicts = variants
        .iter()
        .map(|&variant| {
            let subset: Vec<&StaticsReport> = reports.iter().filter(|r| r.variant == variant).collect();
            verdict_for(variant, &subset)
        })
        .collect();
    SweepSummary { verdicts }
}

pub mod render {
    //! CSV and Markdown renderings of sweep output.

    use super::*;
    use std::fmt::Write as _;

    pub const CSV_COLUMNS: [&str; 21] = [
        "variant",
        "alpha",
        "t",
        "tau",
        "status",
        "soc_ok",
        "e_n",
        "e_v",
        "interior_n",
        "interior_v",
        "binding_n",
        "binding_v",
        "import_active",
        "delta_u",
        "d_en_dt_fd",
        "d_en_dtau_fd",
        "d_delta_u_dt_analytic",
        "d_delta_u_dt_fd",
        "d_delta_u_dtau_analytic",
        "d_delta_u_dtau_fd",
        "message",
    ];

    fn num(v: Option<f64>) -> String {
        v.map(|x| x.to_string()).unwrap_or_default()
    }

    fn status(s: PointStatus) -> &'static str {
        match s {
            PointStatus::Ok => "ok",
            PointStatus::SocFailure => "soc_failure",
            PointStatus::Infeasible => "infeasible",
            PointStatus::Error => "error",
        }
    }

    /// One row per grid point, header first.
    pub fn reports_csv(reports: &[StaticsReport]) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_COLUMNS).expect("in-memory write");
        for r in reports {
            w.write_record([
                r.variant.label().to_string(),
                r.alpha.to_string(),
                r.t.to_string(),
                r.tau.to_string(),
                status(r.status).to_string(),
                r.soc_ok.to_string(),
                num(r.e_n),
                num(r.e_v),
                r.interior_n.to_string(),
                r.interior_v.to_string(),
                r.binding_n.to_string(),
                r.binding_v.to_string(),
                r.import_active.to_string(),
                num(r.delta_u),
                num(r.d_en_dt_fd),
                num(r.d_en_dtau_fd),
                num(r.d_delta_u_dt_analytic),
                num(r.d_delta_u_dt_fd),
                num(r.d_delta_u_dtau_analytic),
                num(r.d_delta_u_dtau_fd),
                r.message.clone().unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn summary_markdown(summary: &SweepSummary) -> String {
        let mut s = String::from("# Comparative statics verdicts\n\n");
        let mut row = |label: &str, cells: Vec<String>| {
            let _ = writeln!(s, "| {label} | {} |", cells.join(" | "));
        };
        let v = &summary.verdicts;
        row("", v.iter().map(|x| x.variant.label().to_string()).collect());
        row("---", v.iter().map(|_| "---".to_string()).collect());
        let frac = |f: f64| format!("{f:.3}");
        row("grid points", v.iter().map(|x| x.points.to_string()).collect());
        row("interior, SOC-passing", v.iter().map(|x| x.interior_soc_points.to_string()).collect());
        row("evaluable (interior or binding)", v.iter().map(|x| x.evaluable_points.to_string()).collect());
        row("constraint binding", v.iter().map(|x| x.binding_points.to_string()).collect());
        row("SOC failures", v.iter().map(|x| x.soc_failures.to_string()).collect());
        row("errors", v.iter().map(|x| x.errors.to_string()).collect());
        row("points with e^v <= e^n", v.iter().map(|x| x.ordering_violations.to_string()).collect());
        row("max rel. gap dΔU/dt, analytic vs FD", v.iter().map(|x| format!("{:.2e}", x.max_gap_dt)).collect());
        row("max rel. gap dΔU/dτ, analytic vs FD", v.iter().map(|x| format!("{:.2e}", x.max_gap_dtau)).collect());
        row("share with dΔU/dt < 0", v.iter().map(|x| frac(x.dt_negative_fraction())).collect());
        row("share with dΔU/dt = 0 (1e-6)", v.iter().map(|x| frac(VariantVerdict::fraction(x.dt_zero, x.evaluable_points))).collect());
        row(
            "dΔU/dt < 0 where e^n is on the bound",
            v.iter().map(|x| format!("{}/{}", x.binding_n_negative, x.binding_n_points)).collect(),
        );
        row("share with dΔU/dτ < 0", v.iter().map(|x| frac(x.dtau_negative_fraction())).collect());
        row("share with de^n/dτ > 0", v.iter().map(|x| frac(x.en_tau_fraction())).collect());
        row(
            "de^n/dτ > 0 where c(e^n) > τ",
            v.iter()
                .map(|x| format!("{}/{}", x.en_tau_positive_import_active, x.import_active_points))
                .collect(),
        );
        row("cells with abs(dΔU/dt) rising as α falls", v.iter().map(|x| format!("{}/{}", x.alpha_monotone_cells, x.alpha_cells)).collect());
        row("prefactor ratio (1-α)/α, min α over max α", v.iter().map(|x| format!("{:.6}", x.prefactor_ratio)).collect());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_of_quadratic_and_exp() {
        let d = fd_derivative(|x| Ok(x * x), 3.0, 1e-4).unwrap();
        assert!((d - 6.0).abs() < 1e-8);
        assert_eq!(fd_derivative(|_| Ok(4.2), 1.0, 1e-4).unwrap(), 0.0);
        let d = fd_derivative(|x: f64| Ok(x.exp()), 0.0, 1e-4).unwrap();
        assert!((d - 1.0).abs() < 1e-8);
    }

    #[test]
    fn fd_rejects_bad_steps_and_propagates_errors() {
        assert!(fd_derivative(|x| Ok(x), 0.0, 0.0).is_err());
        assert!(fd_derivative(|x| Ok(x), 0.0, -1.0).is_err());
        let failing = |x: f64| if x > 0.0 { Err(ModelError::NoMaximum(Regime::Integration)) } else { Ok(x) };
        assert!(fd_derivative(failing, 0.0, 1e-3).is_err());
    }

    #[test]
    fn prefactor_ratio_between_extreme_weights() {
        let ratio = bargaining_prefactor(0.3) / bargaining_prefactor(0.7);
        assert!((ratio - (0.7 / 0.3) / (0.3 / 0.7)).abs() < 1e-12);
    }

    #[test]
    fn range_is_inclusive() {
        let r = default_tariff_range().values().unwrap();
        assert_eq!(r.len(), 9);
        assert_eq!(r[8], 2.0);
        assert!(Range { start: 1.0, stop: 0.0, step: 0.1 }.values().is_err());
        assert!(Range { start: 0.0, stop: 1.0, step: 0.0 }.values().is_err());
    }

    #[test]
    fn empty_grid_is_an_error() {
        let spec = GridSpec { alphas: vec![], ..GridSpec::default() };
        assert!(matches!(hypothesis_sweep(&spec), Err(ModelError::EmptyGrid(_))));
    }

    #[test]
    fn grid_spec_defaults_from_empty_json() {
        assert_eq!(GridSpec::from_json("{}").unwrap(), GridSpec::default());
    }

    #[test]
    fn relative_gap_handles_zero() {
        assert_eq!(relative_gap(0.0, 0.0), 0.0);
        assert_eq!(relative_gap(0.0, 4e-13), 0.0);
        assert_eq!(relative_gap(1.0, 0.0), 1.0);
        assert!((relative_gap(1.0, 1.0001) - 1e-4 / 1.0001).abs() < 1e-15);
    }
}
