//! Coefficient CSV and Markdown regression tables.

use std::fmt::Write;

use crate::error::{EconError, Result};
use crate::result::EstimationResult;
use crate::sample::INTERCEPT;

pub const COEFFICIENT_COLUMNS: [&str; 4] = ["term", "coefficient", "se", "z"];

pub fn stars(p: f64) -> &'static str {
    match p {
        p if p < 0.01 => "***",
        p if p < 0.05 => "**",
        p if p < 0.1 => "*",
        _ => "",
    }
}

pub fn coefficients_csv(result: &EstimationResult) -> Result<String> {
    if result.coefficients.is_empty() {
        return Err(EconError::EmptyResults);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COEFFICIENT_COLUMNS)?;
    for c in &result.coefficients {
        w.write_record([c.term.clone(), c.estimate.to_string(), c.se.to_string(), c.z.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| EconError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn thousands(n: usize) -> String {
    let s = n.to_string();
    let mut out = String::new();
    for (i, ch) in s.chars().enumerate() {
        if i > 0 && (s.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

fn term_label(term: &str) -> String {
    if term == INTERCEPT {
        "Constant".into()
    } else {
        term.replace('_', "\\_")
    }
}

/// Columns side by side: coefficient with stars, z-statistic in
/// parentheses beneath, then sample size, fixed effects and fit.
pub fn regression_table(results: &[&EstimationResult]) -> Result<String> {
    if results.is_empty() || results.iter().all(|r| r.coefficients.is_empty()) {
        return Err(EconError::EmptyResults);
    }
    let mut terms: Vec<&str> = Vec::new();
    let mut fes: Vec<&str> = Vec::new();
    for r in results {
        for c in &r.coefficients {
            if c.term != INTERCEPT && !terms.contains(&c.term.as_str()) {
                terms.push(&c.term);
            }
        }
        for f in &r.fixed_effects {
            if !fes.contains(&f.as_str()) {
                fes.push(f);
            }
        }
    }
    if results.iter().any(|r| r.coefficient(INTERCEPT).is_some()) {
        terms.push(INTERCEPT);
    }

    let mut out = String::new();
    let row = |out: &mut String, label: &str, cells: Vec<String>| {
        writeln!(out, "| {} | {} |", label, cells.join(" | ")).expect("string write");
    };
    row(&mut out, "", (1..=results.len()).map(|i| format!("({i})")).collect());
    writeln!(out, "|---|{}", "---:|".repeat(results.len())).expect("string write");
    for term in &terms {
        let coef = results
            .iter()
            .map(|r| r.coefficient(term).map_or(String::new(), |c| format!("{:.3}{}", c.estimate, stars(c.p))))
            .collect();
        row(&mut out, &term_label(term), coef);
        let z = results
            .iter()
            .map(|r| r.coefficient(term).map_or(String::new(), |c| format!("({:.2})", c.z)))
            .collect();
        row(&mut out, "", z);
    }
    row(&mut out, "Estimator", results.iter().map(|r| r.estimator.label().to_string()).collect());
    row(&mut out, "Observations", results.iter().map(|r| thousands(r.nobs)).collect());
    for fe in &fes {
        let cells = results
            .iter()
            .map(|r| if r.fixed_effects.iter().any(|f| f == fe) { "YES" } else { "NO" }.to_string())
            .collect();
        row(&mut out, &format!("{} FE", term_label(fe)), cells);
    }
    if results.iter().any(|r| r.pseudo_r2.is_some()) {
        let cells = results.iter().map(|r| r.pseudo_r2.map_or(String::new(), |v| format!("{v:.3}"))).collect();
        row(&mut out, "Pseudo R-squared", cells);
    }
    if results.iter().any(|r| r.r2.is_some()) {
        let cells = results.iter().map(|r| r.r2.map_or(String::new(), |v| format!("{v:.3}"))).collect();
        row(&mut out, "Within R-squared", cells);
    }
    out.push('\n');
    let clusters: Vec<&str> = results.iter().filter_map(|r| r.cluster.as_deref()).collect();
    match clusters.first() {
        Some(c) if clusters.len() == results.len() && clusters.iter().all(|x| x == c) => {
            writeln!(out, "Robust standard errors clustered by {}. Robust z-statistics in parentheses.", term_label(c))
        }
        _ => writeln!(out, "Robust z-statistics in parentheses."),
    }
    .expect("string write");
    out.push_str("*** p<.01, ** p<.05, * p<.1\n");
    Ok(out)
}
