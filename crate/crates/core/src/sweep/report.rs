use super::{Engine, SweepMetric, SweepTable};
use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Relative part of the flag threshold.
pub const REL_TOL: f64 = 0.01;
/// Standard errors in the statistical part of the flag threshold.
pub const SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub variable: String,
    pub value: f64,
    pub metric: SweepMetric,
    pub analytic: f64,
    pub mc: f64,
    pub mc_std_error: f64,
    pub delta: f64,
    pub threshold: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub comparisons: Vec<Comparison>,
    pub passed: usize,
    pub flagged: usize,
}

/// Pairs analytic and mc rows of each grid point and metric. A pair is
/// flagged when |analytic - mc| > max(0.01 |analytic|, 4 mc std error).
pub fn compare_report(table: &SweepTable) -> Result<Report> {
    let mut pairs: BTreeMap<(usize, SweepMetric), [Option<usize>; 2]> = BTreeMap::new();
    for (i, r) in table.rows.iter().enumerate() {
        if !r.is_ok() {
            continue;
        }
        let slot = match r.engine {
            Engine::Analytic => 0,
            Engine::Mc => 1,
        };
        pairs.entry((r.grid_index, r.metric)).or_default()[slot] = Some(i);
    }
    let mut comparisons = Vec::new();
    for [a, m] in pairs.into_values() {
        let (Some(a), Some(m)) = (a, m) else { continue };
        let (ra, rm) = (&table.rows[a], &table.rows[m]);
        let analytic = ra.result.expect("ok row has a result");
        let mc = rm.result.expect("ok row has a result");
        let se = rm.error.unwrap_or(0.0);
        let delta = (analytic - mc).abs();
        let threshold = (REL_TOL * analytic.abs()).max(SIGMAS * se);
        comparisons.push(Comparison {
            variable: ra.variable.clone(),
            value: ra.value,
            metric: ra.metric,
            analytic,
            mc,
            mc_std_error: se,
            delta,
            threshold,
            flagged: delta > threshold,
        });
    }
    if comparisons.is_empty() {
        return Err(Error::MissingEngine);
    }
    let flagged = comparisons.iter().filter(|c| c.flagged).count();
    Ok(Report {
        passed: comparisons.len() - flagged,
        flagged,
        comparisons,
    })
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<12} {:>12} {:<6} {:>14} {:>14} {:>10} {:>10}  flag",
            "variable", "value", "metric", "analytic", "mc", "delta", "limit"
        );
        for c in &self.comparisons {
            let _ = writeln!(
                s,
                "{:<12} {:>12.6} {:<6} {:>14.6e} {:>14.6e} {:>10.2e} {:>10.2e}  {}",
                c.variable,
                c.value,
                c.metric.name(),
                c.analytic,
                c.mc,
                c.delta,
                c.threshold,
                if c.flagged { "FLAG" } else { "" }
            );
        }
        let _ = writeln!(s, "{} passed, {} flagged", self.passed, self.flagged);
        s
    }
}
