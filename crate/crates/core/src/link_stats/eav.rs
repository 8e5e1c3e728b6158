//! Ascending-series form of the eavesdropper distribution function.

use super::etamu::EtaMuMrc;
use crate::error::{Error, Result};
use crate::specfun::gamma::ln_factorial;
use crate::specfun::Neumaier;

pub const DEFAULT_SERIES_TERMS: usize = 20;

/// Consecutive growing terms after which the series is declared divergent.
pub const GROWTH_LIMIT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    /// Magnitude of the first omitted term.
    pub truncation_bound: f64,
    pub terms: usize,
}

/// Coefficient of x^w in the z-th series term for index (α, β), with
/// w = n - β + z: K·B_{α,β} (-Ω_α)^z / (z! w).
pub fn series_coefficient(dist: &EtaMuMrc, alpha: usize, beta: usize, z: u32) -> (u32, f64) {
    let w = dist.shape() - beta as u32 + z;
    let omega = dist.psi()[alpha];
    let sign = if z.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mag = (z as f64 * omega.ln() - ln_factorial(z) - (w as f64).ln()).exp();
    (w, sign * dist.density_coefficient(alpha, beta) * mag)
}

fn group(dist: &EtaMuMrc, x: f64, z: u32) -> (f64, f64) {
    let lx = x.ln();
    let mut s = Neumaier::new();
    for alpha in 0..2 {
        for beta in 0..dist.shape() as usize {
            let (w, c) = series_coefficient(dist, alpha, beta, z);
            s.add(c * (w as f64 * lx).exp());
        }
    }
    (s.value(), s.abs_sum())
}

pub fn cdf_series(dist: &EtaMuMrc, x: f64, terms: usize) -> Result<SeriesValue> {
    if terms == 0 {
        return Err(Error::Domain {
            func: "eav_cdf_series",
            reason: "terms must be >= 1".into(),
        });
    }
    if x <= 0.0 {
        return Ok(SeriesValue {
            value: 0.0,
            truncation_bound: 0.0,
            terms,
        });
    }
    let mut total = Neumaier::new();
    let mut prev = f64::INFINITY;
    let mut growth = 0;
    for z in 0..terms as u32 {
        let (v, mag) = group(dist, x, z);
        total.add(v);
        if mag > prev {
            growth += 1;
            if growth >= GROWTH_LIMIT {
                return Err(Error::SeriesDiverged {
                    reason: format!(
                        "term magnitude grew for {GROWTH_LIMIT} consecutive terms at x = {x}"
                    ),
                });
            }
        } else {
            growth = 0;
        }
        prev = mag;
    }
    let (_, next) = group(dist, x, terms as u32);
    Ok(SeriesValue {
        value: total.value(),
        truncation_bound: next,
        terms,
    })
}
