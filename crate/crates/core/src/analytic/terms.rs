//! The integral families behind every term of the series assemblies, a
//! per-assembly cache, and linear combinations over them.
//!
//! Terms that share an integrand share a key, so coefficients of identical
//! integrals are merged before anything is integrated. The divergent pieces of
//! the capped assemblies meet their counterparts this way and cancel exactly.

use super::Scenario;
use crate::error::Result;
use crate::specfun::gamma::{gamma, ln_gamma, reg_pq};
use crate::specfun::{Neumaier, Quadrature};
use std::collections::BTreeMap;

pub(crate) const TERM_TOL_REL: f64 = 1e-12;
pub(crate) const TERM_TOL_ABS: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Key {
    /// ∫_0^Z x^p e^{-rate x} / (1+x) dx
    RatExp { p: u32, rate: u64 },
    /// ∫_0^Z x^p e^{-rate x} γ(U_i, N_i x^V_i) / (1+x) dx
    RatExpG { p: u32, rate: u64, branch: u8 },
    /// ∫_0^∞ x^(p-1) e^{-rate x} dx = Γ(p)/rate^p
    Moment { p: u32, rate: u64 },
    /// ∫_0^∞ x^(p-1) e^{-rate x} γ(U_i, N_i (σx)^V_i) dx
    MomentG { p: u32, rate: u64, branch: u8 },
}

impl Key {
    pub(crate) fn rat_exp(p: u32, rate: f64) -> Self {
        Key::RatExp {
            p,
            rate: rate.to_bits(),
        }
    }
    pub(crate) fn rat_exp_g(p: u32, rate: f64, branch: usize) -> Self {
        Key::RatExpG {
            p,
            rate: rate.to_bits(),
            branch: branch as u8,
        }
    }
    pub(crate) fn moment(p: u32, rate: f64) -> Self {
        Key::Moment {
            p,
            rate: rate.to_bits(),
        }
    }
    pub(crate) fn moment_g(p: u32, rate: f64, branch: usize) -> Self {
        Key::MomentG {
            p,
            rate: rate.to_bits(),
            branch: branch as u8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct TermValue {
    pub value: f64,
    pub error: f64,
}

/// ∫_0^Z x^p/(1+x) dx from polynomial division.
pub(crate) fn rat_poly_capped(p: u32, cap: f64) -> f64 {
    let mut s = Neumaier::new();
    for j in 0..p {
        let sign = if (p - 1 - j).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        s.add(sign * cap.powi(j as i32 + 1) / (j + 1) as f64);
    }
    let sign = if p.is_multiple_of(2) { 1.0 } else { -1.0 };
    s.add(sign * cap.ln_1p());
    s.value()
}

fn x_pow_exp(p: f64, rate: f64, x: f64) -> f64 {
    if p == 0.0 {
        (-rate * x).exp()
    } else {
        (p * x.ln() - rate * x).exp()
    }
}

/// Evaluates and caches term integrals for one scenario and cap.
pub(crate) struct TermCache<'a> {
    scn: &'a Scenario,
    cap: f64,
    values: BTreeMap<Key, TermValue>,
}

impl<'a> TermCache<'a> {
    pub(crate) fn new(scn: &'a Scenario, cap: f64) -> Self {
        Self {
            scn,
            cap,
            values: BTreeMap::new(),
        }
    }

    fn quad(&self, extra: &[f64]) -> Quadrature {
        Quadrature::new()
            .tol_abs(TERM_TOL_ABS)
            .tol_rel(TERM_TOL_REL)
            .breakpoints(self.scn.knees().iter().copied())
            .breakpoints(extra.iter().copied())
    }

    fn branch_knee(&self, branch: usize, sigma: f64) -> f64 {
        let b = &self.scn.dual.uowc().branches()[branch];
        b.n.powf(-1.0 / b.v) / sigma
    }

    pub(crate) fn get(&mut self, key: Key) -> Result<TermValue> {
        if let Some(v) = self.values.get(&key) {
            return Ok(*v);
        }
        let v = self.compute(key)?;
        self.values.insert(key, v);
        Ok(v)
    }

    fn compute(&self, key: Key) -> Result<TermValue> {
        match key {
            Key::RatExp { p, rate } => {
                let rate = f64::from_bits(rate);
                if rate == 0.0 {
                    let v = rat_poly_capped(p, self.cap);
                    return Ok(TermValue {
                        value: v,
                        error: 4.0 * f64::EPSILON * v.abs(),
                    });
                }
                let pf = p as f64;
                let r = self
                    .quad(&[1.0 / rate, pf / rate])
                    .upto(self.cap, |x| x_pow_exp(pf, rate, x) / (1.0 + x))?;
                Ok(TermValue {
                    value: r.value,
                    error: r.abs_error_estimate,
                })
            }
            Key::RatExpG { p, rate, branch } => {
                let rate = f64::from_bits(rate);
                let b = self.scn.dual.uowc().branches()[branch as usize];
                let gu = gamma(b.u);
                let pf = p as f64;
                let mut extra = vec![self.branch_knee(branch as usize, 1.0)];
                if rate > 0.0 {
                    extra.extend([1.0 / rate, pf / rate]);
                }
                let r = self.quad(&extra).upto(self.cap, |x| {
                    let g = gu * reg_pq(b.u, b.n * x.powf(b.v)).0;
                    x_pow_exp(pf, rate, x) * g / (1.0 + x)
                })?;
                Ok(TermValue {
                    value: r.value,
                    error: r.abs_error_estimate,
                })
            }
            Key::Moment { p, rate } => {
                let rate = f64::from_bits(rate);
                let pf = p as f64;
                let v = (ln_gamma(pf) - pf * rate.ln()).exp();
                Ok(TermValue {
                    value: v,
                    error: 8.0 * f64::EPSILON * v * (1.0 + (pf * rate.ln()).abs()),
                })
            }
            Key::MomentG { p, rate, branch } => {
                let rate = f64::from_bits(rate);
                let sigma = self.scn.sigma;
                let b = self.scn.dual.uowc().branches()[branch as usize];
                let gu = gamma(b.u);
                let pm1 = p as f64 - 1.0;
                let extra = [
                    self.branch_knee(branch as usize, sigma),
                    1.0 / rate,
                    pm1.max(1.0) / rate,
                ];
                let r = self.quad(&extra).semi_infinite(|x| {
                    let g = gu * reg_pq(b.u, b.n * (sigma * x).powf(b.v)).0;
                    x_pow_exp(pm1, rate, x) * g
                })?;
                Ok(TermValue {
                    value: r.value,
                    error: r.abs_error_estimate,
                })
            }
        }
    }
}

/// A linear combination Σ c_k · term_k with exact merging of equal keys.
#[derive(Debug, Default, Clone)]
pub(crate) struct Combination {
    coeffs: BTreeMap<Key, Neumaier>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Assembled {
    pub value: f64,
    pub error: f64,
    /// Σ |c_k · term_k|, the scale of the rounding error.
    pub abs_sum: f64,
    pub evaluated: usize,
    pub cancelled: usize,
}

impl Combination {
    pub(crate) fn add(&mut self, key: Key, c: f64) {
        self.coeffs.entry(key).or_default().add(c);
    }

    pub(crate) fn evaluate(&self, cache: &mut TermCache<'_>) -> Result<Assembled> {
        let mut total = Neumaier::new();
        let mut err = 0.0;
        let mut evaluated = 0;
        let mut cancelled = 0;
        for (key, c) in &self.coeffs {
            let c = c.value();
            if c == 0.0 {
                cancelled += 1;
                continue;
            }
            let t = cache.get(*key)?;
            total.add(c * t.value);
            err += c.abs() * t.error;
            evaluated += 1;
        }
        let abs_sum = total.abs_sum();
        let value = total.value();
        if !value.is_finite() {
            return Err(crate::error::Error::NonFinite {
                context: "term assembly",
            });
        }
        Ok(Assembled {
            value,
            error: err + 16.0 * f64::EPSILON * abs_sum,
            abs_sum,
            evaluated,
            cancelled,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn capped_rational_closed_form() {
        let z = 1e3;
        for p in 0..5 {
            let r = Quadrature::new()
                .tol_rel(1e-13)
                .interval(0.0, z, |x| x.powi(p as i32) / (1.0 + x))
                .unwrap();
            assert_relative_eq!(rat_poly_capped(p, z), r.value, max_relative = 1e-11);
        }
        assert_eq!(rat_poly_capped(0, 1e6), 1e6f64.ln_1p());
    }
}
