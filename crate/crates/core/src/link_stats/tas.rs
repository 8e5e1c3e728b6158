//! Transmit antenna selection: the distribution function raised to N_s,
//! expanded into exponential-polynomial terms.

use super::etamu::EtaMuMrc;
use crate::error::{Error, Result};
use crate::specfun::gamma::binomial;

/// Largest polynomial degree N_s·(N·mu - 1) the expansion accepts.
pub const MAX_DEGREE: usize = 64;

/// One term `r · x^(u+v) · exp(-rate·x)` of the expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TasTerm {
    pub m: u32,
    pub n: u32,
    pub u: u32,
    pub v: u32,
    pub r: f64,
    pub rate: f64,
}

impl TasTerm {
    pub fn degree(&self) -> u32 {
        self.u + self.v
    }
}

#[derive(Debug, Clone)]
struct Group {
    rate: f64,
    coeffs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct TasExpansion {
    n_s: u32,
    terms: Vec<TasTerm>,
    groups: Vec<Group>,
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn powers(p: &[f64], max: u32) -> Vec<Vec<f64>> {
    let mut out = vec![vec![1.0]];
    for j in 1..=max as usize {
        let next = convolve(&out[j - 1], p);
        out.push(next);
    }
    out
}

impl TasExpansion {
    pub fn new(dist: &EtaMuMrc, n_s: u32) -> Result<Self> {
        let degree = n_s as usize * (dist.shape() as usize - 1);
        if degree > MAX_DEGREE {
            return Err(Error::ExpansionTooLarge {
                degree,
                max: MAX_DEGREE,
            });
        }
        let [psi1, psi2] = dist.psi();
        let pow1 = powers(dist.survival_poly(0), n_s);
        let pow2 = powers(dist.survival_poly(1), n_s);
        let mut terms = Vec::new();
        let mut groups = Vec::new();
        for m in 0..=n_s {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            for n in 0..=m {
                let factor = sign * binomial(n_s, m) * binomial(m, n);
                let rate = (m - n) as f64 * psi1 + n as f64 * psi2;
                let p1 = &pow1[(m - n) as usize];
                let p2 = &pow2[n as usize];
                for (u, a) in p1.iter().enumerate() {
                    for (v, b) in p2.iter().enumerate() {
                        terms.push(TasTerm {
                            m,
                            n,
                            u: u as u32,
                            v: v as u32,
                            r: factor * a * b,
                            rate,
                        });
                    }
                }
                let coeffs = convolve(p1, p2).into_iter().map(|c| c * factor).collect();
                groups.push(Group { rate, coeffs });
            }
        }
        Ok(Self { n_s, terms, groups })
    }

    pub fn n_s(&self) -> u32 {
        self.n_s
    }

    /// All (m, n, u, v) terms; the first is the constant m = 0 term with r = 1.
    pub fn terms(&self) -> &[TasTerm] {
        &self.terms
    }

    /// Σ |terms| at x, a scale for the rounding error of [`Self::eval`].
    pub fn eval_with_abs(&self, x: f64) -> (f64, f64) {
        let mut s = crate::specfun::Neumaier::new();
        let lx = if x > 0.0 { x.ln() } else { f64::NEG_INFINITY };
        for g in &self.groups {
            for (k, c) in g.coeffs.iter().enumerate() {
                let e = if k == 0 {
                    (-g.rate * x).exp()
                } else if x > 0.0 {
                    (k as f64 * lx - g.rate * x).exp()
                } else {
                    0.0
                };
                s.add(c * e);
            }
        }
        (s.value(), s.abs_sum())
    }

    /// [F(x)]^N_s through the expansion.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_abs(x).0
    }
}
