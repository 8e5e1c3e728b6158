//! Term-wise assemblies of ASC (two forms) and SOP_L, and access to the
//! individual terms.

use super::terms::{Assembled, Combination, Key, TermCache};
use super::{Method, MetricResult, Scenario};
use crate::error::{invalid, Error, Result};
use crate::link_stats::eav::series_coefficient;
use crate::link_stats::TasTerm;
use crate::params::SystemConfig;
use crate::specfun::beta_fn;
use crate::specfun::gamma::factorial;

/// Relative disagreement with the direct ASC above which an assembly is
/// reported as a cancellation failure (scaled by max(1, value)).
pub const CANCELLATION_TOL: f64 = 1e-2;

/// Default shared cap: 10^6 times the largest scale knee.
pub fn default_cap(scn: &Scenario) -> f64 {
    1e6 * scn.knees().iter().copied().fold(0.0, f64::max)
}

fn check_cap(scn: &Scenario, cap: f64) -> Result<()> {
    let rf_knee = scn
        .main_link()
        .rf()
        .knees()
        .into_iter()
        .chain(scn.eavesdropper().knees())
        .fold(0.0, f64::max);
    if !(cap.is_finite() && cap >= 1e3 * rf_knee) {
        return Err(invalid(
            "cap_z",
            format!("cap {cap} must be finite and >= 1e3 x {rf_knee}"),
        ));
    }
    Ok(())
}

fn tas_terms(scn: &Scenario) -> Result<&[TasTerm]> {
    Ok(scn.main_link().expansion()?.terms())
}

// (δ, θ, ς, L) with L = K_e C_{δ,θ} Ω_δ^ς / ς!
fn eav_survival_terms(scn: &Scenario) -> Vec<(usize, usize, u32, f64)> {
    let e = scn.eavesdropper();
    let n = e.shape() as usize;
    let mut out = Vec::new();
    for delta in 0..2 {
        let omega = e.psi()[delta];
        for theta in 0..n {
            let c = e.cdf_coefficient(delta, theta);
            for vs in 0..(n - theta) as u32 {
                let l = c * (vs as f64 * omega.ln()).exp() / factorial(vs);
                out.push((delta, theta, vs, l));
            }
        }
    }
    out
}

fn active_branches(scn: &Scenario) -> Vec<(usize, f64)> {
    scn.main_link()
        .uowc()
        .active_branches()
        .map(|(i, b)| (i, b.s))
        .collect()
}

fn asc1_combination(scn: &Scenario) -> Result<Combination> {
    let terms = tas_terms(scn)?;
    let branches = active_branches(scn);
    let eav = eav_survival_terms(scn);
    let omegas = scn.eavesdropper().psi();
    let mut comb = Combination::default();

    comb.add(Key::rat_exp(0, 0.0), 1.0);
    for &(i, s) in &branches {
        comb.add(Key::rat_exp_g(0, 0.0, i), -s);
    }
    for &(delta, _, vs, l) in &eav {
        comb.add(Key::rat_exp(vs, omegas[delta]), -l);
        for &(i, s) in &branches {
            comb.add(Key::rat_exp_g(vs, omegas[delta], i), l * s);
        }
    }
    for t in terms {
        let k = t.degree();
        comb.add(Key::rat_exp(k, t.rate), -t.r);
        for &(i, s) in &branches {
            comb.add(Key::rat_exp_g(k, t.rate, i), t.r * s);
        }
        for &(delta, _, vs, l) in &eav {
            let lr = l * t.r;
            let rate = omegas[delta] + t.rate;
            comb.add(Key::rat_exp(vs + k, rate), lr);
            for &(i, s) in &branches {
                comb.add(Key::rat_exp_g(vs + k, rate, i), -lr * s);
            }
        }
    }
    Ok(comb)
}

fn to_result(a: Assembled, method: Method, extra_error: f64) -> MetricResult {
    MetricResult {
        value: a.value,
        error_estimate: a.error + extra_error,
        method,
    }
}

/// ASC from the A-term expansion without the cross-check.
pub fn asc_series_1_unchecked(cfg: &SystemConfig, cap_z: Option<f64>) -> Result<MetricResult> {
    let scn = Scenario::new(cfg);
    let cap = cap_z.unwrap_or_else(|| default_cap(&scn));
    check_cap(&scn, cap)?;
    let comb = asc1_combination(&scn)?;
    let mut cache = TermCache::new(&scn, cap);
    let a = comb.evaluate(&mut cache)?;
    Ok(to_result(a, Method::PaperSeries1, 0.0))
}

fn cross_check(cfg: &SystemConfig, r: MetricResult) -> Result<MetricResult> {
    let direct = super::asc_direct(cfg)?;
    if (r.value - direct.value).abs() > CANCELLATION_TOL * direct.value.max(1.0) {
        return Err(Error::CancellationWarning {
            value: r.value,
            reference: direct.value,
        });
    }
    Ok(r)
}

/// ASC from the A-term expansion on the shared cap, checked against the
/// direct integral.
pub fn asc_series_1(cfg: &SystemConfig, cap_z: Option<f64>) -> Result<MetricResult> {
    let r = asc_series_1_unchecked(cfg, cap_z)?;
    cross_check(cfg, r)
}

/// Convergence data of the ascending-series ASC.
#[derive(Debug, Clone, PartialEq)]
pub struct Series2Diagnostics {
    /// max Ω_δ / min ψ_α; the series converges only below 1.
    pub rho: f64,
    /// Contribution of each z.
    pub term_values: Vec<f64>,
    /// |last term| ρ/(1-ρ).
    pub truncation_estimate: f64,
}

impl Series2Diagnostics {
    /// Convergence condition used for comparisons: ρ < 1 and the truncation
    /// estimate within 1e-3 of the value.
    pub fn converged(&self, value: f64) -> bool {
        self.rho < 1.0 && self.truncation_estimate <= 1e-3 * value.abs()
    }
}

/// Series ASC value and its convergence diagnostics.
pub fn series2_diagnostics(
    cfg: &SystemConfig,
    terms: usize,
    cap_z: Option<f64>,
) -> Result<(MetricResult, Series2Diagnostics)> {
    if terms == 0 {
        return Err(invalid("terms", "must be >= 1"));
    }
    let scn = Scenario::new(cfg);
    let cap = cap_z.unwrap_or_else(|| default_cap(&scn));
    check_cap(&scn, cap)?;
    let omega_max = scn.eavesdropper().psi().into_iter().fold(0.0, f64::max);
    let psi_min = scn
        .main_link()
        .rf()
        .psi()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let rho = omega_max / psi_min;
    if rho >= 1.0 {
        return Err(Error::SeriesDiverged {
            reason: format!("eavesdropper rate exceeds main-link decay (ratio {rho:.4})"),
        });
    }
    let tas = tas_terms(&scn)?;
    let branches = active_branches(&scn);
    let e = scn.eavesdropper();
    let mut cache = TermCache::new(&scn, cap);
    let mut total = crate::specfun::Neumaier::new();
    let mut error = 0.0;
    let mut values = Vec::with_capacity(terms);
    let mut growth = 0;
    for z in 0..terms as u32 {
        let mut comb = Combination::default();
        for delta in 0..2 {
            for theta in 0..e.shape() as usize {
                let (w, c) = series_coefficient(e, delta, theta, z);
                comb.add(Key::rat_exp(w, 0.0), c);
                for t in tas {
                    let k = t.degree();
                    let cr = c * t.r;
                    comb.add(Key::rat_exp(w + k, t.rate), -cr);
                    for &(i, s) in &branches {
                        comb.add(Key::rat_exp_g(w + k, t.rate, i), cr * s);
                    }
                }
                for &(i, s) in &branches {
                    comb.add(Key::rat_exp_g(w, 0.0, i), -c * s);
                }
            }
        }
        let a = comb.evaluate(&mut cache)?;
        total.add(a.value);
        error += a.error;
        if let Some(prev) = values.last() {
            let prev: f64 = *prev;
            if a.value.abs() > prev.abs() {
                growth += 1;
                if growth >= crate::link_stats::eav::GROWTH_LIMIT {
                    return Err(Error::SeriesDiverged {
                        reason: format!("term magnitude grew for {growth} consecutive terms"),
                    });
                }
            } else {
                growth = 0;
            }
        }
        values.push(a.value);
    }
    let last = values.last().copied().unwrap_or(0.0).abs();
    let trunc = last * rho / (1.0 - rho);
    let value = total.value();
    if !value.is_finite() {
        return Err(Error::NonFinite {
            context: "series ASC",
        });
    }
    Ok((
        MetricResult {
            value,
            error_estimate: error + trunc,
            method: Method::PaperSeries2,
        },
        Series2Diagnostics {
            rho,
            term_values: values,
            truncation_estimate: trunc,
        },
    ))
}

/// ASC from the ascending eavesdropper series without the cross-check.
pub fn asc_series_2_unchecked(
    cfg: &SystemConfig,
    terms: usize,
    cap_z: Option<f64>,
) -> Result<MetricResult> {
    series2_diagnostics(cfg, terms, cap_z).map(|(r, _)| r)
}

/// ASC from the ascending eavesdropper series, checked against the direct
/// integral.
pub fn asc_series_2(cfg: &SystemConfig, terms: usize, cap_z: Option<f64>) -> Result<MetricResult> {
    let r = asc_series_2_unchecked(cfg, terms, cap_z)?;
    cross_check(cfg, r)
}

fn sop_combination(scn: &Scenario) -> Result<Combination> {
    let tas = tas_terms(scn)?;
    let branches = active_branches(scn);
    let e = scn.eavesdropper();
    let sigma = scn.sigma;
    let mut comb = Combination::default();
    for delta in 0..2 {
        let omega = e.psi()[delta];
        for theta in 0..e.shape() as usize {
            let d = e.density_coefficient(delta, theta);
            let p0 = e.shape() - theta as u32;
            for t in tas {
                let k = t.degree();
                let c = d * t.r * sigma.powi(k as i32);
                let rate = omega + sigma * t.rate;
                comb.add(Key::moment(p0 + k, rate), c);
                for &(i, s) in &branches {
                    comb.add(Key::moment_g(p0 + k, rate, i), -c * s);
                }
            }
            for &(i, s) in &branches {
                comb.add(Key::moment_g(p0, omega, i), d * s);
            }
        }
    }
    Ok(comb)
}

/// SOP_L assembled from the S-terms.
pub fn sop_lower_closed(cfg: &SystemConfig) -> Result<MetricResult> {
    let scn = Scenario::new(cfg);
    let comb = sop_combination(&scn)?;
    let mut cache = TermCache::new(&scn, f64::INFINITY);
    let a = comb.evaluate(&mut cache)?;
    let mut r = to_result(a, Method::ClosedForm, 0.0);
    r.value = r.value.clamp(0.0, 1.0);
    Ok(r)
}

/// SPSC assembled from the S-terms at unit threshold.
pub fn spsc_closed(cfg: &SystemConfig) -> Result<MetricResult> {
    let r = sop_lower_closed(&cfg.with_target_rate(0.0)?)?;
    Ok(MetricResult {
        value: 1.0 - r.value,
        ..r
    })
}

/// Individual terms of the A-expansion. `term` indexes
/// [`crate::link_stats::TasExpansion::terms`], `delta` the eavesdropper
/// exponential family, `branch` the optical mixture branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AscTerm {
    A1,
    A2 {
        varsigma: u32,
        delta: usize,
    },
    A3 {
        term: usize,
    },
    A4 {
        varsigma: u32,
        delta: usize,
        term: usize,
    },
    A5 {
        branch: usize,
    },
    A6 {
        varsigma: u32,
        delta: usize,
        branch: usize,
    },
    A7 {
        term: usize,
        branch: usize,
    },
    A8 {
        varsigma: u32,
        delta: usize,
        term: usize,
        branch: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AscBTerm {
    B1 { w: u32 },
    B2 { w: u32, term: usize },
    B3 { w: u32, term: usize, branch: usize },
    B4 { w: u32, branch: usize },
}

/// How B1 is evaluated. The Beta-function route sits on a gamma pole for
/// every integer exponent and exists to surface that.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum B1Route {
    #[default]
    CappedIntegral,
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SopTerm {
    S1 {
        delta: usize,
        theta: usize,
        term: usize,
    },
    S2 {
        delta: usize,
        theta: usize,
        branch: usize,
    },
    S3 {
        delta: usize,
        theta: usize,
        term: usize,
        branch: usize,
    },
}

fn pick_term(scn: &Scenario, idx: usize) -> Result<TasTerm> {
    tas_terms(scn)?
        .get(idx)
        .copied()
        .ok_or_else(|| invalid("term", format!("index {idx} out of range")))
}

fn check_branch(scn: &Scenario, branch: usize) -> Result<()> {
    if branch > 1 {
        return Err(invalid("branch", "must be 0 or 1"));
    }
    if scn.main_link().uowc().branches()[branch].s == 0.0 {
        return Err(invalid("branch", "branch has zero weight"));
    }
    Ok(())
}

fn check_delta(delta: usize) -> Result<()> {
    if delta > 1 {
        return Err(invalid("delta", "must be 0 or 1"));
    }
    Ok(())
}

/// One A-term integrated on [0, cap_z].
pub fn asc_term(kind: AscTerm, cfg: &SystemConfig, cap_z: Option<f64>) -> Result<f64> {
    let scn = Scenario::new(cfg);
    let cap = cap_z.unwrap_or_else(|| default_cap(&scn));
    let omega = |d: usize| scn.eavesdropper().psi()[d];
    let key = match kind {
        AscTerm::A1 => Key::rat_exp(0, 0.0),
        AscTerm::A2 { varsigma, delta } => {
            check_delta(delta)?;
            Key::rat_exp(varsigma, omega(delta))
        }
        AscTerm::A3 { term } => {
            let t = pick_term(&scn, term)?;
            Key::rat_exp(t.degree(), t.rate)
        }
        AscTerm::A4 {
            varsigma,
            delta,
            term,
        } => {
            check_delta(delta)?;
            let t = pick_term(&scn, term)?;
            Key::rat_exp(varsigma + t.degree(), omega(delta) + t.rate)
        }
        AscTerm::A5 { branch } => {
            check_branch(&scn, branch)?;
            Key::rat_exp_g(0, 0.0, branch)
        }
        AscTerm::A6 {
            varsigma,
            delta,
            branch,
        } => {
            check_delta(delta)?;
            check_branch(&scn, branch)?;
            Key::rat_exp_g(varsigma, omega(delta), branch)
        }
        AscTerm::A7 { term, branch } => {
            check_branch(&scn, branch)?;
            let t = pick_term(&scn, term)?;
            Key::rat_exp_g(t.degree(), t.rate, branch)
        }
        AscTerm::A8 {
            varsigma,
            delta,
            term,
            branch,
        } => {
            check_delta(delta)?;
            check_branch(&scn, branch)?;
            let t = pick_term(&scn, term)?;
            Key::rat_exp_g(varsigma + t.degree(), omega(delta) + t.rate, branch)
        }
    };
    Ok(TermCache::new(&scn, cap).get(key)?.value)
}

/// One B-term integrated on [0, cap_z].
pub fn asc_b_term(
    kind: AscBTerm,
    cfg: &SystemConfig,
    cap_z: Option<f64>,
    route: B1Route,
) -> Result<f64> {
    let scn = Scenario::new(cfg);
    let cap = cap_z.unwrap_or_else(|| default_cap(&scn));
    let key = match kind {
        AscBTerm::B1 { w } => {
            if route == B1Route::Beta {
                return beta_fn(w as f64 + 1.0, -(w as f64));
            }
            Key::rat_exp(w, 0.0)
        }
        AscBTerm::B2 { w, term } => {
            let t = pick_term(&scn, term)?;
            Key::rat_exp(w + t.degree(), t.rate)
        }
        AscBTerm::B3 { w, term, branch } => {
            check_branch(&scn, branch)?;
            let t = pick_term(&scn, term)?;
            Key::rat_exp_g(w + t.degree(), t.rate, branch)
        }
        AscBTerm::B4 { w, branch } => {
            check_branch(&scn, branch)?;
            Key::rat_exp_g(w, 0.0, branch)
        }
    };
    Ok(TermCache::new(&scn, cap).get(key)?.value)
}

/// One S-term of the SOP_L assembly.
pub fn sop_term(kind: SopTerm, cfg: &SystemConfig) -> Result<f64> {
    let scn = Scenario::new(cfg);
    let e = scn.eavesdropper();
    let sigma = scn.sigma;
    let check_theta = |theta: usize| {
        if theta < e.shape() as usize {
            Ok(())
        } else {
            Err(invalid("theta", "out of range"))
        }
    };
    let key = match kind {
        SopTerm::S1 { delta, theta, term } => {
            check_delta(delta)?;
            check_theta(theta)?;
            let t = pick_term(&scn, term)?;
            Key::moment(
                e.shape() - theta as u32 + t.degree(),
                e.psi()[delta] + sigma * t.rate,
            )
        }
        SopTerm::S2 {
            delta,
            theta,
            branch,
        } => {
            check_delta(delta)?;
            check_theta(theta)?;
            check_branch(&scn, branch)?;
            Key::moment_g(e.shape() - theta as u32, e.psi()[delta], branch)
        }
        SopTerm::S3 {
            delta,
            theta,
            term,
            branch,
        } => {
            check_delta(delta)?;
            check_theta(theta)?;
            check_branch(&scn, branch)?;
            let t = pick_term(&scn, term)?;
            Key::moment_g(
                e.shape() - theta as u32 + t.degree(),
                e.psi()[delta] + sigma * t.rate,
                branch,
            )
        }
    };
    Ok(TermCache::new(&scn, f64::INFINITY).get(key)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{Detection, EtaMuFormat, MeggParams, RfLinkParams};
    use crate::specfun::upper_incomplete_gamma;
    use approx::assert_relative_eq;

    fn fig2_like(n_s: u32) -> SystemConfig {
        let sr = RfLinkParams::new(2.2, 2, 2, 1.0, EtaMuFormat::FormatI).unwrap();
        let rd = MeggParams::new(0.3, 0.8, 1.6, 1.1, 0.9, Detection::Hd, 31.62).unwrap();
        SystemConfig::new(sr, sr, rd, n_s, 0.0).unwrap()
    }

    fn strong_eavesdropper() -> SystemConfig {
        let sr = RfLinkParams::new(3.0, 1, 1, 1.0, EtaMuFormat::FormatI).unwrap();
        let se = RfLinkParams::new(2.2, 1, 2, 30.0, EtaMuFormat::FormatI).unwrap();
        let rd = MeggParams::new(0.3, 0.8, 1.6, 1.1, 0.9, Detection::ImDd, 31.62).unwrap();
        SystemConfig::new(sr, se, rd, 2, 0.0).unwrap()
    }

    #[test]
    fn series_one_matches_direct() {
        for n_s in 1..=3 {
            let c = fig2_like(n_s);
            let d = super::super::asc_direct(&c).unwrap().value;
            let s = asc_series_1(&c, None).unwrap().value;
            assert!((s - d).abs() <= 1e-3 * d, "n_s={n_s}: {s} vs {d}");
        }
    }

    #[test]
    fn series_one_is_cap_stable() {
        let c = fig2_like(2);
        let scn = Scenario::new(&c);
        let z = default_cap(&scn);
        let a = asc_series_1(&c, Some(z)).unwrap().value;
        let b = asc_series_1(&c, Some(2.0 * z)).unwrap().value;
        assert!((a - b).abs() <= 1e-3 * a);
    }

    #[test]
    fn series_two_matches_direct_for_strong_eavesdropper() {
        let c = strong_eavesdropper();
        let d = super::super::asc_direct(&c).unwrap().value;
        let (r, diag) = series2_diagnostics(&c, 20, None).unwrap();
        assert!(diag.converged(r.value));
        assert!((r.value - d).abs() <= 1e-2 * d, "{} vs {d}", r.value);
        let one = asc_series_2_unchecked(&c, 1, None).unwrap().value;
        assert!((one - r.value).abs() > 1e-6);
    }

    #[test]
    fn series_two_rejects_weak_eavesdropper() {
        assert!(matches!(
            asc_series_2(&fig2_like(1), 20, None),
            Err(Error::SeriesDiverged { .. })
        ));
    }

    #[test]
    fn sop_closed_matches_integral() {
        let c = fig2_like(2).with_target_rate(0.3).unwrap();
        let a = super::super::sop_lower(&c).unwrap().value;
        let b = sop_lower_closed(&c).unwrap().value;
        assert!((a - b).abs() <= 1e-6f64.max(1e-4 * a));
    }

    #[test]
    fn a2_is_an_exponential_integral() {
        // ∫ e^{-Ωx}/(1+x) dx = e^Ω Γ(0, Ω) = e^Ω E1(Ω)
        let c = fig2_like(1);
        let omega = Scenario::new(&c).eavesdropper().psi()[0];
        let a2 = asc_term(
            AscTerm::A2 {
                varsigma: 0,
                delta: 0,
            },
            &c,
            None,
        )
        .unwrap();
        let e1 = crate::specfun::gamma::upper_incomplete_gamma(1e-300, omega).unwrap_or(f64::NAN);
        let _ = e1;
        let reference = omega.exp() * e1_oracle(omega);
        assert_relative_eq!(a2, reference, max_relative = 1e-9);
        let _ = upper_incomplete_gamma;
    }

    // E1 by its convergent series for small argument, Lentz fraction otherwise
    fn e1_oracle(x: f64) -> f64 {
        if x < 1.0 {
            let mut s = -0.577_215_664_901_532_9 - x.ln();
            let mut term = 1.0;
            for k in 1..60 {
                term *= -x / k as f64;
                s -= term / k as f64;
            }
            s
        } else {
            let mut f = 0.0;
            for k in (1..200).rev() {
                f = k as f64 / (1.0 + k as f64 / (x + f));
            }
            (-x).exp() / (x + f)
        }
    }

    #[test]
    fn a3_and_a2_share_a_family() {
        let c = fig2_like(2);
        let scn = Scenario::new(&c);
        let t = scn.main_link().expansion().unwrap().terms()[3];
        let a3 = asc_term(AscTerm::A3 { term: 3 }, &c, None).unwrap();
        let direct = crate::specfun::Quadrature::new()
            .tol_rel(1e-12)
            .breakpoints([1.0 / t.rate])
            .semi_infinite(|x| x.powi(t.degree() as i32) * (-t.rate * x).exp() / (1.0 + x))
            .unwrap()
            .value;
        assert_relative_eq!(a3, direct, max_relative = 1e-9);
    }

    #[test]
    fn a6_exponential_branch_reduction() {
        let c = fig2_like(1);
        let scn = Scenario::new(&c);
        let omega = scn.eavesdropper().psi()[1];
        let b = scn.main_link().uowc().branches()[0];
        let a6 = asc_term(
            AscTerm::A6 {
                varsigma: 1,
                delta: 1,
                branch: 0,
            },
            &c,
            None,
        )
        .unwrap();
        let a2 = asc_term(
            AscTerm::A2 {
                varsigma: 1,
                delta: 1,
            },
            &c,
            None,
        )
        .unwrap();
        let rest = crate::specfun::Quadrature::new()
            .tol_rel(1e-12)
            .semi_infinite(|x| x * (-omega * x - b.n * x.powf(b.v)).exp() / (1.0 + x))
            .unwrap()
            .value;
        assert_relative_eq!(a6, a2 - rest, max_relative = 1e-9);
    }

    #[test]
    fn b1_beta_route_hits_the_pole() {
        let c = fig2_like(1);
        let r = asc_b_term(AscBTerm::B1 { w: 3 }, &c, None, B1Route::Beta);
        assert_eq!(r, Err(Error::Pole { arg: -3.0 }));
        let capped = asc_b_term(
            AscBTerm::B1 { w: 0 },
            &c,
            Some(1e6),
            B1Route::CappedIntegral,
        )
        .unwrap();
        assert_eq!(capped, 1e6f64.ln_1p());
    }

    #[test]
    fn s1_closed_form() {
        let c = fig2_like(1).with_target_rate(0.5).unwrap();
        let scn = Scenario::new(&c);
        let e = scn.eavesdropper();
        let t = scn.main_link().expansion().unwrap().terms()[2];
        let p = e.shape() as f64 + t.degree() as f64;
        let rate = e.psi()[0] + c.sigma() * t.rate;
        let s1 = sop_term(
            SopTerm::S1 {
                delta: 0,
                theta: 0,
                term: 2,
            },
            &c,
        )
        .unwrap();
        assert_relative_eq!(
            s1,
            crate::specfun::gamma(p) / rate.powf(p),
            max_relative = 1e-13
        );
    }
}
