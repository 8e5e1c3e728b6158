//! eta-mu MRC signal-to-noise ratio.
//!
//! With integer shape n = N·mu the density is a finite sum of terms
//! `x^(n-β-1) exp(-ψ_α x)`. That sum alternates in sign and loses accuracy as n
//! grows, so `pdf`/`cdf`/`sf` track a rounding bound per evaluation and fall back
//! to the Bessel form (density) or a positive gamma mixture (distribution) when
//! the bound exceeds [`HYBRID_REL_TOL`] of the result.

use crate::params::RfLinkParams;
use crate::specfun::gamma::{factorial, gamma, ln_gamma, reg_pq};
use crate::specfun::ln_bessel_i_scaled;

/// Relative rounding bound above which the finite sums are not trusted.
pub const HYBRID_REL_TOL: f64 = 1e-12;

const MIXTURE_MAX_TERMS: usize = 100_000;

#[derive(Debug, Clone)]
pub struct EtaMuMrc {
    params: RfLinkParams,
    n: u32,
    psi: [f64; 2],
    // K·B_{α,β}: density coefficient of x^(n-β-1) e^(-ψ_α x)
    kb: [Vec<f64>; 2],
    // K·C_{α,β}
    kc: [Vec<f64>; 2],
    // survival polynomial: sf = Σ_α e^(-ψ_α x) Σ_j surv[α][j] x^j
    surv: [Vec<f64>; 2],
    surv_abs: [Vec<f64>; 2],
    cond: f64,
    // gamma-mixture form: Σ_k w_k Gamma(2n + 2k, rate)
    mix_rate: f64,
    mix_q: f64,
    mix_w0: f64,
    ln_bessel_pre: f64,
    bessel_arg: f64,
}

impl EtaMuMrc {
    pub fn new(params: &RfLinkParams) -> Self {
        let n = params.shape();
        let nf = n as f64;
        let (h, big_h) = (params.h(), params.H());
        let phi = params.avg_snr();
        let (psi1, psi2) = params.psi();
        let psi = [psi1, psi2];
        let k = (h / big_h).powi(n as i32) / gamma(nf);

        let mut kb = [
            Vec::with_capacity(n as usize),
            Vec::with_capacity(n as usize),
        ];
        let mut kc = [
            Vec::with_capacity(n as usize),
            Vec::with_capacity(n as usize),
        ];
        let sign_n = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        for beta in 0..n {
            let bf = beta as f64;
            let p = nf - bf;
            // Γ(n+β) n^(n-β) / (β! Γ(n-β) 4^β φ^(n-β) H^β)
            let common = (ln_gamma(nf + bf) + p * nf.ln()
                - factorial(beta).ln()
                - ln_gamma(p)
                - bf * 4f64.ln()
                - p * phi.ln()
                - bf * big_h.abs().ln())
            .exp();
            let h_sign = if big_h < 0.0 && beta % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            let sign_beta = if beta % 2 == 0 { 1.0 } else { -1.0 };
            let b1 = k * sign_beta * h_sign * common;
            let b2 = k * sign_n * h_sign * common;
            kb[0].push(b1);
            kb[1].push(b2);
            // C = B Γ(n-β) / ψ^(n-β)
            let g = gamma(p);
            kc[0].push(b1 * g / psi[0].powf(p));
            kc[1].push(b2 * g / psi[1].powf(p));
        }

        let mut surv = [vec![0.0; n as usize], vec![0.0; n as usize]];
        let mut surv_abs = [vec![0.0; n as usize], vec![0.0; n as usize]];
        for a in 0..2 {
            for j in 0..n as usize {
                let scale = (j as f64 * psi[a].ln() - factorial(j as u32).ln()).exp();
                let mut s = crate::specfun::Neumaier::new();
                let mut sa = 0.0;
                for c in &kc[a][..n as usize - j] {
                    s.add(*c);
                    sa += c.abs();
                }
                surv[a][j] = s.value() * scale;
                surv_abs[a][j] = sa * scale;
            }
        }
        let cond = kc.iter().flatten().map(|c| c.abs()).sum();

        let mix_rate = 2.0 * nf * h / phi;
        let mix_q = (big_h / h).powi(2);
        let mix_w0 = -nf * h.ln();

        let ln_bessel_pre = 0.5 * std::f64::consts::PI.ln()
            + std::f64::consts::LN_2
            + (nf + 0.5) * nf.ln()
            + nf * h.ln()
            - ln_gamma(nf)
            - (nf - 0.5) * big_h.abs().ln()
            - (nf + 0.5) * phi.ln();
        let bessel_arg = 2.0 * nf * big_h.abs() / phi;

        Self {
            params: *params,
            n,
            psi,
            kb,
            kc,
            surv,
            surv_abs,
            cond,
            mix_rate,
            mix_q,
            mix_w0,
            ln_bessel_pre,
            bessel_arg,
        }
    }

    pub fn params(&self) -> &RfLinkParams {
        &self.params
    }

    /// n = N·mu.
    pub fn shape(&self) -> u32 {
        self.n
    }

    /// (ψ_1, ψ_2).
    pub fn psi(&self) -> [f64; 2] {
        self.psi
    }

    /// Scale knees 1/ψ_α.
    pub fn knees(&self) -> [f64; 2] {
        [1.0 / self.psi[0], 1.0 / self.psi[1]]
    }

    /// K·B_{α,β} (α in 0..2, β in 0..n).
    pub fn density_coefficient(&self, alpha: usize, beta: usize) -> f64 {
        self.kb[alpha][beta]
    }

    /// K·C_{α,β}.
    pub fn cdf_coefficient(&self, alpha: usize, beta: usize) -> f64 {
        self.kc[alpha][beta]
    }

    /// Coefficients of x^j in the survival polynomial attached to e^(-ψ_α x).
    pub fn survival_poly(&self, alpha: usize) -> &[f64] {
        &self.surv[alpha]
    }

    /// K Σ|C_{α,β}|: the factor by which rounding errors are amplified in the
    /// finite-sum distribution function (1 means no cancellation).
    pub fn closed_form_condition(&self) -> f64 {
        self.cond
    }

    /// Finite-sum density and the sum of absolute term values.
    pub fn pdf_series_with_bound(&self, x: f64) -> (f64, f64) {
        if x <= 0.0 {
            return (0.0, 0.0);
        }
        let lx = x.ln();
        let mut s = crate::specfun::Neumaier::new();
        for a in 0..2 {
            for (beta, c) in self.kb[a].iter().enumerate() {
                let p = (self.n as usize - beta - 1) as f64;
                s.add(c * (p * lx - self.psi[a] * x).exp());
            }
        }
        (s.value(), s.abs_sum())
    }

    /// Density from the finite sum only.
    pub fn pdf_series(&self, x: f64) -> f64 {
        self.pdf_series_with_bound(x).0
    }

    /// Density from the Bessel-I form.
    pub fn pdf_bessel(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let nf = self.n as f64;
        let z = self.bessel_arg * x;
        let ln_i = ln_bessel_i_scaled(nf - 0.5, z);
        // e^{-2nhx/φ} I(z) = e^{-(2nhx/φ - z)} Ie(z)
        let decay = (self.mix_rate - self.bessel_arg) * x;
        (self.ln_bessel_pre + (nf - 0.5) * x.ln() + ln_i - decay).exp()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let (v, abs) = self.pdf_series_with_bound(x);
        if x <= 0.0 {
            return 0.0;
        }
        if rounding_bound(abs, self.n) <= HYBRID_REL_TOL * v {
            v
        } else {
            self.pdf_bessel(x)
        }
    }

    /// Survival function from the finite sum, with its rounding bound.
    pub fn sf_closed_with_bound(&self, x: f64) -> (f64, f64) {
        if x <= 0.0 {
            return (1.0, 0.0);
        }
        let lx = x.ln();
        let mut s = crate::specfun::Neumaier::new();
        let mut abs = 0.0;
        for a in 0..2 {
            for (j, (c, ca)) in self.surv[a].iter().zip(&self.surv_abs[a]).enumerate() {
                let e = (j as f64 * lx - self.psi[a] * x).exp();
                s.add(c * e);
                abs += ca * e;
            }
        }
        (s.value(), rounding_bound(abs, self.n))
    }

    /// Distribution function from the finite sum only.
    pub fn cdf_closed(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        1.0 - self.sf_closed_with_bound(x).0
    }

    /// (cdf, sf) from the positive gamma mixture.
    pub fn mixture(&self, x: f64) -> (f64, f64) {
        if x <= 0.0 {
            return (0.0, 1.0);
        }
        let y = self.mix_rate * x;
        let nf = self.n as f64;
        let q = self.mix_q;
        let mut lw = self.mix_w0;
        let mut cdf = 0.0;
        let mut sf = 0.0;
        for k in 0..MIXTURE_MAX_TERMS {
            let kf = k as f64;
            let w = lw.exp();
            let (p, qq) = reg_pq(2.0 * nf + 2.0 * kf, y);
            cdf += w * p;
            sf += w * qq;
            let ratio = q * (nf + kf) / (kf + 1.0);
            if q == 0.0 {
                break;
            }
            if ratio < 1.0 {
                // remaining weight is at most w·ratio/(1 - ratio); P falls and Q ≤ 1 along the tail
                let tail = w * ratio / (1.0 - ratio);
                if (tail * p <= 1e-17 * cdf && tail <= 1e-17 * sf) || tail < 1e-300 {
                    break;
                }
            }
            lw += ratio.ln();
        }
        (cdf.min(1.0), sf.min(1.0))
    }

    pub fn cdf_mixture(&self, x: f64) -> f64 {
        self.mixture(x).0
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let (s, err) = self.sf_closed_with_bound(x);
        let f = 1.0 - s;
        if err <= HYBRID_REL_TOL * f {
            f.clamp(0.0, 1.0)
        } else {
            self.mixture(x).0
        }
    }

    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        let (s, err) = self.sf_closed_with_bound(x);
        if err <= HYBRID_REL_TOL * s {
            s.clamp(0.0, 1.0)
        } else {
            let (c, sm) = self.mixture(x);
            if c < 0.5 {
                1.0 - c
            } else {
                sm
            }
        }
    }
}

fn rounding_bound(abs_sum: f64, n: u32) -> f64 {
    (n as f64 + 4.0) * f64::EPSILON * abs_sum
}
