//! Library values against independent test-side references: brute-force
//! Simpson integration, a power-series Bessel function, and the densities
//! written directly from their definitions.

use approx::assert_relative_eq;
use uowc_secrecy::analytic::{spsc, spsc_closed};
use uowc_secrecy::battery::battery;
use uowc_secrecy::link_stats::{EtaMuMrc, MeggDist};
use uowc_secrecy::params::{electrical_snr, Detection, EtaMuFormat, MeggParams, RfLinkParams};
use uowc_secrecy::specfun::{
    bessel_i_scaled, lower_incomplete_gamma, upper_incomplete_gamma, Quadrature,
};

/// Composite Simpson on [a, b] with n (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// ∫_0^∞ f via x = t/(1-t), split at t = 1/2 to keep the map gentle.
fn simpson_semi_infinite(f: impl Fn(f64) -> f64, scale: f64) -> f64 {
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let x = scale * t / (1.0 - t);
        f(x) * scale / ((1.0 - t) * (1.0 - t))
    };
    simpson(g, 0.0, 0.5, 20_000) + simpson(g, 0.5, 1.0 - 1e-9, 200_000)
}

/// e^{-z} I_ν(z) from the ascending series, summed in log space.
fn bessel_i_scaled_series(nu: f64, z: f64) -> f64 {
    let lh = (z / 2.0).ln();
    let logs: Vec<f64> = (0..(z as usize + 200))
        .map(|k| {
            let k = k as f64;
            (2.0 * k + nu) * lh - libm::lgamma(k + 1.0) - libm::lgamma(k + nu + 1.0)
        })
        .collect();
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = logs.iter().map(|l| (l - m).exp()).sum();
    (m + s.ln() - z).exp()
}

#[test]
fn lower_incomplete_gamma_by_quadrature() {
    let frozen = 0.9714569654284997;
    let q = simpson(|t| t.powf(1.5) * (-t).exp(), 0.0, 3.2, 200_000);
    assert_relative_eq!(q, frozen, max_relative = 1e-10);
    assert_relative_eq!(
        lower_incomplete_gamma(2.5, 3.2).unwrap(),
        frozen,
        max_relative = 1e-13
    );
    for (a, x) in [(0.3, 0.05), (1.0, 2.0), (4.0, 0.7), (7.5, 12.0)] {
        let lo = lower_incomplete_gamma(a, x).unwrap();
        let up = upper_incomplete_gamma(a, x).unwrap();
        assert_relative_eq!(lo + up, libm::tgamma(a), max_relative = 1e-13);
    }
}

#[test]
fn bessel_against_series() {
    for nu in [0.5, 1.5, 2.5, 5.5, 11.5] {
        for z in [1e-3, 0.4, 3.0, 17.0, 80.0] {
            assert_relative_eq!(
                bessel_i_scaled(nu, z),
                bessel_i_scaled_series(nu, z),
                max_relative = 1e-12
            );
        }
    }
    // half-order closed form
    let z: f64 = 2.3;
    let closed = (2.0 / (std::f64::consts::PI * z)).sqrt() * z.sinh() * (-z).exp();
    assert_relative_eq!(bessel_i_scaled(0.5, z), closed, max_relative = 1e-14);
}

#[test]
fn quadrature_rational_exponential() {
    // ∫ x e^{-2x}/(1+x) dx = 1/2 - e^2 E1(2)
    let e1_2 = 0.048_900_510_708_061_12;
    let exact = 0.5 - 2f64.exp() * e1_2;
    let q = Quadrature::new()
        .tol_rel(1e-12)
        .semi_infinite(|x| x * (-2.0 * x).exp() / (1.0 + x))
        .unwrap();
    assert_relative_eq!(q.value, exact, max_relative = 1e-11);
    assert_relative_eq!(
        simpson_semi_infinite(|x| x * (-2.0 * x).exp() / (1.0 + x), 1.0),
        exact,
        max_relative = 1e-9
    );
}

/// η-μ density written from its Bessel-form definition, with μ replaced by
/// the combined cluster count Nμ.
fn etamu_pdf_reference(x: f64, eta: f64, mu: f64, mean: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let h = (2.0 + 1.0 / eta + eta) / 4.0;
    let cap_h = (1.0 / eta - eta) / 4.0;
    let nu = mu - 0.5;
    let z = 2.0 * mu * cap_h.abs() * x / mean;
    let ln_pre = 0.5 * std::f64::consts::PI.ln() + (mu + 0.5) * mu.ln() + mu * h.ln()
        - libm::lgamma(mu)
        - nu * cap_h.abs().ln()
        - (mu + 0.5) * mean.ln()
        + nu * x.ln();
    2.0 * (ln_pre - 2.0 * mu * h * x / mean + z).exp() * bessel_i_scaled_series(nu, z)
}

#[test]
fn etamu_against_definition() {
    for (eta, mu, n, mean) in [
        (0.3, 1, 1, 1.0),
        (2.2, 2, 2, 3.5),
        (4.0, 1, 3, 0.2),
        (0.6, 2, 1, 10.0),
    ] {
        let p = RfLinkParams::new(eta, mu, n, mean, EtaMuFormat::FormatI).unwrap();
        let d = EtaMuMrc::new(&p);
        let m = (mu * n) as f64;
        for k in 1..30 {
            let x = mean * k as f64 / 6.0;
            assert_relative_eq!(
                d.pdf(x),
                etamu_pdf_reference(x, eta, m, mean),
                max_relative = 1e-10
            );
        }
        // the slowest exponential decays at 2Nμ(h - |H|)/mean
        let h = (2.0 + 1.0 / eta + eta) / 4.0;
        let upper = 80.0 * mean / (2.0 * m * (h - ((1.0 / eta - eta) / 4.0).abs()));
        let total = simpson(|x| etamu_pdf_reference(x, eta, m, mean), 0.0, upper, 20_000);
        let first = simpson(
            |x| x * etamu_pdf_reference(x, eta, m, mean),
            0.0,
            upper,
            20_000,
        );
        assert_relative_eq!(total, 1.0, max_relative = 1e-8);
        assert_relative_eq!(first, mean, max_relative = 1e-8);
        for x in [0.1 * mean, mean, 4.0 * mean] {
            let c = simpson(|t| etamu_pdf_reference(t, eta, m, mean), 0.0, x, 20_000);
            assert_relative_eq!(d.cdf(x), c, max_relative = 1e-8);
        }
    }
}

/// mEGG CDF of γ = Ψ I^r by integrating the irradiance density.
fn megg_cdf_reference(x: f64, p: &MeggParams) -> f64 {
    let (w, l, a, b, c) = (p.omega(), p.lambda(), p.a(), p.b(), p.c());
    let r = p.detection().r() as f64;
    let i_max = (x / electrical_snr(p)).powf(1.0 / r);
    let pdf = |i: f64| {
        if i <= 0.0 {
            return 0.0;
        }
        w / l * (-i / l).exp()
            + (1.0 - w) * c * (i / b).powf(a * c) / (i * libm::tgamma(a)) * (-(i / b).powf(c)).exp()
    };
    // substitute i = u^2 to soften the a·c < 1 singularity at the origin
    simpson(|u| 2.0 * u * pdf(u * u), 0.0, i_max.sqrt(), 400_000)
}

#[test]
fn megg_against_irradiance_density() {
    for det in [Detection::Hd, Detection::ImDd] {
        for (w, l, a, b, c) in [
            (0.3, 0.8, 1.6, 1.1, 0.9),
            (0.6, 0.4, 3.0, 0.7, 0.6),
            (0.15, 1.2, 0.8, 0.9, 2.0),
        ] {
            let p = MeggParams::new(w, l, a, b, c, det, 20.0).unwrap();
            let d = MeggDist::new(&p);
            for x in [0.05, 1.0, 7.0, 30.0, 200.0] {
                assert_relative_eq!(
                    d.cdf(x),
                    megg_cdf_reference(x, &p),
                    max_relative = 1e-6,
                    epsilon = 1e-12
                );
            }
        }
    }
}

#[test]
fn spsc_closed_matches_integral_on_battery() {
    for c in battery() {
        let q = spsc(&c).unwrap().value;
        let t = spsc_closed(&c).unwrap().value;
        assert!((q - t).abs() <= 1e-6f64.max(1e-4 * q), "{q} vs {t}");
    }
}
