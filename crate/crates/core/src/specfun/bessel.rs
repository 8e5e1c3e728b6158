//! Modified Bessel function of the first kind.

use super::gamma::ln_gamma;

/// ln(I_nu(z) e^{-z}) for nu >= 0, z >= 0, from the ascending series.
///
/// The terms are accumulated relative to the first one, so the result stays
/// finite where I_nu itself overflows. Intended for moderate z (the series needs
/// about z terms).
pub fn ln_bessel_i_scaled(nu: f64, z: f64) -> f64 {
    debug_assert!(nu >= 0.0 && z >= 0.0);
    if z == 0.0 {
        return if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let q = 0.25 * z * z;
    let ln_first = nu * (0.5 * z).ln() - ln_gamma(nu + 1.0);
    // Σ_k t_k with t_0 = 1, t_{k+1}/t_k = q/((k+1)(k+1+nu)); rescale when large
    let mut sum = 1.0f64;
    let mut term = 1.0f64;
    let mut ln_scale = 0.0f64;
    let mut k = 0.0f64;
    loop {
        term *= q / ((k + 1.0) * (k + 1.0 + nu));
        sum += term;
        k += 1.0;
        if sum > 1e280 {
            ln_scale += sum.ln();
            term /= sum;
            sum = 1.0;
        }
        // terms decrease once k exceeds the peak near z/2
        if term < sum * 1e-17 && k * (k + nu) > q {
            break;
        }
    }
    ln_first + ln_scale + sum.ln() - z
}

/// I_nu(z) e^{-z}.
pub fn bessel_i_scaled(nu: f64, z: f64) -> f64 {
    ln_bessel_i_scaled(nu, z).exp()
}
