//! Link and system parameter types.
//!
//! Every type validates on construction and is immutable afterwards. SNRs are
//! linear throughout; dB only appears at the configuration boundary.

use crate::error::{invalid, Error, Result};
use crate::specfun::gamma::gamma;

/// Parameterisation of the eta-mu distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EtaMuFormat {
    /// eta is the in-phase/quadrature scattered power ratio, 0 < eta.
    FormatI,
    /// eta is the in-phase/quadrature correlation, -1 < eta < 1.
    FormatII,
}

/// Relative size of |H| below which the distribution is treated as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-9;

/// Returns `(h, H)` for the given eta and format.
#[allow(non_snake_case)]
pub fn derive_h_H(eta: f64, format: EtaMuFormat) -> Result<(f64, f64)> {
    if !eta.is_finite() {
        return Err(invalid("eta", "must be finite"));
    }
    let (h, big_h) = match format {
        EtaMuFormat::FormatI => {
            if eta <= 0.0 {
                return Err(invalid("eta", "format I needs eta > 0"));
            }
            ((2.0 + 1.0 / eta + eta) / 4.0, (1.0 / eta - eta) / 4.0)
        }
        EtaMuFormat::FormatII => {
            if eta <= -1.0 || eta >= 1.0 {
                return Err(invalid("eta", "format II needs -1 < eta < 1"));
            }
            let d = 1.0 - eta * eta;
            (1.0 / d, eta / d)
        }
    };
    if big_h.abs() < DEGENERATE_TOL * h {
        return Err(Error::DegenerateEta { eta });
    }
    Ok((h, big_h))
}

/// One eta-mu hop with MRC over `n_antennas` branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfLinkParams {
    eta: f64,
    mu: u32,
    n_antennas: u32,
    avg_snr: f64,
    format: EtaMuFormat,
    h: f64,
    big_h: f64,
}

impl RfLinkParams {
    pub fn new(
        eta: f64,
        mu: u32,
        n_antennas: u32,
        avg_snr: f64,
        format: EtaMuFormat,
    ) -> Result<Self> {
        if mu == 0 {
            return Err(invalid("mu", "must be a positive integer"));
        }
        if n_antennas == 0 {
            return Err(invalid("n_antennas", "must be a positive integer"));
        }
        if !(avg_snr > 0.0 && avg_snr.is_finite()) {
            return Err(invalid("avg_snr", "must be finite and > 0"));
        }
        let (h, big_h) = derive_h_H(eta, format)?;
        Ok(Self {
            eta,
            mu,
            n_antennas,
            avg_snr,
            format,
            h,
            big_h,
        })
    }

    /// Accepts a real-valued mu, rejecting non-integers.
    pub fn with_real_mu(
        eta: f64,
        mu: f64,
        n_antennas: u32,
        avg_snr: f64,
        format: EtaMuFormat,
    ) -> Result<Self> {
        if !(mu >= 1.0 && mu.fract() == 0.0 && mu <= u32::MAX as f64) {
            return Err(invalid("mu", format!("{mu} is not a positive integer")));
        }
        Self::new(eta, mu as u32, n_antennas, avg_snr, format)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn mu(&self) -> u32 {
        self.mu
    }
    pub fn n_antennas(&self) -> u32 {
        self.n_antennas
    }
    pub fn avg_snr(&self) -> f64 {
        self.avg_snr
    }
    pub fn format(&self) -> EtaMuFormat {
        self.format
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    #[allow(non_snake_case)]
    pub fn H(&self) -> f64 {
        self.big_h
    }

    /// Shape of the combined signal, N·mu.
    pub fn shape(&self) -> u32 {
        self.mu * self.n_antennas
    }

    /// Decay rates (psi_1, psi_2) of the two exponential families.
    pub fn psi(&self) -> (f64, f64) {
        let k = 2.0 * self.shape() as f64 / self.avg_snr;
        (k * (self.h - self.big_h), k * (self.h + self.big_h))
    }

    pub fn with_avg_snr(&self, avg_snr: f64) -> Result<Self> {
        Self::new(self.eta, self.mu, self.n_antennas, avg_snr, self.format)
    }
    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        Self::new(eta, self.mu, self.n_antennas, self.avg_snr, self.format)
    }
    pub fn with_mu(&self, mu: u32) -> Result<Self> {
        Self::new(self.eta, mu, self.n_antennas, self.avg_snr, self.format)
    }
    pub fn with_n_antennas(&self, n: u32) -> Result<Self> {
        Self::new(self.eta, self.mu, n, self.avg_snr, self.format)
    }
}

/// Detection technique at the destination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detection {
    /// Heterodyne detection, r = 1.
    Hd,
    /// Intensity modulation with direct detection, r = 2.
    ImDd,
}

impl Detection {
    pub fn r(self) -> u32 {
        match self {
            Detection::Hd => 1,
            Detection::ImDd => 2,
        }
    }
}

/// Mixture exponential-generalized-Gamma hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeggParams {
    omega: f64,
    lambda: f64,
    a: f64,
    b: f64,
    c: f64,
    detection: Detection,
    avg_snr_d: f64,
}

impl MeggParams {
    pub fn new(
        omega: f64,
        lambda: f64,
        a: f64,
        b: f64,
        c: f64,
        detection: Detection,
        avg_snr_d: f64,
    ) -> Result<Self> {
        if !(omega > 0.0 && omega <= 1.0) {
            return Err(invalid("omega", "must lie in (0, 1]"));
        }
        for (name, v) in [
            ("lambda", lambda),
            ("a", a),
            ("b", b),
            ("c", c),
            ("avg_snr_d", avg_snr_d),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, "must be finite and > 0"));
            }
        }
        let p = Self {
            omega,
            lambda,
            a,
            b,
            c,
            detection,
            avg_snr_d,
        };
        let psi = electrical_snr(&p);
        if !(psi > 0.0 && psi.is_finite()) {
            return Err(invalid(
                "avg_snr_d",
                "electrical SNR is not finite and positive",
            ));
        }
        Ok(p)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn detection(&self) -> Detection {
        self.detection
    }
    pub fn avg_snr_d(&self) -> f64 {
        self.avg_snr_d
    }

    pub fn with_avg_snr_d(&self, v: f64) -> Result<Self> {
        Self::new(
            self.omega,
            self.lambda,
            self.a,
            self.b,
            self.c,
            self.detection,
            v,
        )
    }
    pub fn with_detection(&self, d: Detection) -> Result<Self> {
        Self::new(
            self.omega,
            self.lambda,
            self.a,
            self.b,
            self.c,
            d,
            self.avg_snr_d,
        )
    }

    /// Second moment of the irradiance, E[I^2].
    pub fn irradiance_second_moment(&self) -> f64 {
        2.0 * self.omega * self.lambda * self.lambda
            + self.b * self.b * (1.0 - self.omega) * gamma(self.a + 2.0 / self.c) / gamma(self.a)
    }

    /// Mean irradiance, E[I].
    pub fn irradiance_mean(&self) -> f64 {
        self.omega * self.lambda
            + self.b * (1.0 - self.omega) * gamma(self.a + 1.0 / self.c) / gamma(self.a)
    }

    /// Scale knees Psi·lambda^r and Psi·b^r, used as quadrature breakpoints.
    pub fn knees(&self) -> [f64; 2] {
        let psi = electrical_snr(self);
        let r = self.detection.r() as i32;
        [psi * self.lambda.powi(r), psi * self.b.powi(r)]
    }
}

/// Electrical SNR Psi_r of the optical hop.
pub fn electrical_snr(p: &MeggParams) -> f64 {
    match p.detection {
        Detection::Hd => p.avg_snr_d,
        Detection::ImDd => p.avg_snr_d / p.irradiance_second_moment(),
    }
}

/// Constants of one mixture branch: the branch density is
/// `M x^-1 (N x^V)^U exp(-N x^V)` and its CDF is `S·γ(U, N x^V)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeggBranch {
    pub n: f64,
    pub v: f64,
    pub u: f64,
    pub m: f64,
    pub s: f64,
}

/// Kernel constants for both branches. Branch 2 has zero weight when omega = 1.
pub fn megg_kernel_constants(p: &MeggParams) -> [MeggBranch; 2] {
    let psi = electrical_snr(p);
    let r = p.detection.r() as f64;
    let ga = gamma(p.a);
    [
        MeggBranch {
            n: 1.0 / (p.lambda * psi.powf(1.0 / r)),
            v: 1.0 / r,
            u: 1.0,
            m: p.omega / r,
            s: p.omega,
        },
        MeggBranch {
            n: 1.0 / (p.b.powf(p.c) * psi.powf(p.c / r)),
            v: p.c / r,
            u: p.a,
            m: p.c * (1.0 - p.omega) / (r * ga),
            s: (1.0 - p.omega) / ga,
        },
    ]
}

/// Full four-node scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub sr: RfLinkParams,
    pub se: RfLinkParams,
    pub rd: MeggParams,
    n_s: u32,
    target_rate: f64,
}

impl SystemConfig {
    pub fn new(
        sr: RfLinkParams,
        se: RfLinkParams,
        rd: MeggParams,
        n_s: u32,
        target_rate: f64,
    ) -> Result<Self> {
        if n_s == 0 {
            return Err(invalid("n_s", "must be a positive integer"));
        }
        if !(target_rate >= 0.0 && target_rate.is_finite()) {
            return Err(invalid("target_rate", "must be finite and >= 0"));
        }
        Ok(Self {
            sr,
            se,
            rd,
            n_s,
            target_rate,
        })
    }

    pub fn n_s(&self) -> u32 {
        self.n_s
    }
    /// Target secrecy rate in bits/s/Hz.
    pub fn target_rate(&self) -> f64 {
        self.target_rate
    }
    /// sigma = 2^target_rate.
    pub fn sigma(&self) -> f64 {
        self.target_rate.exp2()
    }

    pub fn with_n_s(&self, n_s: u32) -> Result<Self> {
        Self::new(self.sr, self.se, self.rd, n_s, self.target_rate)
    }
    pub fn with_target_rate(&self, rate: f64) -> Result<Self> {
        Self::new(self.sr, self.se, self.rd, self.n_s, rate)
    }
    pub fn with_sr(&self, sr: RfLinkParams) -> Self {
        Self { sr, ..*self }
    }
    pub fn with_se(&self, se: RfLinkParams) -> Self {
        Self { se, ..*self }
    }
    pub fn with_rd(&self, rd: MeggParams) -> Self {
        Self { rd, ..*self }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn format_one_values() {
        let (h, hh) = derive_h_H(2.2, EtaMuFormat::FormatI).unwrap();
        assert_relative_eq!(h, 1.163_636_363_636_363_6, max_relative = 1e-15);
        assert_relative_eq!(hh, -0.436_363_636_363_636_4, max_relative = 1e-14);
    }

    #[test]
    fn format_two_values() {
        let (h, hh) = derive_h_H(0.5, EtaMuFormat::FormatII).unwrap();
        assert_relative_eq!(h, 4.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(hh, 2.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn degenerate_points() {
        assert_eq!(
            derive_h_H(1.0, EtaMuFormat::FormatI),
            Err(Error::DegenerateEta { eta: 1.0 })
        );
        assert_eq!(
            derive_h_H(0.0, EtaMuFormat::FormatII),
            Err(Error::DegenerateEta { eta: 0.0 })
        );
        assert!(derive_h_H(1.0 + 1e-3, EtaMuFormat::FormatI).is_ok());
        assert!(derive_h_H(-1.0, EtaMuFormat::FormatII).is_err());
        assert!(derive_h_H(0.0, EtaMuFormat::FormatI).is_err());
    }

    #[test]
    fn non_integer_mu_rejected() {
        assert!(RfLinkParams::with_real_mu(2.2, 1.5, 1, 1.0, EtaMuFormat::FormatI).is_err());
        assert!(RfLinkParams::with_real_mu(2.2, 2.0, 1, 1.0, EtaMuFormat::FormatI).is_ok());
        assert!(RfLinkParams::new(2.2, 0, 1, 1.0, EtaMuFormat::FormatI).is_err());
    }

    #[test]
    fn electrical_snr_examples() {
        let hd = MeggParams::new(0.21, 0.33, 1.43, 1.98, 0.47, Detection::Hd, 31.62).unwrap();
        assert_eq!(electrical_snr(&hd), 31.62);
        let pure = MeggParams::new(1.0, 0.5, 1.0, 1.0, 1.0, Detection::ImDd, 10.0).unwrap();
        assert_relative_eq!(electrical_snr(&pure), 20.0, max_relative = 1e-15);
        // 10 / (2·0.21·0.33² + 1.98²·0.79·Γ(1.43 + 2/0.47)/Γ(1.43)), 30-digit reference
        let im = MeggParams::new(0.21, 0.33, 1.43, 1.98, 0.47, Detection::ImDd, 10.0).unwrap();
        assert_relative_eq!(
            electrical_snr(&im),
            0.040_403_831_694_697_944,
            max_relative = 1e-12
        );
    }

    #[test]
    fn kernel_constants_examples() {
        let p = MeggParams::new(1.0, 2.0, 1.0, 1.0, 1.0, Detection::Hd, 1.0).unwrap();
        let [b1, _] = megg_kernel_constants(&p);
        assert_eq!((b1.n, b1.v, b1.u, b1.m, b1.s), (0.5, 1.0, 1.0, 1.0, 1.0));

        let eg = MeggParams::new(0.4, 1.0, 1.7, 1.2, 1.0, Detection::ImDd, 3.0).unwrap();
        let [_, b2] = megg_kernel_constants(&eg);
        assert_eq!(b2.v, 0.5);
        assert_eq!(b2.u, 1.7);

        // 30-digit reference values
        let im = MeggParams::new(0.21, 0.33, 1.43, 1.98, 0.47, Detection::ImDd, 10.0).unwrap();
        let [k1, k2] = megg_kernel_constants(&im);
        assert_relative_eq!(k1.n, 15.075_606_165_884_109, max_relative = 1e-12);
        assert_eq!((k1.v, k1.u, k1.m, k1.s), (0.5, 1.0, 0.105, 0.21));
        assert_relative_eq!(k2.n, 1.541_906_575_631_759_8, max_relative = 1e-12);
        assert_relative_eq!(k2.v, 0.235, max_relative = 1e-15);
        assert_eq!(k2.u, 1.43);
        assert_relative_eq!(k2.m, 0.209_528_676_628_435_5, max_relative = 1e-12);
        assert_relative_eq!(k2.s, 0.891_611_389_908_236_2, max_relative = 1e-12);
    }

    #[test]
    fn db_round_trip() {
        assert_relative_eq!(
            db_to_linear(15.0),
            31.622_776_601_683_793,
            max_relative = 1e-15
        );
        for db in [-20.0, -3.0, 0.0, 7.5, 40.0] {
            assert!((linear_to_db(db_to_linear(db)) - db).abs() <= 1e-12);
        }
    }
}
