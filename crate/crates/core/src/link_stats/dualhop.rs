//! End-to-end SNR of the relayed link under the min approximation.

use super::etamu::EtaMuMrc;
use super::megg::MeggDist;
use super::tas::TasExpansion;
use crate::error::Result;
use crate::params::SystemConfig;

#[derive(Debug, Clone)]
pub struct DualHop {
    rf: EtaMuMrc,
    n_s: u32,
    uowc: MeggDist,
    expansion: Result<TasExpansion>,
}

impl DualHop {
    pub fn new(cfg: &SystemConfig) -> Self {
        let rf = EtaMuMrc::new(&cfg.sr);
        let expansion = TasExpansion::new(&rf, cfg.n_s());
        Self {
            rf,
            n_s: cfg.n_s(),
            uowc: MeggDist::new(&cfg.rd),
            expansion,
        }
    }

    pub fn rf(&self) -> &EtaMuMrc {
        &self.rf
    }

    pub fn uowc(&self) -> &MeggDist {
        &self.uowc
    }

    pub fn n_s(&self) -> u32 {
        self.n_s
    }

    pub fn expansion(&self) -> Result<&TasExpansion> {
        self.expansion.as_ref().map_err(Clone::clone)
    }

    /// CDF of the selected-antenna SNR, F(x)^N_s.
    pub fn tas_cdf(&self, x: f64) -> f64 {
        self.rf.cdf(x).powi(self.n_s as i32)
    }

    pub fn tas_sf(&self, x: f64) -> f64 {
        if self.n_s == 1 {
            return self.rf.sf(x);
        }
        -(self.n_s as f64 * (-self.rf.sf(x)).ln_1p()).exp_m1()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let fr = self.tas_cdf(x);
        let fd = self.uowc.cdf(x);
        let f = fr + fd - fr * fd;
        // near 1 the survival product keeps the rounding monotone
        if f > 0.5 {
            1.0 - self.sf(x)
        } else {
            f
        }
    }

    pub fn sf(&self, x: f64) -> f64 {
        self.tas_sf(x) * self.uowc.sf(x)
    }

    /// Same CDF with the selection term taken from the exponential-polynomial
    /// expansion.
    pub fn cdf_expanded(&self, x: f64) -> Result<f64> {
        let t = self.expansion()?.eval(x);
        let fd = self.uowc.cdf(x);
        Ok(t * (1.0 - fd) + fd)
    }

    /// Interior scale points for quadrature over this distribution.
    pub fn knees(&self) -> Vec<f64> {
        let mut k = self.rf.knees().to_vec();
        k.extend(self.uowc.knees());
        k
    }
}
