//! Per-hop and end-to-end SNR distributions.

pub mod dualhop;
pub mod eav;
pub mod etamu;
pub mod megg;
pub mod tas;

pub use dualhop::DualHop;
pub use eav::{SeriesValue, DEFAULT_SERIES_TERMS};
pub use etamu::EtaMuMrc;
pub use megg::MeggDist;
pub use tas::{TasExpansion, TasTerm};

use crate::error::{Error, Result};
use crate::params::{MeggParams, RfLinkParams, SystemConfig};

fn check_x(func: &'static str, x: f64) -> Result<()> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            func,
            reason: format!("x = {x} must be >= 0"),
        })
    }
}

pub fn etamu_mrc_pdf(x: f64, p: &RfLinkParams) -> Result<f64> {
    check_x("etamu_mrc_pdf", x)?;
    Ok(EtaMuMrc::new(p).pdf(x))
}

pub fn etamu_mrc_cdf(x: f64, p: &RfLinkParams) -> Result<f64> {
    check_x("etamu_mrc_cdf", x)?;
    Ok(EtaMuMrc::new(p).cdf(x))
}

pub fn tas_cdf(x: f64, p: &RfLinkParams, n_s: u32) -> Result<f64> {
    check_x("tas_cdf", x)?;
    if n_s == 0 {
        return Err(crate::error::invalid("n_s", "must be >= 1"));
    }
    Ok(EtaMuMrc::new(p).cdf(x).powi(n_s as i32))
}

pub fn megg_pdf(x: f64, p: &MeggParams) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            func: "megg_pdf",
            reason: format!("x = {x} must be > 0"),
        });
    }
    Ok(MeggDist::new(p).pdf(x))
}

pub fn megg_cdf(x: f64, p: &MeggParams) -> Result<f64> {
    check_x("megg_cdf", x)?;
    Ok(MeggDist::new(p).cdf(x))
}

pub fn eav_pdf(x: f64, p: &RfLinkParams) -> Result<f64> {
    etamu_mrc_pdf(x, p)
}

pub fn eav_cdf(x: f64, p: &RfLinkParams) -> Result<f64> {
    etamu_mrc_cdf(x, p)
}

pub fn eav_cdf_series(x: f64, p: &RfLinkParams, terms: usize) -> Result<SeriesValue> {
    check_x("eav_cdf_series", x)?;
    eav::cdf_series(&EtaMuMrc::new(p), x, terms)
}

pub fn dualhop_cdf(x: f64, cfg: &SystemConfig) -> Result<f64> {
    check_x("dualhop_cdf", x)?;
    Ok(DualHop::new(cfg).cdf(x))
}
