//! Secrecy metrics from their defining integrals and from term-wise assemblies.
//!
//! ASC is reported in nats per channel use.

mod series;
pub(crate) mod terms;

pub use series::{
    asc_b_term, asc_series_1, asc_series_1_unchecked, asc_series_2, asc_series_2_unchecked,
    asc_term, default_cap, series2_diagnostics, sop_lower_closed, sop_term, spsc_closed, AscBTerm,
    AscTerm, B1Route, Series2Diagnostics, SopTerm,
};

use crate::error::Result;
use crate::link_stats::{DualHop, EtaMuMrc};
use crate::params::SystemConfig;
use crate::specfun::Quadrature;

pub const METRIC_TOL_ABS: f64 = 1e-12;
pub const METRIC_TOL_REL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    DirectQuadrature,
    PaperSeries1,
    PaperSeries2,
    ClosedForm,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricResult {
    pub value: f64,
    pub error_estimate: f64,
    pub method: Method,
}

/// Precomputed distributions for one configuration.
#[derive(Debug, Clone)]
pub struct Scenario {
    cfg: SystemConfig,
    pub(crate) dual: DualHop,
    pub(crate) eav: EtaMuMrc,
    pub(crate) sigma: f64,
    knees: Vec<f64>,
}

impl Scenario {
    pub fn new(cfg: &SystemConfig) -> Self {
        let dual = DualHop::new(cfg);
        let eav = EtaMuMrc::new(&cfg.se);
        let mut knees = dual.knees();
        knees.extend(eav.knees());
        knees.retain(|k| k.is_finite() && *k > 0.0);
        knees.sort_by(f64::total_cmp);
        knees.dedup();
        Self {
            cfg: *cfg,
            dual,
            eav,
            sigma: cfg.sigma(),
            knees,
        }
    }

    pub fn config(&self) -> &SystemConfig {
        &self.cfg
    }

    pub fn main_link(&self) -> &DualHop {
        &self.dual
    }

    pub fn eavesdropper(&self) -> &EtaMuMrc {
        &self.eav
    }

    /// Scale points of all three hops.
    pub fn knees(&self) -> &[f64] {
        &self.knees
    }

    fn quad(&self) -> Quadrature {
        Quadrature::new()
            .tol_abs(METRIC_TOL_ABS)
            .tol_rel(METRIC_TOL_REL)
            .breakpoints(self.knees.iter().copied())
    }

    /// ∫ F_e(x) (1 - F_f(x)) / (1+x) dx.
    pub fn asc_direct(&self) -> Result<MetricResult> {
        let r = self
            .quad()
            .semi_infinite(|x| self.eav.cdf(x) * self.dual.sf(x) / (1.0 + x))?;
        Ok(MetricResult {
            value: r.value.max(0.0),
            error_estimate: r.abs_error_estimate,
            method: Method::DirectQuadrature,
        })
    }

    /// Pr(γ_f ≤ σ γ_e) = ∫ F_f(σx) f_e(x) dx.
    pub fn sop_lower(&self) -> Result<MetricResult> {
        let s = self.sigma;
        let q = self
            .quad()
            .breakpoints(self.dual.knees().into_iter().map(|k| k / s));
        let r = q.semi_infinite(|x| self.dual.cdf(s * x) * self.eav.pdf(x))?;
        Ok(MetricResult {
            value: r.value.clamp(0.0, 1.0),
            error_estimate: r.abs_error_estimate,
            method: Method::DirectQuadrature,
        })
    }

    /// 1 - SOP_L at zero target rate.
    pub fn spsc(&self) -> Result<MetricResult> {
        let base = if self.cfg.target_rate() == 0.0 {
            self.sop_lower()?
        } else {
            Scenario::new(&self.cfg.with_target_rate(0.0)?).sop_lower()?
        };
        Ok(MetricResult {
            value: 1.0 - base.value,
            error_estimate: base.error_estimate,
            method: base.method,
        })
    }
}

pub fn asc_direct(cfg: &SystemConfig) -> Result<MetricResult> {
    Scenario::new(cfg).asc_direct()
}

/// Lower-bound secrecy outage probability through its defining integral.
pub fn sop_lower(cfg: &SystemConfig) -> Result<MetricResult> {
    Scenario::new(cfg).sop_lower()
}

pub fn spsc(cfg: &SystemConfig) -> Result<MetricResult> {
    Scenario::new(cfg).spsc()
}

/// Exact secrecy outage probability, which has no analytic path here; it is
/// estimated by simulation so the gap to the lower bound can be observed.
pub fn sop_exact_mc_reference(cfg: &SystemConfig, n: usize, seed: u64) -> Result<MetricResult> {
    use crate::monte_carlo::{estimate_metric, McMetric, RngStream, SnrForm};
    let est = estimate_metric(
        McMetric::SopExact,
        cfg,
        n,
        SnrForm::Exact,
        &RngStream::new(seed, 0),
    )?;
    Ok(MetricResult {
        value: est.mean,
        error_estimate: est.std_error,
        method: Method::MonteCarlo,
    })
}
