//! Channel simulator built from the physical constructions of each hop, and
//! metric estimators on top of it.

use crate::error::{invalid, Result};
use crate::params::{electrical_snr, MeggParams, RfLinkParams, SystemConfig};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use rayon::prelude::*;

pub const MIN_SAMPLES: usize = 1000;

/// A reproducible random stream. Distinct stream ids of one seed give
/// independent ChaCha streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream_id);
        r
    }

    /// The k-th child stream, used when one estimate fans out over workers.
    pub fn substream(&self, k: u64) -> RngStream {
        let mixed = self
            .stream_id
            .wrapping_add(1)
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .rotate_left(29)
            ^ k.wrapping_add(1).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        RngStream::new(self.seed, mixed)
    }
}

/// Draws eta-mu MRC SNRs as sums of squared Gaussian components: 2N·mu
/// in-phase/quadrature pairs whose variances have ratio eta (Format I).
#[derive(Debug, Clone, Copy)]
pub struct EtaMuSampler {
    pairs: u32,
    sd_x: f64,
    sd_y: f64,
}

impl EtaMuSampler {
    pub fn new(p: &RfLinkParams) -> Self {
        let (psi1, psi2) = p.psi();
        Self {
            pairs: 2 * p.shape(),
            sd_x: (0.5 / psi2).sqrt(),
            sd_y: (0.5 / psi1).sqrt(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut acc = 0.0;
        for _ in 0..self.pairs {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            acc += (self.sd_x * x).powi(2) + (self.sd_y * y).powi(2);
        }
        acc
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MeggSampler {
    omega: f64,
    lambda: f64,
    b: f64,
    inv_c: f64,
    gamma: Gamma<f64>,
    psi: f64,
    r: i32,
}

impl MeggSampler {
    pub fn new(p: &MeggParams) -> Self {
        Self {
            omega: p.omega(),
            lambda: p.lambda(),
            b: p.b(),
            inv_c: 1.0 / p.c(),
            gamma: Gamma::new(p.a(), 1.0).expect("validated shape"),
            psi: electrical_snr(p),
            r: p.detection().r() as i32,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let irradiance = if u < self.omega {
            let e: f64 = rng.sample(Exp1);
            self.lambda * e
        } else {
            self.b * self.gamma.sample(rng).powf(self.inv_c)
        };
        self.psi * irradiance.powi(self.r)
    }
}

pub fn sample_etamu_mrc<R: Rng + ?Sized>(p: &RfLinkParams, rng: &mut R) -> f64 {
    EtaMuSampler::new(p).sample(rng)
}

/// Best of `n_s` independent MRC draws.
pub fn sample_tas_snr<R: Rng + ?Sized>(p: &RfLinkParams, n_s: u32, rng: &mut R) -> Result<f64> {
    if n_s == 0 {
        return Err(invalid("n_s", "must be >= 1"));
    }
    let s = EtaMuSampler::new(p);
    Ok((0..n_s)
        .map(|_| s.sample(rng))
        .fold(f64::NEG_INFINITY, f64::max))
}

pub fn sample_megg<R: Rng + ?Sized>(p: &MeggParams, rng: &mut R) -> f64 {
    MeggSampler::new(p).sample(rng)
}

/// One end-to-end trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trial {
    /// γr γd / (γr + γd + 1)
    pub exact: f64,
    /// min(γr, γd)
    pub min: f64,
    pub eav: f64,
}

/// Samplers for a whole configuration.
#[derive(Debug, Clone, Copy)]
pub struct EndToEndSampler {
    sr: EtaMuSampler,
    se: EtaMuSampler,
    rd: MeggSampler,
    n_s: u32,
}

impl EndToEndSampler {
    pub fn new(cfg: &SystemConfig) -> Self {
        Self {
            sr: EtaMuSampler::new(&cfg.sr),
            se: EtaMuSampler::new(&cfg.se),
            rd: MeggSampler::new(&cfg.rd),
            n_s: cfg.n_s(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Trial {
        let gr = (0..self.n_s)
            .map(|_| self.sr.sample(rng))
            .fold(f64::NEG_INFINITY, f64::max);
        let gd = self.rd.sample(rng);
        let ge = self.se.sample(rng);
        Trial {
            exact: gr * gd / (gr + gd + 1.0),
            min: gr.min(gd),
            eav: ge,
        }
    }
}

pub fn sample_end_to_end<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Trial {
    EndToEndSampler::new(cfg).sample(rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum McMetric {
    Asc,
    SopLower,
    SopExact,
    Spsc,
}

/// Which end-to-end SNR the metric uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SnrForm {
    Exact,
    Min,
}

impl McMetric {
    /// Per-trial contribution. ASC is in nats.
    pub fn score(self, t: &Trial, form: SnrForm, sigma: f64) -> f64 {
        let gf = match form {
            SnrForm::Exact => t.exact,
            SnrForm::Min => t.min,
        };
        let ind = |b: bool| if b { 1.0 } else { 0.0 };
        match self {
            McMetric::Asc => (gf.ln_1p() - t.eav.ln_1p()).max(0.0),
            McMetric::SopLower => ind(gf <= sigma * t.eav),
            McMetric::SopExact => ind(gf <= sigma * t.eav + sigma - 1.0),
            McMetric::Spsc => ind(gf > t.eav),
        }
    }
}

/// Running mean and variance (Welford), mergeable (Chan et al.).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    n: u64,
    sum: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&self, o: &Moments) -> Moments {
        if self.n == 0 {
            return *o;
        }
        if o.n == 0 {
            return *self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            sum: self.sum + o.sum,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64 * o.n as f64) / n as f64,
        }
    }

    pub fn estimate(&self) -> McEstimate {
        let var = if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            0.0
        };
        // indicator sums are exact, so the mean is taken from the sum
        McEstimate {
            mean: self.sum / self.n as f64,
            std_error: (var / self.n as f64).sqrt(),
            n_samples: self.n as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

fn check_n(n: usize) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(invalid(
            "n",
            format!("need at least {MIN_SAMPLES} samples, got {n}"),
        ));
    }
    Ok(())
}

fn run_stream(
    cfg: &SystemConfig,
    metrics: &[McMetric],
    n: usize,
    form: SnrForm,
    stream: &RngStream,
) -> Vec<Moments> {
    let s = EndToEndSampler::new(cfg);
    let sigma = cfg.sigma();
    let mut rng = stream.rng();
    let mut acc = vec![Moments::default(); metrics.len()];
    for _ in 0..n {
        let t = s.sample(&mut rng);
        for (m, a) in metrics.iter().zip(acc.iter_mut()) {
            a.push(m.score(&t, form, sigma));
        }
    }
    acc
}

/// Single-stream estimate.
pub fn estimate_metric(
    metric: McMetric,
    cfg: &SystemConfig,
    n: usize,
    form: SnrForm,
    stream: &RngStream,
) -> Result<McEstimate> {
    Ok(estimate_metrics(&[metric], cfg, n, form, stream)?[0])
}

/// Several metrics on one shared sample set.
pub fn estimate_metrics(
    metrics: &[McMetric],
    cfg: &SystemConfig,
    n: usize,
    form: SnrForm,
    stream: &RngStream,
) -> Result<Vec<McEstimate>> {
    check_n(n)?;
    Ok(run_stream(cfg, metrics, n, form, stream)
        .iter()
        .map(Moments::estimate)
        .collect())
}

/// Splits `n` trials over `k` substreams run in parallel and pools them.
/// The result depends only on (stream, n, k), not on scheduling.
pub fn estimate_metrics_parallel(
    metrics: &[McMetric],
    cfg: &SystemConfig,
    n: usize,
    form: SnrForm,
    stream: &RngStream,
    k: usize,
) -> Result<Vec<McEstimate>> {
    check_n(n)?;
    if k == 0 {
        return Err(invalid("k", "must be >= 1"));
    }
    let parts: Vec<Vec<Moments>> = (0..k)
        .into_par_iter()
        .map(|i| {
            let len = n / k + usize::from(i < n % k);
            run_stream(cfg, metrics, len, form, &stream.substream(i as u64))
        })
        .collect();
    let mut pooled = vec![Moments::default(); metrics.len()];
    for p in &parts {
        for (a, b) in pooled.iter_mut().zip(p) {
            *a = a.merge(b);
        }
    }
    Ok(pooled.iter().map(Moments::estimate).collect())
}

/// Kolmogorov-Smirnov distance between the samples and `cdf`. Sorts in place.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value sqrt(-ln(alpha/2)/2)/sqrt(n).
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link_stats::{DualHop, EtaMuMrc, MeggDist};
    use crate::params::{Detection, EtaMuFormat};

    fn cfg() -> SystemConfig {
        let sr = RfLinkParams::new(2.2, 2, 2, 3.0, EtaMuFormat::FormatI).unwrap();
        let se = RfLinkParams::new(1.5, 1, 2, 1.0, EtaMuFormat::FormatI).unwrap();
        let rd = MeggParams::new(0.3, 0.8, 1.6, 1.1, 0.9, Detection::ImDd, 31.62).unwrap();
        SystemConfig::new(sr, se, rd, 2, 0.4).unwrap()
    }

    #[test]
    fn mean_snr_is_average() {
        let p = RfLinkParams::new(2.2, 2, 2, 5.0, EtaMuFormat::FormatI).unwrap();
        let mut rng = RngStream::new(1, 0).rng();
        let mut m = Moments::default();
        for _ in 0..200_000 {
            m.push(sample_etamu_mrc(&p, &mut rng));
        }
        let e = m.estimate();
        assert!((e.mean - 5.0).abs() < 4.0 * e.std_error);
    }

    #[test]
    fn samplers_match_link_cdfs() {
        let c = cfg();
        let n = 20_000;
        let mut rng = RngStream::new(7, 3).rng();
        let d = EtaMuMrc::new(&c.sr);
        let mut xs: Vec<f64> = (0..n).map(|_| sample_etamu_mrc(&c.sr, &mut rng)).collect();
        assert!(ks_statistic(&mut xs, |x| d.cdf(x)) < ks_critical(n, 0.01));
        let m = MeggDist::new(&c.rd);
        let mut xs: Vec<f64> = (0..n).map(|_| sample_megg(&c.rd, &mut rng)).collect();
        assert!(ks_statistic(&mut xs, |x| m.cdf(x)) < ks_critical(n, 0.01));
        let dh = DualHop::new(&c);
        let mut xs: Vec<f64> = (0..n)
            .map(|_| sample_end_to_end(&c, &mut rng).min)
            .collect();
        assert!(ks_statistic(&mut xs, |x| dh.cdf(x)) < ks_critical(n, 0.01));
    }

    #[test]
    fn reproducible_and_distinct_streams() {
        let c = cfg();
        let a =
            estimate_metric(McMetric::Asc, &c, 5000, SnrForm::Min, &RngStream::new(9, 1)).unwrap();
        let b =
            estimate_metric(McMetric::Asc, &c, 5000, SnrForm::Min, &RngStream::new(9, 1)).unwrap();
        let other =
            estimate_metric(McMetric::Asc, &c, 5000, SnrForm::Min, &RngStream::new(9, 2)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, other);
        let p1 = estimate_metrics_parallel(
            &[McMetric::Asc],
            &c,
            5000,
            SnrForm::Min,
            &RngStream::new(9, 1),
            4,
        )
        .unwrap();
        let p2 = estimate_metrics_parallel(
            &[McMetric::Asc],
            &c,
            5000,
            SnrForm::Min,
            &RngStream::new(9, 1),
            4,
        )
        .unwrap();
        assert_eq!(p1, p2);
        assert_eq!(p1[0].n_samples, 5000);
    }

    #[test]
    fn complementary_indicators() {
        let c = cfg().with_target_rate(0.0).unwrap();
        let s = RngStream::new(11, 0);
        let e = estimate_metrics(
            &[McMetric::Spsc, McMetric::SopLower],
            &c,
            4000,
            SnrForm::Exact,
            &s,
        )
        .unwrap();
        let counts = e.iter().map(|x| (x.mean * 4000.0).round()).sum::<f64>();
        assert_eq!(counts, 4000.0);
        assert!((e[0].mean + e[1].mean - 1.0).abs() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn merge_matches_sequential() {
        let xs: Vec<f64> = (0..100).map(|i| ((i * 37) % 11) as f64 * 0.3).collect();
        let mut all = Moments::default();
        xs.iter().for_each(|&x| all.push(x));
        let (mut a, mut b) = (Moments::default(), Moments::default());
        xs[..37].iter().for_each(|&x| a.push(x));
        xs[37..].iter().for_each(|&x| b.push(x));
        let m = a.merge(&b).estimate();
        let s = all.estimate();
        assert!((m.mean - s.mean).abs() < 1e-14 && (m.std_error - s.std_error).abs() < 1e-14);
    }

    #[test]
    fn rejects_small_n() {
        assert!(estimate_metric(
            McMetric::Asc,
            &cfg(),
            999,
            SnrForm::Min,
            &RngStream::new(0, 0)
        )
        .is_err());
    }

    #[test]
    fn ks_critical_values() {
        assert!((ks_critical(1, 0.05) - 1.3581).abs() < 1e-4);
        assert!((ks_critical(1, 0.01) - 1.6276).abs() < 1e-4);
    }
}
