//! A fixed set of 20 randomized configurations used for cross-checks.
//!
//! The set is drawn by [`generate`] and frozen in `data/battery.json`;
//! a test keeps the two in sync.

use crate::analytic::Scenario;
use crate::error::Result;
use crate::link_stats::EtaMuMrc;
use crate::params::SystemConfig;
use crate::sweep::{ConfigFile, DetectionName, FormatName, RdConfig, RfConfig, TEST_VECTORS};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const BATTERY_SEED: u64 = 20_240_601;
pub const BATTERY_SIZE: usize = 20;
/// Configurations at the head of the battery with an eavesdropper strong
/// enough for the ascending series to converge.
pub const STRONG_EAVESDROPPER: usize = 4;

/// Bound on (1 + cond_r)^n_s · cond_e, the growth of rounding error through
/// the term assemblies.
pub const CONDITION_CAP: f64 = 1e6;
/// Largest main-to-eavesdropper decay ratio accepted for the strong cases.
pub const STRONG_RHO: f64 = 0.5;

pub const FROZEN: &str = include_str!("../data/battery.json");

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn eta<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let e = round2(rng.random_range(0.2..5.0));
        if (e - 1.0).abs() >= 0.15 {
            return e;
        }
    }
}

fn rf<R: Rng>(rng: &mut R, snr_db: f64) -> RfConfig {
    RfConfig {
        eta: eta(rng),
        mu: rng.random_range(1..=2),
        n_antennas: rng.random_range(1..=3),
        avg_snr_db: snr_db,
        format: FormatName::I,
    }
}

fn conditioning(cfg: &SystemConfig) -> f64 {
    let r = EtaMuMrc::new(&cfg.sr).closed_form_condition();
    let e = EtaMuMrc::new(&cfg.se).closed_form_condition();
    (1.0 + r).powi(cfg.n_s() as i32) * e
}

fn rho(cfg: &SystemConfig) -> f64 {
    let s = Scenario::new(cfg);
    let om = s.eavesdropper().psi().into_iter().fold(0.0, f64::max);
    let ps = s
        .main_link()
        .rf()
        .psi()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    om / ps
}

/// Draws the battery.
pub fn generate(seed: u64) -> Result<Vec<ConfigFile>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(BATTERY_SIZE);
    while out.len() < BATTERY_SIZE {
        let strong = out.len() < STRONG_EAVESDROPPER;
        let phi_r = round2(rng.random_range(-5.0..15.0));
        let phi_e = if strong {
            round2(phi_r + rng.random_range(3.0..10.0))
        } else {
            round2(rng.random_range(-10.0..10.0))
        };
        let tv = rng.random_range(0..TEST_VECTORS.len());
        let detection = if rng.random_bool(0.5) {
            DetectionName::Hd
        } else {
            DetectionName::Imdd
        };
        let c = ConfigFile {
            sr: rf(&mut rng, phi_r),
            se: rf(&mut rng, phi_e),
            rd: RdConfig {
                preset: Some(TEST_VECTORS[tv].0.to_string()),
                detection,
                avg_snr_db: round2(rng.random_range(5.0..30.0)),
                ..RdConfig::default()
            },
            n_s: rng.random_range(1..=3),
            target_rate_bits: round2(rng.random_range(0.0..1.0)),
            ..ConfigFile::default()
        };
        let sc = c.system_config()?;
        if conditioning(&sc) > CONDITION_CAP {
            continue;
        }
        if strong && rho(&sc) > STRONG_RHO {
            continue;
        }
        out.push(c);
    }
    Ok(out)
}

pub fn to_json(configs: &[ConfigFile]) -> String {
    let mut s = serde_json::to_string_pretty(configs).expect("configs serialize");
    s.push('\n');
    s
}

/// The frozen battery as validated configurations.
pub fn battery() -> Vec<SystemConfig> {
    let files: Vec<ConfigFile> = serde_json::from_str(FROZEN).expect("frozen battery parses");
    files
        .iter()
        .map(|c| c.system_config().expect("frozen battery is valid"))
        .collect()
}
