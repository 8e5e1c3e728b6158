//! JSON configuration schema.
//!
//! Every field is optional; a missing field takes the default shown by
//! `ConfigFile::default()`. SNRs are given in dB and converted once, when the
//! file is resolved into a [`SystemConfig`].

use super::{Engine, SweepSpec, Variable};
use crate::error::{Error, Result};
use crate::params::{db_to_linear, Detection, EtaMuFormat, MeggParams, RfLinkParams, SystemConfig};
use crate::sweep::SweepMetric;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormatName {
    #[serde(rename = "I")]
    I,
    #[serde(rename = "II")]
    II,
}

impl From<FormatName> for EtaMuFormat {
    fn from(f: FormatName) -> Self {
        match f {
            FormatName::I => EtaMuFormat::FormatI,
            FormatName::II => EtaMuFormat::FormatII,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectionName {
    Hd,
    Imdd,
}

impl From<DetectionName> for Detection {
    fn from(d: DetectionName) -> Self {
        match d {
            DetectionName::Hd => Detection::Hd,
            DetectionName::Imdd => Detection::ImDd,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RfConfig {
    pub eta: f64,
    pub mu: u32,
    pub n_antennas: u32,
    pub avg_snr_db: f64,
    pub format: FormatName,
}

impl Default for RfConfig {
    fn default() -> Self {
        Self {
            eta: 2.2,
            mu: 2,
            n_antennas: 2,
            avg_snr_db: 0.0,
            format: FormatName::I,
        }
    }
}

/// mEGG shape parameters without detection or SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeggShape {
    pub omega: f64,
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RdConfig {
    /// Starting shape, looked up in the config's `presets` block and then in
    /// the built-in test vectors. Explicit fields below override it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    pub detection: DetectionName,
    pub avg_snr_db: f64,
}

impl Default for RdConfig {
    fn default() -> Self {
        Self {
            preset: None,
            omega: None,
            lambda: None,
            a: None,
            b: None,
            c: None,
            detection: DetectionName::Hd,
            avg_snr_db: 15.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: Variable,
    pub grid: Vec<f64>,
    pub metrics: Vec<SweepMetric>,
    pub engines: Vec<Engine>,
    pub mc_samples: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            variable: Variable::PhiRDb,
            grid: Vec::new(),
            metrics: vec![SweepMetric::Asc, SweepMetric::SopL, SweepMetric::Spsc],
            engines: vec![Engine::Analytic],
            mc_samples: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub sr: RfConfig,
    pub se: RfConfig,
    pub rd: RdConfig,
    pub n_s: u32,
    pub target_rate_bits: f64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub presets: BTreeMap<String, MeggShape>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

impl Default for ConfigFile {
    fn default() -> Self {
        Self {
            sr: RfConfig::default(),
            se: RfConfig::default(),
            rd: RdConfig::default(),
            n_s: 1,
            target_rate_bits: 0.0,
            presets: BTreeMap::new(),
            sweep: None,
        }
    }
}

/// Named mEGG shapes. The built-in table is empty; measured shapes for
/// particular water conditions come from published tables and can be added
/// through the `presets` block of a config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PresetTable {
    records: BTreeMap<String, MeggShape>,
}

impl PresetTable {
    pub fn builtin() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, label: impl Into<String>, shape: MeggShape) -> Result<()> {
        let label = label.into();
        MeggParams::new(
            shape.omega,
            shape.lambda,
            shape.a,
            shape.b,
            shape.c,
            Detection::Hd,
            1.0,
        )
        .map_err(|e| validation(&format!("presets.{label}"), e))?;
        self.records.insert(label, shape);
        Ok(())
    }

    pub fn get(&self, label: &str) -> Option<MeggShape> {
        self.records.get(label).copied()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Invented mEGG shapes for examples and tests. They are not measurements.
pub const TEST_VECTORS: [(&str, MeggShape); 4] = [
    (
        "test-vector-1",
        MeggShape {
            omega: 0.3,
            lambda: 0.8,
            a: 1.6,
            b: 1.1,
            c: 0.9,
        },
    ),
    (
        "test-vector-2",
        MeggShape {
            omega: 0.45,
            lambda: 0.5,
            a: 2.0,
            b: 1.4,
            c: 1.2,
        },
    ),
    (
        "test-vector-3",
        MeggShape {
            omega: 0.15,
            lambda: 1.2,
            a: 0.8,
            b: 0.9,
            c: 2.0,
        },
    ),
    (
        "test-vector-4",
        MeggShape {
            omega: 0.6,
            lambda: 0.4,
            a: 3.0,
            b: 0.7,
            c: 0.6,
        },
    ),
];

pub fn test_vector(label: &str) -> Option<MeggShape> {
    TEST_VECTORS
        .iter()
        .find(|(l, _)| *l == label)
        .map(|(_, s)| *s)
}

fn validation(field: &str, e: Error) -> Error {
    let reason = match e {
        Error::InvalidParameter { name, reason } => format!("{name}: {reason}"),
        e @ Error::DegenerateEta { .. } => format!("degenerate eta: {e}"),
        other => other.to_string(),
    };
    Error::Validation {
        field: field.to_string(),
        reason,
    }
}

impl RfConfig {
    pub fn resolve(&self, field: &str) -> Result<RfLinkParams> {
        RfLinkParams::new(
            self.eta,
            self.mu,
            self.n_antennas,
            db_to_linear(self.avg_snr_db),
            self.format.into(),
        )
        .map_err(|e| validation(field, e))
    }
}

impl RdConfig {
    pub fn resolve(&self, presets: &PresetTable) -> Result<MeggParams> {
        let base = match &self.preset {
            Some(label) => presets
                .get(label)
                .or_else(|| test_vector(label))
                .ok_or_else(|| Error::Validation {
                    field: "rd.preset".into(),
                    reason: format!("unknown preset '{label}'"),
                })?,
            None => TEST_VECTORS[0].1,
        };
        MeggParams::new(
            self.omega.unwrap_or(base.omega),
            self.lambda.unwrap_or(base.lambda),
            self.a.unwrap_or(base.a),
            self.b.unwrap_or(base.b),
            self.c.unwrap_or(base.c),
            self.detection.into(),
            db_to_linear(self.avg_snr_db),
        )
        .map_err(|e| validation("rd", e))
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn presets(&self) -> Result<PresetTable> {
        let mut t = PresetTable::builtin();
        for (k, v) in &self.presets {
            t.insert(k.clone(), *v)?;
        }
        Ok(t)
    }

    pub fn system_config(&self) -> Result<SystemConfig> {
        let presets = self.presets()?;
        let sr = self.sr.resolve("sr")?;
        let se = self.se.resolve("se")?;
        let rd = self.rd.resolve(&presets)?;
        SystemConfig::new(sr, se, rd, self.n_s, self.target_rate_bits).map_err(|e| match &e {
            Error::InvalidParameter { name: "n_s", .. } => validation("n_s", e),
            _ => validation("target_rate_bits", e),
        })
    }

    /// Sweep described by the file. Without a sweep block this is a single
    /// point at the base S-R SNR.
    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let base = self.system_config()?;
        let sw = self.sweep.clone().unwrap_or_else(|| SweepConfig {
            grid: vec![self.sr.avg_snr_db],
            ..SweepConfig::default()
        });
        SweepSpec::new(
            base,
            sw.variable,
            sw.grid,
            sw.metrics,
            sw.engines,
            sw.mc_samples,
        )
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<SweepSpec> {
    let text = std::fs::read_to_string(path)?;
    ConfigFile::parse(&text)?.sweep_spec()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_valid() {
        let c = ConfigFile::parse("{}").unwrap();
        assert_eq!(c, ConfigFile::default());
        let s = c.system_config().unwrap();
        assert_eq!(s.n_s(), 1);
        assert_eq!(s.sr.avg_snr(), 1.0);
    }

    #[test]
    fn db_conversion() {
        let c = ConfigFile::parse(r#"{"rd": {"avg_snr_db": 15}}"#).unwrap();
        let s = c.system_config().unwrap();
        assert!((s.rd.avg_snr_d() - 31.6227766).abs() < 1e-7);
    }

    #[test]
    fn degenerate_eta_names_field() {
        let c = ConfigFile::parse(r#"{"sr": {"eta": 1.0}}"#).unwrap();
        match c.system_config() {
            Err(Error::Validation { field, reason }) => {
                assert_eq!(field, "sr");
                assert!(reason.contains("degenerate"), "{reason}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_error_location() {
        match ConfigFile::parse("{\n  \"n_s\": 2,\n  \"bogus\": 1\n}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn presets_resolve() {
        let c = ConfigFile::parse(
            r#"{"presets": {"lab": {"omega": 0.5, "lambda": 1, "a": 2, "b": 1, "c": 1}},
                "rd": {"preset": "lab", "c": 1.5}}"#,
        )
        .unwrap();
        let rd = c.system_config().unwrap().rd;
        assert_eq!((rd.omega(), rd.c()), (0.5, 1.5));
        let tv = ConfigFile::parse(r#"{"rd": {"preset": "test-vector-3"}}"#).unwrap();
        assert_eq!(tv.system_config().unwrap().rd.a(), 0.8);
        let bad = ConfigFile::parse(r#"{"rd": {"preset": "nope"}}"#).unwrap();
        assert!(matches!(bad.system_config(), Err(Error::Validation { .. })));
        assert!(PresetTable::builtin().is_empty());
    }

    #[test]
    fn test_vectors_are_valid() {
        for (label, s) in TEST_VECTORS {
            for d in [Detection::Hd, Detection::ImDd] {
                assert!(
                    MeggParams::new(s.omega, s.lambda, s.a, s.b, s.c, d, 10.0).is_ok(),
                    "{label}"
                );
            }
        }
    }
}
