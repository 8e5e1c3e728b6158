//! Parameter sweeps over one variable, their tabular output, and
//! analytic-versus-simulation comparison.

mod config;
mod report;

pub use config::{
    load_config, test_vector, ConfigFile, DetectionName, FormatName, MeggShape, PresetTable,
    RdConfig, RfConfig, SweepConfig, TEST_VECTORS,
};
pub use report::{compare_report, Comparison, Report};

use crate::analytic::{self, MetricResult};
use crate::error::{invalid, Error, Result};
use crate::monte_carlo::{estimate_metrics_parallel, McMetric, RngStream, SnrForm, MIN_SAMPLES};
use crate::params::{db_to_linear, Detection, SystemConfig};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::time::Instant;

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "UOWC_SECRECY_WORKERS";

/// Substreams per MC estimate; fixed so results do not depend on the pool.
pub const MC_CHUNKS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    PhiRDb,
    PhiEDb,
    PhiDDb,
    PsiRDb,
    NS,
    NR,
    NE,
    EtaR,
    EtaE,
    MuR,
    MuE,
    TargetRate,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::PhiRDb => "phi_r_db",
            Variable::PhiEDb => "phi_e_db",
            Variable::PhiDDb => "phi_d_db",
            Variable::PsiRDb => "psi_r_db",
            Variable::NS => "n_s",
            Variable::NR => "n_r",
            Variable::NE => "n_e",
            Variable::EtaR => "eta_r",
            Variable::EtaE => "eta_e",
            Variable::MuR => "mu_r",
            Variable::MuE => "mu_e",
            Variable::TargetRate => "target_rate",
        }
    }

    /// `base` with this variable set to `v`.
    pub fn apply(self, base: &SystemConfig, v: f64) -> Result<SystemConfig> {
        let count = || -> Result<u32> {
            if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as u32)
            } else {
                Err(invalid(
                    "grid",
                    format!("{} needs positive integers, got {v}", self.name()),
                ))
            }
        };
        let c = *base;
        Ok(match self {
            Variable::PhiRDb => c.with_sr(c.sr.with_avg_snr(db_to_linear(v))?),
            Variable::PhiEDb => c.with_se(c.se.with_avg_snr(db_to_linear(v))?),
            Variable::PhiDDb => c.with_rd(c.rd.with_avg_snr_d(db_to_linear(v))?),
            Variable::PsiRDb => {
                let psi = db_to_linear(v);
                let phi_d = match c.rd.detection() {
                    Detection::Hd => psi,
                    Detection::ImDd => psi * c.rd.irradiance_second_moment(),
                };
                c.with_rd(c.rd.with_avg_snr_d(phi_d)?)
            }
            Variable::NS => c.with_n_s(count()?)?,
            Variable::NR => c.with_sr(c.sr.with_n_antennas(count()?)?),
            Variable::NE => c.with_se(c.se.with_n_antennas(count()?)?),
            Variable::EtaR => c.with_sr(c.sr.with_eta(v)?),
            Variable::EtaE => c.with_se(c.se.with_eta(v)?),
            Variable::MuR => c.with_sr(c.sr.with_mu(count()?)?),
            Variable::MuE => c.with_se(c.se.with_mu(count()?)?),
            Variable::TargetRate => c.with_target_rate(v)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMetric {
    Asc,
    SopL,
    Spsc,
}

impl SweepMetric {
    pub fn name(self) -> &'static str {
        match self {
            SweepMetric::Asc => "asc",
            SweepMetric::SopL => "sop_l",
            SweepMetric::Spsc => "spsc",
        }
    }

    fn mc(self) -> McMetric {
        match self {
            SweepMetric::Asc => McMetric::Asc,
            SweepMetric::SopL => McMetric::SopLower,
            SweepMetric::Spsc => McMetric::Spsc,
        }
    }

    /// Analytic value through the defining integral.
    pub fn analytic(self, cfg: &SystemConfig) -> Result<MetricResult> {
        match self {
            SweepMetric::Asc => analytic::asc_direct(cfg),
            SweepMetric::SopL => analytic::sop_lower(cfg),
            SweepMetric::Spsc => analytic::spsc(cfg),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Analytic,
    Mc,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::Mc => "mc",
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "analytic" => Ok(Engine::Analytic),
            "mc" => Ok(Engine::Mc),
            other => Err(invalid("engines", format!("unknown engine '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: SystemConfig,
    pub variable: Variable,
    grid: Vec<f64>,
    metrics: Vec<SweepMetric>,
    engines: Vec<Engine>,
    mc_samples: usize,
}

fn dedup_ordered<T: PartialEq + Copy>(v: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(v.len());
    for x in v {
        if !out.contains(x) {
            out.push(*x);
        }
    }
    out
}

impl SweepSpec {
    pub fn new(
        base: SystemConfig,
        variable: Variable,
        grid: Vec<f64>,
        metrics: Vec<SweepMetric>,
        engines: Vec<Engine>,
        mc_samples: usize,
    ) -> Result<Self> {
        let field = |f: &str, r: String| Error::Validation {
            field: format!("sweep.{f}"),
            reason: r,
        };
        if grid.is_empty() {
            return Err(field("grid", "must not be empty".into()));
        }
        if grid.iter().any(|v| !v.is_finite()) {
            return Err(field("grid", "values must be finite".into()));
        }
        let up = grid.windows(2).all(|w| w[1] > w[0]);
        let down = grid.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(field("grid", "must be strictly monotone".into()));
        }
        if metrics.is_empty() {
            return Err(field("metrics", "must not be empty".into()));
        }
        if engines.is_empty() {
            return Err(field("engines", "must not be empty".into()));
        }
        if engines.contains(&Engine::Mc) && mc_samples < MIN_SAMPLES {
            return Err(field(
                "mc_samples",
                format!("must be >= {MIN_SAMPLES} with the mc engine"),
            ));
        }
        Ok(Self {
            base,
            variable,
            grid,
            metrics: dedup_ordered(&metrics),
            engines: dedup_ordered(&engines),
            mc_samples,
        })
    }

    /// Single point at the base configuration.
    pub fn single(
        base: SystemConfig,
        metrics: Vec<SweepMetric>,
        engines: Vec<Engine>,
        mc_samples: usize,
    ) -> Result<Self> {
        Self::new(
            base,
            Variable::TargetRate,
            vec![base.target_rate()],
            metrics,
            engines,
            mc_samples,
        )
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }
    pub fn metrics(&self) -> &[SweepMetric] {
        &self.metrics
    }
    pub fn engines(&self) -> &[Engine] {
        &self.engines
    }
    pub fn mc_samples(&self) -> usize {
        self.mc_samples
    }

    pub fn with_engines(mut self, engines: Vec<Engine>) -> Result<Self> {
        self.engines = engines;
        Self::new(
            self.base,
            self.variable,
            self.grid,
            self.metrics,
            self.engines,
            self.mc_samples,
        )
    }

    pub fn with_mc_samples(mut self, n: usize) -> Result<Self> {
        self.mc_samples = n;
        Self::new(
            self.base,
            self.variable,
            self.grid,
            self.metrics,
            self.engines,
            self.mc_samples,
        )
    }

    pub fn point(&self, index: usize) -> Result<SystemConfig> {
        self.variable.apply(&self.base, self.grid[index])
    }
}

/// One output row. `result` and `error` are absent when `status` is not "ok".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub variable: String,
    pub value: f64,
    pub metric: SweepMetric,
    pub engine: Engine,
    pub result: Option<f64>,
    pub error: Option<f64>,
    pub status: String,
    /// Wall time of the evaluation. MC rows of one point share one sample set
    /// and report the time of that run.
    pub ms: Option<f64>,
    #[serde(skip)]
    pub grid_index: usize,
}

impl Row {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    /// Record wall times. Off by default so output is byte-stable.
    pub timing: bool,
}

fn eval_point(spec: &SweepSpec, idx: usize, seed: u64, opts: RunOptions) -> Vec<Row> {
    let value = spec.grid[idx];
    let row = |metric, engine, r: Result<(f64, f64)>, ms: f64| {
        let (result, error, status) = match r {
            Ok((v, e)) => (Some(v), Some(e), "ok".to_string()),
            Err(e) => (None, None, e.to_string()),
        };
        Row {
            variable: spec.variable.name().to_string(),
            value,
            metric,
            engine,
            result,
            error,
            status,
            ms: opts.timing.then_some(ms),
            grid_index: idx,
        }
    };
    let cfg = spec.point(idx);
    let mut per_engine: Vec<Vec<Row>> = Vec::new();
    for &engine in &spec.engines {
        let rows = match (&cfg, engine) {
            (Err(e), _) => spec
                .metrics
                .iter()
                .map(|&m| row(m, engine, Err(e.clone()), 0.0))
                .collect(),
            (Ok(cfg), Engine::Analytic) => spec
                .metrics
                .iter()
                .map(|&m| {
                    let t = Instant::now();
                    let r = m.analytic(cfg).map(|r| (r.value, r.error_estimate));
                    row(m, engine, r, t.elapsed().as_secs_f64() * 1e3)
                })
                .collect(),
            (Ok(cfg), Engine::Mc) => {
                let t = Instant::now();
                let mcs: Vec<McMetric> = spec.metrics.iter().map(|m| m.mc()).collect();
                let stream = RngStream::new(seed, idx as u64);
                let r = estimate_metrics_parallel(
                    &mcs,
                    cfg,
                    spec.mc_samples,
                    SnrForm::Min,
                    &stream,
                    MC_CHUNKS,
                );
                let ms = t.elapsed().as_secs_f64() * 1e3;
                spec.metrics
                    .iter()
                    .enumerate()
                    .map(|(i, &m)| {
                        let ri = r
                            .as_ref()
                            .map(|e| (e[i].mean, e[i].std_error))
                            .map_err(Clone::clone);
                        row(m, engine, ri, ms)
                    })
                    .collect()
            }
        };
        per_engine.push(rows);
    }
    // metric-major within a point
    let mut out = Vec::new();
    for mi in 0..spec.metrics.len() {
        for rows in &per_engine {
            out.push(rows[mi].clone());
        }
    }
    out
}

fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v
            .parse()
            .map_err(|_| invalid("workers", format!("{WORKERS_ENV}={v} is not a count")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| invalid("workers", e.to_string()))
}

/// Evaluates every grid point. Failures are recorded in the row status; rows
/// come out in grid order whatever the scheduling.
pub fn run_sweep(spec: &SweepSpec, seed: u64, opts: RunOptions) -> Result<SweepTable> {
    use rayon::prelude::*;
    let pool = worker_pool()?;
    let points: Vec<Vec<Row>> = pool.install(|| {
        (0..spec.grid.len())
            .into_par_iter()
            .map(|i| eval_point(spec, i, seed, opts))
            .collect()
    });
    Ok(SweepTable {
        rows: points.into_iter().flatten().collect(),
    })
}

pub const CSV_HEADER: [&str; 8] = [
    "variable", "value", "metric", "engine", "result", "error", "status", "ms",
];

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

impl SweepTable {
    /// ASC results and errors converted from nats to bits.
    pub fn to_bits(&self) -> SweepTable {
        let k = std::f64::consts::LOG2_E;
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                if r.metric == SweepMetric::Asc {
                    r.result = r.result.map(|v| v * k);
                    r.error = r.error.map(|v| v * k);
                }
                r
            })
            .collect();
        SweepTable { rows }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        wr.write_record(CSV_HEADER).map_err(io)?;
        for r in &self.rows {
            wr.write_record([
                r.variable.clone(),
                fmt_f(r.value),
                r.metric.name().to_string(),
                r.engine.name().to_string(),
                r.result.map(fmt_f).unwrap_or_default(),
                r.error.map(fmt_f).unwrap_or_default(),
                r.status.clone(),
                r.ms.map(|m| format!("{m:.3}")).unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for r in &self.rows {
            serde_json::to_writer(&mut w, r).map_err(|e| Error::Io(e.to_string()))?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(engines: Vec<Engine>) -> SweepSpec {
        let base = ConfigFile::default().system_config().unwrap();
        SweepSpec::new(
            base,
            Variable::PhiRDb,
            vec![0.0, 5.0, 10.0],
            vec![SweepMetric::Asc, SweepMetric::SopL],
            engines,
            2000,
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        let base = ConfigFile::default().system_config().unwrap();
        let mk = |g: Vec<f64>| {
            SweepSpec::new(
                base,
                Variable::PhiRDb,
                g,
                vec![SweepMetric::Asc],
                vec![Engine::Analytic],
                0,
            )
        };
        assert!(mk(vec![]).is_err());
        assert!(mk(vec![1.0, 1.0]).is_err());
        assert!(mk(vec![1.0, 3.0, 2.0]).is_err());
        assert!(mk(vec![3.0, 2.0]).is_ok());
        assert!(SweepSpec::new(
            base,
            Variable::NS,
            vec![1.0],
            vec![SweepMetric::Asc],
            vec![Engine::Mc],
            10
        )
        .is_err());
    }

    #[test]
    fn row_count_and_order() {
        let s = spec(vec![Engine::Analytic, Engine::Mc]);
        let t = run_sweep(&s, 3, RunOptions::default()).unwrap();
        assert_eq!(t.rows.len(), 3 * 2 * 2);
        assert!(t.rows.iter().all(Row::is_ok));
        assert_eq!(t.rows[0].engine, Engine::Analytic);
        assert_eq!(t.rows[1].engine, Engine::Mc);
        assert_eq!(t.rows[2].metric, SweepMetric::SopL);
        assert!(t.rows.iter().all(|r| r.ms.is_none()));
    }

    #[test]
    fn single_point_matches_direct_call() {
        let s = spec(vec![Engine::Analytic]);
        let t = run_sweep(&s, 0, RunOptions::default()).unwrap();
        let cfg = s.point(1).unwrap();
        assert_eq!(
            t.rows[2].result,
            Some(analytic::asc_direct(&cfg).unwrap().value)
        );
    }

    #[test]
    fn failures_stay_in_row() {
        let base = ConfigFile::default().system_config().unwrap();
        let s = SweepSpec::new(
            base,
            Variable::EtaR,
            vec![0.5, 1.0, 2.0],
            vec![SweepMetric::Spsc],
            vec![Engine::Analytic],
            0,
        )
        .unwrap();
        let t = run_sweep(&s, 0, RunOptions::default()).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert!(t.rows[0].is_ok() && t.rows[2].is_ok());
        assert!(!t.rows[1].is_ok());
        assert!(t
            .to_csv_string()
            .unwrap()
            .lines()
            .nth(2)
            .unwrap()
            .contains(",,"));
    }

    #[test]
    fn integer_variables_reject_fractions() {
        let base = ConfigFile::default().system_config().unwrap();
        assert!(Variable::NS.apply(&base, 2.5).is_err());
        assert_eq!(Variable::NS.apply(&base, 3.0).unwrap().n_s(), 3);
    }

    #[test]
    fn bits_conversion_only_touches_asc() {
        let t = run_sweep(&spec(vec![Engine::Analytic]), 0, RunOptions::default()).unwrap();
        let b = t.to_bits();
        assert_eq!(
            b.rows[0].result.unwrap(),
            t.rows[0].result.unwrap() * std::f64::consts::LOG2_E
        );
        assert_eq!(b.rows[1].result, t.rows[1].result);
    }
}
