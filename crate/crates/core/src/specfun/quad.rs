//! Globally adaptive 21-point Gauss-Kronrod quadrature.
//!
//! Semi-infinite ranges are mapped onto a finite one with x = t/(1-t).
//! Breakpoints are mapped the same way and seed the initial partition.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

pub const DEFAULT_TOL_ABS: f64 = 1e-10;
pub const DEFAULT_TOL_REL: f64 = 1e-8;
pub const DEFAULT_MAX_EVALS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(Error::NonFinite {
            context: "integrand",
        });
    }
    let mut resk = fc * WGK[10];
    let mut resabs = resk.abs();
    let mut resg = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        if !(f1.is_finite() && f2.is_finite()) {
            return Err(Error::NonFinite {
                context: "integrand",
            });
        }
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Segment {
        a,
        b,
        value,
        error: err,
    })
}

fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    knots: &[f64],
    tol_abs: f64,
    tol_rel: f64,
    max_evals: usize,
) -> Result<QuadResult> {
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment> = Vec::new();
    let mut evals = 0usize;
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in knots.windows(2) {
        if w[1] > w[0] {
            let s = gk21(&mut f, w[0], w[1])?;
            evals += 21;
            total += s.value;
            total_err += s.error;
            heap.push(s);
        }
    }
    let exact_totals = |heap: &BinaryHeap<Segment>, frozen: &[Segment]| {
        let mut v = super::sum::Neumaier::new();
        let mut e = 0.0;
        for s in heap.iter().chain(frozen.iter()) {
            v.add(s.value);
            e += s.error;
        }
        (v.value(), e)
    };
    let mut iter = 0usize;
    loop {
        iter += 1;
        if iter.is_multiple_of(64) {
            (total, total_err) = exact_totals(&heap, &frozen);
        }
        if total_err <= tol_abs.max(tol_rel * total.abs()) {
            (total, total_err) = exact_totals(&heap, &frozen);
            if total_err <= tol_abs.max(tol_rel * total.abs()) {
                break;
            }
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::NonConvergent {
                value: total,
                error: total_err,
                evaluations: evals,
            });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) <= 1e-15 * worst.a.abs().max(worst.b.abs())
        {
            frozen.push(worst);
            continue;
        }
        if evals + 42 > max_evals {
            heap.push(worst);
            (total, total_err) = exact_totals(&heap, &frozen);
            return Err(Error::NonConvergent {
                value: total,
                error: total_err,
                evaluations: evals,
            });
        }
        let left = gk21(&mut f, worst.a, mid)?;
        let right = gk21(&mut f, mid, worst.b)?;
        evals += 42;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    Ok(QuadResult {
        value: total,
        abs_error_estimate: total_err,
        evaluations: evals,
    })
}

/// Quadrature settings. Build with the setters, then call one of the
/// integration methods.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    tol_abs: f64,
    tol_rel: f64,
    max_evals: usize,
    breakpoints: Vec<f64>,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            tol_abs: DEFAULT_TOL_ABS,
            tol_rel: DEFAULT_TOL_REL,
            max_evals: DEFAULT_MAX_EVALS,
            breakpoints: Vec::new(),
        }
    }
}

impl Quadrature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tol_abs(mut self, v: f64) -> Self {
        self.tol_abs = v;
        self
    }

    pub fn tol_rel(mut self, v: f64) -> Self {
        self.tol_rel = v;
        self
    }

    pub fn max_evals(mut self, n: usize) -> Self {
        self.max_evals = n;
        self
    }

    /// Interior points where the integrand changes scale, in x.
    pub fn breakpoints(mut self, pts: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(pts);
        self
    }

    fn knots(&self, lo: f64, hi: f64, map: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut k: Vec<f64> = self
            .breakpoints
            .iter()
            .copied()
            .filter(|&x| x.is_finite() && x > lo && x < hi)
            .map(&map)
            .collect();
        k.push(map(lo));
        k.push(if hi.is_infinite() { 1.0 } else { map(hi) });
        k.sort_by(f64::total_cmp);
        k.dedup();
        k
    }

    /// ∫_0^∞ f(x) dx.
    pub fn semi_infinite<F: FnMut(f64) -> f64>(&self, f: F) -> Result<QuadResult> {
        self.upto(f64::INFINITY, f)
    }

    /// ∫_0^upper f(x) dx through the x = t/(1-t) map; `upper` may be infinite.
    pub fn upto<F: FnMut(f64) -> f64>(&self, upper: f64, mut f: F) -> Result<QuadResult> {
        if !(upper > 0.0) {
            return Err(Error::Domain {
                func: "Quadrature::upto",
                reason: format!("upper limit {upper} must be > 0"),
            });
        }
        let knots = self.knots(0.0, upper, |x| x / (1.0 + x));
        adaptive(
            |t| {
                let s = 1.0 - t;
                if s <= 0.0 {
                    return 0.0;
                }
                let v = f(t / s);
                if v == 0.0 {
                    0.0
                } else {
                    v / (s * s)
                }
            },
            &knots,
            self.tol_abs,
            self.tol_rel,
            self.max_evals,
        )
    }

    /// ∫_a^b f(x) dx on a finite interval.
    pub fn interval<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, f: F) -> Result<QuadResult> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::Domain {
                func: "Quadrature::interval",
                reason: "limits must be finite".into(),
            });
        }
        if a == b {
            return Ok(QuadResult {
                value: 0.0,
                abs_error_estimate: 0.0,
                evaluations: 0,
            });
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let knots = self.knots(lo, hi, |x| x);
        let mut r = adaptive(f, &knots, self.tol_abs, self.tol_rel, self.max_evals)?;
        r.value *= sign;
        Ok(r)
    }
}

/// ∫_0^∞ f(x) dx with the given tolerances and default budget.
pub fn quad_semi_infinite<F: FnMut(f64) -> f64>(
    f: F,
    tol_abs: f64,
    tol_rel: f64,
) -> Result<QuadResult> {
    Quadrature::new()
        .tol_abs(tol_abs)
        .tol_rel(tol_rel)
        .semi_infinite(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential() {
        let r = quad_semi_infinite(|x| (-x).exp(), 1e-12, 1e-12).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-12);
        assert!(r.abs_error_estimate <= 1e-12);
    }

    #[test]
    fn algebraic_tail() {
        let r = quad_semi_infinite(|x| 1.0 / ((1.0 + x) * (1.0 + x)), 1e-10, 1e-10).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn moments_are_factorials() {
        let mut fact = 1.0;
        for k in 0..=6 {
            if k > 0 {
                fact *= k as f64;
            }
            let r = quad_semi_infinite(|x| x.powi(k) * (-x).exp(), 1e-10, 1e-10).unwrap();
            assert!(
                (r.value - fact).abs() <= 1e-10f64.max(1e-10 * fact),
                "k={k}"
            );
        }
    }

    #[test]
    fn breakpoints_resolve_narrow_scales() {
        let k = 1e-7;
        let r = Quadrature::new()
            .tol_rel(1e-10)
            .breakpoints([1.0 / k])
            .semi_infinite(|x| k * (-k * x).exp())
            .unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn finite_cap_and_interval() {
        let r = Quadrature::new().upto(3.0, |x| x * x).unwrap();
        assert_relative_eq!(r.value, 9.0, max_relative = 1e-10);
        let r = Quadrature::new().interval(2.0, 0.0, |x| x).unwrap();
        assert_relative_eq!(r.value, -2.0, max_relative = 1e-12);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let r = Quadrature::new()
            .max_evals(200)
            .tol_rel(1e-14)
            .tol_abs(0.0)
            .semi_infinite(|x| (x * 50.0).sin().abs() * (-x).exp());
        assert!(matches!(r, Err(Error::NonConvergent { .. })));
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let r = Quadrature::new().interval(0.0, 1.0, |_| f64::NAN);
        assert_eq!(
            r,
            Err(Error::NonFinite {
                context: "integrand"
            })
        );
    }
}
