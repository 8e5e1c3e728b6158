//! Gamma, incomplete gamma and Beta functions.

use crate::error::{Error, Result};
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const MAX_FACTORIAL: usize = 170;

fn factorial_table() -> &'static [f64; MAX_FACTORIAL + 1] {
    static TABLE: std::sync::OnceLock<[f64; MAX_FACTORIAL + 1]> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1.0; MAX_FACTORIAL + 1];
        for i in 1..=MAX_FACTORIAL {
            t[i] = t[i - 1] * i as f64;
        }
        t
    })
}

/// n! as f64; infinite above 170.
pub fn factorial(n: u32) -> f64 {
    factorial_table()
        .get(n as usize)
        .copied()
        .unwrap_or(f64::INFINITY)
}

/// ln(n!).
pub fn ln_factorial(n: u32) -> f64 {
    if (n as usize) <= MAX_FACTORIAL {
        factorial(n).ln()
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// Binomial coefficient as f64.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r.round()
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

fn lanczos_ln_gamma_pos(x: f64) -> f64 {
    // valid for x >= 0.5
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// ln|Γ(x)|. Infinite at the poles.
pub fn ln_gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if is_nonpositive_integer(x) {
        return f64::INFINITY;
    }
    if x.fract() == 0.0 && x <= (MAX_FACTORIAL + 1) as f64 {
        return factorial(x as u32 - 1).ln();
    }
    if x < 0.5 {
        // reflection
        (PI / (PI * x).sin().abs()).ln() - lanczos_ln_gamma_pos(1.0 - x)
    } else {
        lanczos_ln_gamma_pos(x)
    }
}

/// Sign of Γ(x) (0 at poles).
pub fn gamma_sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if is_nonpositive_integer(x) {
        0.0
    } else if (x.floor() as i64) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Γ(x). Returns NaN at poles; use [`gamma_checked`] for a typed error.
pub fn gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return f64::NAN;
    }
    if x.fract() == 0.0 && x >= 1.0 {
        return factorial(x as u32 - 1);
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    lanczos_ln_gamma_pos(x).exp()
}

pub fn gamma_checked(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        Err(Error::Pole { arg: x })
    } else {
        Ok(gamma(x))
    }
}

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 100_000;

fn check_args(func: &'static str, a: f64, x: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain {
            func,
            reason: format!("shape a = {a} must be finite and > 0"),
        });
    }
    if !(x >= 0.0) {
        return Err(Error::Domain {
            func,
            reason: format!("x = {x} must be >= 0"),
        });
    }
    Ok(())
}

// Σ x^k / (a(a+1)...(a+k)), so γ(a,x) = x^a e^-x · series.
fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum
}

// Modified Lentz continued fraction, Γ(a,x) = x^a e^-x · cf.
fn gamma_cf(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized P(a, x) = γ(a, x)/Γ(a).
pub fn regularized_lower_gamma(a: f64, x: f64) -> Result<f64> {
    check_args("regularized_lower_gamma", a, x)?;
    Ok(reg_pq(a, x).0)
}

/// Regularized Q(a, x) = Γ(a, x)/Γ(a).
pub fn regularized_upper_gamma(a: f64, x: f64) -> Result<f64> {
    check_args("regularized_upper_gamma", a, x)?;
    Ok(reg_pq(a, x).1)
}

pub(crate) fn reg_pq(a: f64, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 1.0);
    }
    if x.is_infinite() {
        return (1.0, 0.0);
    }
    let ln_pre = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        let p = (ln_pre.exp() * gamma_series(a, x)).min(1.0);
        (p, 1.0 - p)
    } else {
        let q = (ln_pre.exp() * gamma_cf(a, x)).min(1.0);
        (1.0 - q, q)
    }
}

/// Unregularized lower incomplete gamma γ(a, x).
pub fn lower_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    check_args("lower_incomplete_gamma", a, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if a == 1.0 {
        return Ok(-(-x).exp_m1());
    }
    if x < a + 1.0 {
        Ok((a * x.ln() - x).exp() * gamma_series(a, x))
    } else {
        Ok(gamma(a) * reg_pq(a, x).0)
    }
}

/// Unregularized upper incomplete gamma Γ(a, x).
pub fn upper_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    check_args("upper_incomplete_gamma", a, x)?;
    if x.is_infinite() {
        return Ok(0.0);
    }
    if a == 1.0 {
        return Ok((-x).exp());
    }
    if x < a + 1.0 {
        Ok(gamma(a) * reg_pq(a, x).1)
    } else {
        Ok((a * x.ln() - x).exp() * gamma_cf(a, x))
    }
}

/// Beta function Γ(x)Γ(y)/Γ(x+y) through log-gamma.
pub fn beta_fn(x: f64, y: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole { arg: x });
    }
    if is_nonpositive_integer(y) {
        return Err(Error::Pole { arg: y });
    }
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain {
            func: "beta_fn",
            reason: "arguments must be finite".into(),
        });
    }
    if is_nonpositive_integer(x + y) {
        return Ok(0.0);
    }
    let sign = gamma_sign(x) * gamma_sign(y) * gamma_sign(x + y);
    Ok(sign * (ln_gamma(x) + ln_gamma(y) - ln_gamma(x + y)).exp())
}
