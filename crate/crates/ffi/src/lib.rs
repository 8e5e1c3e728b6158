//! C interface.
//!
//! Configurations are opaque handles created by `uowc_config_new` or
//! `uowc_config_from_json` and released with `uowc_config_free`. Every fallible
//! call returns a `UowcStatus`; on failure the message is available from
//! `uowc_last_error` on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use uowc_secrecy::analytic::{asc_direct, asc_series_1, sop_lower, sop_lower_closed, spsc};
use uowc_secrecy::monte_carlo::{estimate_metric, McMetric, RngStream, SnrForm};
use uowc_secrecy::params::{
    db_to_linear, Detection, EtaMuFormat, MeggParams, RfLinkParams, SystemConfig,
};
use uowc_secrecy::sweep::ConfigFile;
use uowc_secrecy::Error;

/// Result codes. `UOWC_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UowcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Parse = 3,
    Domain = 4,
    NotConverged = 5,
    Cancellation = 6,
    Panic = 7,
    Other = 8,
}

/// Opaque system configuration.
pub struct UowcConfig(SystemConfig);

/// One RF link. `format` is 1 or 2; `avg_snr_db` is the mean combined SNR.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct UowcRfLink {
    pub eta: f64,
    pub mu: u32,
    pub n_antennas: u32,
    pub avg_snr_db: f64,
    pub format: u32,
}

/// The optical hop. `detection` is 1 for heterodyne, 2 for IM/DD.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct UowcOpticalLink {
    pub omega: f64,
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub detection: u32,
    pub avg_snr_db: f64,
}

/// Metric selectors for `uowc_mc_estimate`.
pub const UOWC_METRIC_ASC: u32 = 0;
pub const UOWC_METRIC_SOP_LOWER: u32 = 1;
pub const UOWC_METRIC_SPSC: u32 = 2;
pub const UOWC_METRIC_SOP_EXACT: u32 = 3;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> UowcStatus {
    match e {
        Error::DegenerateEta { .. } | Error::InvalidParameter { .. } | Error::Validation { .. } => {
            UowcStatus::InvalidParameter
        }
        Error::Parse { .. } => UowcStatus::Parse,
        Error::Domain { .. } | Error::Pole { .. } => UowcStatus::Domain,
        Error::NonConvergent { .. } | Error::SeriesDiverged { .. } | Error::NonFinite { .. } => {
            UowcStatus::NotConverged
        }
        Error::CancellationWarning { .. } => UowcStatus::Cancellation,
        _ => UowcStatus::Other,
    }
}

fn guard(f: impl FnOnce() -> Result<(), UowcStatus>) -> UowcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UowcStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            UowcStatus::Panic
        }
    }
}

fn lift<T>(r: uowc_secrecy::Result<T>) -> Result<T, UowcStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn null() -> UowcStatus {
    set_error("null pointer argument".into());
    UowcStatus::NullPointer
}

fn format(f: u32) -> Result<EtaMuFormat, UowcStatus> {
    match f {
        1 => Ok(EtaMuFormat::FormatI),
        2 => Ok(EtaMuFormat::FormatII),
        _ => {
            set_error(format!("format must be 1 or 2, got {f}"));
            Err(UowcStatus::InvalidParameter)
        }
    }
}

fn rf(l: &UowcRfLink) -> Result<RfLinkParams, UowcStatus> {
    lift(RfLinkParams::new(
        l.eta,
        l.mu,
        l.n_antennas,
        db_to_linear(l.avg_snr_db),
        format(l.format)?,
    ))
}

fn optical(l: &UowcOpticalLink) -> Result<MeggParams, UowcStatus> {
    let d = match l.detection {
        1 => Detection::Hd,
        2 => Detection::ImDd,
        _ => {
            set_error(format!("detection must be 1 or 2, got {}", l.detection));
            return Err(UowcStatus::InvalidParameter);
        }
    };
    lift(MeggParams::new(
        l.omega,
        l.lambda,
        l.a,
        l.b,
        l.c,
        d,
        db_to_linear(l.avg_snr_db),
    ))
}

/// Builds a configuration. `target_rate_bits` is in bits per channel use.
///
/// # Safety
/// Pointers must be valid or null; `out` receives a handle owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn uowc_config_new(
    sr: *const UowcRfLink,
    se: *const UowcRfLink,
    rd: *const UowcOpticalLink,
    n_s: u32,
    target_rate_bits: f64,
    out: *mut *mut UowcConfig,
) -> UowcStatus {
    guard(|| {
        if sr.is_null() || se.is_null() || rd.is_null() || out.is_null() {
            return Err(null());
        }
        let cfg = lift(SystemConfig::new(
            rf(&*sr)?,
            rf(&*se)?,
            optical(&*rd)?,
            n_s,
            target_rate_bits,
        ))?;
        *out = Box::into_raw(Box::new(UowcConfig(cfg)));
        Ok(())
    })
}

/// Builds a configuration from the JSON config-file schema; any sweep block is
/// ignored.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` receives a caller-owned handle.
#[no_mangle]
pub unsafe extern "C" fn uowc_config_from_json(
    json: *const c_char,
    out: *mut *mut UowcConfig,
) -> UowcStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return Err(null());
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| {
            set_error(format!("config is not UTF-8: {e}"));
            UowcStatus::Parse
        })?;
        let cfg = lift(ConfigFile::parse(text).and_then(|f| f.system_config()))?;
        *out = Box::into_raw(Box::new(UowcConfig(cfg)));
        Ok(())
    })
}

/// # Safety
/// `cfg` must come from this library and not be used afterwards. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn uowc_config_free(cfg: *mut UowcConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Copy of `cfg` with a new target rate.
///
/// # Safety
/// `cfg` must be a live handle; `out` receives a caller-owned handle.
#[no_mangle]
pub unsafe extern "C" fn uowc_config_with_target_rate(
    cfg: *const UowcConfig,
    target_rate_bits: f64,
    out: *mut *mut UowcConfig,
) -> UowcStatus {
    guard(|| {
        if cfg.is_null() || out.is_null() {
            return Err(null());
        }
        let c = lift((*cfg).0.with_target_rate(target_rate_bits))?;
        *out = Box::into_raw(Box::new(UowcConfig(c)));
        Ok(())
    })
}

unsafe fn metric(
    cfg: *const UowcConfig,
    value: *mut f64,
    f: fn(&SystemConfig) -> uowc_secrecy::Result<uowc_secrecy::analytic::MetricResult>,
) -> UowcStatus {
    guard(|| {
        if cfg.is_null() || value.is_null() {
            return Err(null());
        }
        *value = lift(f(&(*cfg).0))?.value;
        Ok(())
    })
}

/// Average secrecy capacity in nats, by numerical integration.
///
/// # Safety
/// `cfg` must be a live handle and `value` writable.
#[no_mangle]
pub unsafe extern "C" fn uowc_asc(cfg: *const UowcConfig, value: *mut f64) -> UowcStatus {
    metric(cfg, value, asc_direct)
}

/// Average secrecy capacity in nats from the term assembly, cross-checked
/// against the integral; disagreement gives `UOWC_STATUS_CANCELLATION`.
///
/// # Safety
/// `cfg` must be a live handle and `value` writable.
#[no_mangle]
pub unsafe extern "C" fn uowc_asc_series(cfg: *const UowcConfig, value: *mut f64) -> UowcStatus {
    metric(cfg, value, |c| asc_series_1(c, None))
}

/// Lower bound on the secrecy outage probability.
///
/// # Safety
/// `cfg` must be a live handle and `value` writable.
#[no_mangle]
pub unsafe extern "C" fn uowc_sop_lower(cfg: *const UowcConfig, value: *mut f64) -> UowcStatus {
    metric(cfg, value, sop_lower)
}

/// Same bound from the closed-form terms.
///
/// # Safety
/// `cfg` must be a live handle and `value` writable.
#[no_mangle]
pub unsafe extern "C" fn uowc_sop_lower_closed(
    cfg: *const UowcConfig,
    value: *mut f64,
) -> UowcStatus {
    metric(cfg, value, sop_lower_closed)
}

/// Probability of strictly positive secrecy capacity.
///
/// # Safety
/// `cfg` must be a live handle and `value` writable.
#[no_mangle]
pub unsafe extern "C" fn uowc_spsc(cfg: *const UowcConfig, value: *mut f64) -> UowcStatus {
    metric(cfg, value, spsc)
}

/// Monte Carlo estimate on the stream (seed, stream_id). `UOWC_METRIC_SOP_EXACT` uses the
/// exact relay SNR, the others the min form. Needs at least 1000 samples.
///
/// # Safety
/// `cfg` must be a live handle; `mean` and `std_error` writable.
#[no_mangle]
pub unsafe extern "C" fn uowc_mc_estimate(
    cfg: *const UowcConfig,
    metric: u32,
    n_samples: usize,
    seed: u64,
    stream_id: u64,
    mean: *mut f64,
    std_error: *mut f64,
) -> UowcStatus {
    guard(|| {
        if cfg.is_null() || mean.is_null() || std_error.is_null() {
            return Err(null());
        }
        let (m, form) = match metric {
            UOWC_METRIC_ASC => (McMetric::Asc, SnrForm::Min),
            UOWC_METRIC_SOP_LOWER => (McMetric::SopLower, SnrForm::Min),
            UOWC_METRIC_SPSC => (McMetric::Spsc, SnrForm::Min),
            UOWC_METRIC_SOP_EXACT => (McMetric::SopExact, SnrForm::Exact),
            _ => {
                set_error(format!("unknown metric {metric}"));
                return Err(UowcStatus::InvalidParameter);
            }
        };
        let e = lift(estimate_metric(
            m,
            &(*cfg).0,
            n_samples,
            form,
            &RngStream::new(seed, stream_id),
        ))?;
        *mean = e.mean;
        *std_error = e.std_error;
        Ok(())
    })
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn uowc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn uowc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
