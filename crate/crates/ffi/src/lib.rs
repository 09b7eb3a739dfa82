//! C ABI over `fountain_shift`.
//!
//! Every function returns an `int32_t` status (`FSH_OK` on success) and writes results
//! through out-pointers. On failure the message is kept per thread and can be read with
//! `fsh_last_error_message`. Configurations are opaque handles created with
//! `fsh_config_new` or `fsh_config_load` and released with `fsh_config_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use fountain_shift::analysis::{self, DensityPair, FitOptions, WeightedPoint};
use fountain_shift::budget::Budget;
use fountain_shift::config::RunConfig;
use fountain_shift::dcp::{self, FeedConfig, FeedMode, PhaseField};
use fountain_shift::{lensing, Error, Vec2};

pub const FSH_OK: i32 = 0;
pub const FSH_ERR_NULL_POINTER: i32 = 1;
pub const FSH_ERR_INVALID_ARGUMENT: i32 = 2;
pub const FSH_ERR_CONFIG: i32 = 3;
pub const FSH_ERR_NUMERICAL: i32 = 4;
pub const FSH_ERR_STATISTICS: i32 = 5;
pub const FSH_ERR_FIT: i32 = 6;
pub const FSH_ERR_IO: i32 = 7;
pub const FSH_ERR_PANIC: i32 = 8;

pub const FSH_FEED_BOTH_BALANCED: i32 = 0;
pub const FSH_FEED_SINGLE_PHI0: i32 = 1;
pub const FSH_FEED_SINGLE_PI: i32 = 2;

/// Opaque run configuration.
pub struct FshConfig {
    inner: RunConfig,
}

#[repr(C)]
#[derive(Debug, Default, Clone, Copy)]
pub struct FshLensingResult {
    pub delta_p_term1: f64,
    pub delta_p_term2: f64,
    pub fringe_amplitude: f64,
    pub shift_term1: f64,
    pub shift_term2: f64,
    pub shift_rel: f64,
    pub quadrature_error: f64,
    pub nodes: u32,
}

#[repr(C)]
#[derive(Debug, Default, Clone, Copy)]
pub struct FshDcpResult {
    pub delta_p: f64,
    pub stat_err: f64,
    pub shift_rel: f64,
    pub shift_stat_err: f64,
    pub detected_fraction: f64,
    pub centroid_x: f64,
    pub centroid_y: f64,
    pub samples: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument { .. } | Error::InvalidRatio(_) => FSH_ERR_INVALID_ARGUMENT,
        Error::Config { .. } | Error::Parse { .. } => FSH_ERR_CONFIG,
        Error::DegenerateAmplitude { .. }
        | Error::DegenerateContrast { .. }
        | Error::AccuracyNotReached { .. }
        | Error::Singular => FSH_ERR_NUMERICAL,
        Error::StatisticsNotReached { .. } | Error::NoAtoms => FSH_ERR_STATISTICS,
        Error::SlopeDegenerate { .. }
        | Error::VertexUndetermined { .. }
        | Error::InsufficientScan { .. }
        | Error::AmbiguousCalibration(_) => FSH_ERR_FIT,
        Error::Io(_) => FSH_ERR_IO,
    }
}

enum Fail {
    Null,
    Arg(String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            FSH_OK
        }
        Ok(Err(Fail::Null)) => {
            set_error("null pointer argument".into());
            FSH_ERR_NULL_POINTER
        }
        Ok(Err(Fail::Arg(m))) => {
            set_error(m);
            FSH_ERR_INVALID_ARGUMENT
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            code(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            FSH_ERR_PANIC
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null);
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Arg("string argument is not valid UTF-8".into()))
}

unsafe fn cfg_ref<'a>(p: *const FshConfig) -> Result<&'a RunConfig, Fail> {
    p.as_ref().map(|c| &c.inner).ok_or(Fail::Null)
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fsh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after a success. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn fsh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// New configuration with the reference defaults. Never returns NULL.
#[no_mangle]
pub extern "C" fn fsh_config_new() -> *mut FshConfig {
    Box::into_raw(Box::new(FshConfig {
        inner: RunConfig::default(),
    }))
}

/// Loads a `key = value` configuration file into a new handle.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out_cfg` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fsh_config_load(path: *const c_char, out_cfg: *mut *mut FshConfig) -> i32 {
    guard(|| {
        let path = str_arg(path)?;
        let slot = out(out_cfg)?;
        let inner = RunConfig::load(Path::new(path))?;
        *slot = Box::into_raw(Box::new(FshConfig { inner }));
        Ok(())
    })
}

/// # Safety
/// `cfg` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn fsh_config_free(cfg: *mut FshConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Sets one key using the configuration file syntax, e.g. `("w0_mm", "1.2")`.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn fsh_config_set(cfg: *mut FshConfig, key: *const c_char, value: *const c_char) -> i32 {
    guard(|| {
        let cfg = cfg.as_mut().ok_or(Fail::Null)?;
        let (k, v) = (str_arg(key)?, str_arg(value)?);
        cfg.inner.set(k, v)?;
        Ok(())
    })
}

/// Copies the value of `key` into `buf` (NUL-terminated). If `buf_len` is too small the
/// call fails with `FSH_ERR_INVALID_ARGUMENT` and `*needed` holds the required size.
///
/// # Safety
/// `buf` must hold `buf_len` bytes; `needed` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn fsh_config_get(
    cfg: *const FshConfig,
    key: *const c_char,
    buf: *mut c_char,
    buf_len: usize,
    needed: *mut usize,
) -> i32 {
    guard(|| {
        let cfg = cfg_ref(cfg)?;
        let key = str_arg(key)?;
        let value = cfg
            .pairs()
            .into_iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v)
            .ok_or_else(|| Fail::Lib(Error::Config { key: key.into(), reason: "unknown key".into() }))?;
        let bytes = value.as_bytes();
        if let Some(n) = needed.as_mut() {
            *n = bytes.len() + 1;
        }
        if buf.is_null() || buf_len < bytes.len() + 1 {
            return Err(Fail::Arg(format!("buffer needs {} bytes", bytes.len() + 1)));
        }
        std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), bytes.len());
        *buf.add(bytes.len()) = 0;
        Ok(())
    })
}

/// Closed-form lensing shift (k² order, unbounded first-passage domain).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fsh_lensing_analytic(cfg: *const FshConfig, shift_rel: *mut f64) -> i32 {
    guard(|| {
        let lc = cfg_ref(cfg)?.lensing_config()?;
        *out(shift_rel)? = lensing::analytic_shift(&lc)?;
        Ok(())
    })
}

/// Full lensing shift. When the quadrature misses its tolerance the best estimate is still
/// written and `FSH_ERR_NUMERICAL` is returned.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fsh_lensing_full(cfg: *const FshConfig, result: *mut FshLensingResult) -> i32 {
    guard(|| {
        let lc = cfg_ref(cfg)?.lensing_config()?;
        let slot = out(result)?;
        let fill = |r: &lensing::LensingResult| FshLensingResult {
            delta_p_term1: r.delta_p_term1,
            delta_p_term2: r.delta_p_term2,
            fringe_amplitude: r.fringe_amplitude,
            shift_term1: r.shift_term1(),
            shift_term2: r.shift_term2(),
            shift_rel: r.shift_rel,
            quadrature_error: r.quadrature_error,
            nodes: r.nodes as u32,
        };
        match lensing::full_shift(&lc) {
            Ok(r) => {
                *slot = fill(&r);
                Ok(())
            }
            Err(Error::AccuracyNotReached { best, tolerance, estimate }) => {
                *slot = fill(&best);
                Err(Fail::Lib(Error::AccuracyNotReached { best, tolerance, estimate }))
            }
            Err(e) => Err(e.into()),
        }
    })
}

fn feed(mode: i32) -> Result<FeedConfig, Fail> {
    let mode = match mode {
        FSH_FEED_BOTH_BALANCED => FeedMode::BothBalanced,
        FSH_FEED_SINGLE_PHI0 => FeedMode::SinglePhi0,
        FSH_FEED_SINGLE_PI => FeedMode::SinglePi,
        other => return Err(Fail::Arg(format!("unknown feed mode {other}"))),
    };
    Ok(FeedConfig::new(mode))
}

/// DCP Monte Carlo for the toy field of order `m` (0, 1 or 2) with phase amplitude
/// `amplitude` rad, at cloud tilt `(tilt_x, tilt_y)` rad.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fsh_dcp_simulate(
    cfg: *const FshConfig,
    m: u32,
    amplitude: f64,
    feed_mode: i32,
    tilt_x: f64,
    tilt_y: f64,
    result: *mut FshDcpResult,
) -> i32 {
    guard(|| {
        let dc = cfg_ref(cfg)?.dcp_config()?;
        let slot = out(result)?;
        let field = PhaseField::toy(m, amplitude, &dc.fountain.geometry)?;
        let r = dcp::simulate_dp(&dc, &field, &feed(feed_mode)?, Vec2::new(tilt_x, tilt_y))?;
        *slot = FshDcpResult {
            delta_p: r.delta_p,
            stat_err: r.stat_err,
            shift_rel: r.shift_rel,
            shift_stat_err: r.shift_stat_err,
            detected_fraction: r.detected_fraction,
            centroid_x: r.centroid_displacement.x,
            centroid_y: r.centroid_displacement.y,
            samples: r.samples as u64,
        };
        Ok(())
    })
}

/// Half difference of the single-feed φ = 0 and φ = π shifts for the toy field.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fsh_dcp_differential(
    cfg: *const FshConfig,
    m: u32,
    amplitude: f64,
    tilt_x: f64,
    tilt_y: f64,
    shift_rel: *mut f64,
    stat_err: *mut f64,
) -> i32 {
    guard(|| {
        let dc = cfg_ref(cfg)?.dcp_config()?;
        let (s, e) = (out(shift_rel)?, out(stat_err)?);
        let field = PhaseField::toy(m, amplitude, &dc.fountain.geometry)?;
        let d = dcp::differential_shift(&dc, &field, Vec2::new(tilt_x, tilt_y))?;
        *s = d.shift_rel;
        *e = d.stat_err;
        Ok(())
    })
}

/// Budget totals in units of 1e-16. `path` NULL uses the bundled uncertainty budget; a NaN
/// `u_a_override` keeps the file's type-A rows.
///
/// # Safety
/// Out-pointers must be valid; `path` NULL or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn fsh_budget_totals(
    path: *const c_char,
    u_a_override: f64,
    u_b: *mut f64,
    u_a: *mut f64,
    total: *mut f64,
) -> i32 {
    guard(|| {
        let budget = if path.is_null() {
            Budget::table2()
        } else {
            Budget::load(Path::new(str_arg(path)?))?
        };
        let (ob, oa, ot) = (out(u_b)?, out(u_a)?, out(total)?);
        let t = budget.totals((!u_a_override.is_nan()).then_some(u_a_override));
        *ob = t.u_b;
        *oa = t.u_a;
        *ot = t.total;
        Ok(())
    })
}

/// Zero-density extrapolation of a high/low density pair.
///
/// # Safety
/// Out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fsh_collisional(
    nu_high: f64,
    nu_low: f64,
    kappa: f64,
    kappa_rel_unc: f64,
    corrected: *mut f64,
    type_b: *mut f64,
) -> i32 {
    guard(|| {
        let (c, b) = (out(corrected)?, out(type_b)?);
        let e = analysis::collisional_extrapolation(&DensityPair {
            nu_high,
            nu_low,
            kappa,
            kappa_rel_unc,
        })?;
        *c = e.corrected;
        *b = e.type_b;
        Ok(())
    })
}

/// Weighted straight-line fit; writes the zero crossing and its standard error.
///
/// # Safety
/// `x`, `y`, `sigma` must each point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn fsh_fit_zero_crossing(
    x: *const f64,
    y: *const f64,
    sigma: *const f64,
    n: usize,
    root: *mut f64,
    root_sigma: *mut f64,
) -> i32 {
    guard(|| {
        if x.is_null() || y.is_null() || sigma.is_null() {
            return Err(Fail::Null);
        }
        let (r, rs) = (out(root)?, out(root_sigma)?);
        let (x, y, s) = (
            std::slice::from_raw_parts(x, n),
            std::slice::from_raw_parts(y, n),
            std::slice::from_raw_parts(sigma, n),
        );
        let pts: Vec<WeightedPoint> = (0..n).map(|i| WeightedPoint::new(x[i], y[i], s[i])).collect();
        let fit = analysis::fit_linear_zero_crossing(&pts, FitOptions::default())?;
        *r = fit.root;
        *rs = fit.root_sigma;
        Ok(())
    })
}
