//! C ABI over the BBS toolkit.
//!
//! Conventions: every function returns a [`BbsStatus`]; results come back
//! through out-pointers. Handles (`BbsModel`, `BbsFit`) are opaque and must
//! be released with their `_free` function. On any non-OK status the
//! thread-local message from [`bbs_last_error_message`] describes what went
//! wrong; the pointer stays valid until the next failing call on the same
//! thread.

use bbs_core::dist::BbsParams;
use bbs_core::error::Error;
use bbs_core::estimation::{fit_profile, observations_from_times, FitResult, Observation, ProfileGridSpec};
use bbs_core::modes::{bbs_modes, CriticalKind};
use bbs_core::moments::bbs_moments;
use bbs_core::numerics::RngStream;
use libc::{c_char, size_t};
use std::cell::RefCell;
use std::ffi::CString;
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BbsStatus {
    /// Success.
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// Arguments outside the domain (non-positive scale, bad range, ...).
    InvalidArgument = 2,
    /// A numerical routine failed (non-convergence, singular information).
    NumericFailure = 3,
    /// An internal panic was caught at the boundary.
    Panic = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let cstring = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error message unavailable").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

fn status_from(err: &Error) -> BbsStatus {
    set_error(err.to_string());
    match err {
        Error::Domain(_) | Error::Invalid(_) | Error::Parse { .. } | Error::Io(_) => {
            BbsStatus::InvalidArgument
        }
        _ => BbsStatus::NumericFailure,
    }
}

/// Message for the most recent error on this thread, or null when no error
/// has occurred yet. Valid until the next failing call on the same thread;
/// do not free it.
#[no_mangle]
pub extern "C" fn bbs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow().as_ref().map_or(std::ptr::null(), |msg| msg.as_ptr())
    })
}

/// Opaque handle to a BBS(alpha, beta, delta) model.
pub struct BbsModel {
    params: BbsParams,
}

/// Opaque handle to a profile-likelihood fit.
pub struct BbsFit {
    result: FitResult,
}

macro_rules! check_null {
    ($($ptr:expr),+) => {
        $(
            if $ptr.is_null() {
                set_error(format!("null pointer argument `{}`", stringify!($ptr)));
                return BbsStatus::NullPointer;
            }
        )+
    };
}

/// Create a model handle. `alpha > 0`, `beta > 0`, `delta` finite.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn bbs_model_new(
    alpha: f64,
    beta: f64,
    delta: f64,
    out: *mut *mut BbsModel,
) -> BbsStatus {
    check_null!(out);
    match BbsParams::new(alpha, beta, delta) {
        Ok(params) => {
            *out = Box::into_raw(Box::new(BbsModel { params }));
            BbsStatus::Ok
        }
        Err(e) => status_from(&e),
    }
}

/// Release a model handle. Null is a no-op.
///
/// # Safety
/// `model` must have come from [`bbs_model_new`] and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn bbs_model_free(model: *mut BbsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

unsafe fn eval1(
    model: *const BbsModel,
    x: f64,
    out: *mut f64,
    f: impl Fn(&BbsParams, f64) -> Result<f64, Error>,
) -> BbsStatus {
    if model.is_null() || out.is_null() {
        set_error("null pointer argument".into());
        return BbsStatus::NullPointer;
    }
    match f(&(*model).params, x) {
        Ok(v) => {
            *out = v;
            BbsStatus::Ok
        }
        Err(e) => status_from(&e),
    }
}

/// Density at `t > 0`.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bbs_model_pdf(model: *const BbsModel, t: f64, out: *mut f64) -> BbsStatus {
    eval1(model, t, out, |p, t| p.pdf(t))
}

/// Distribution function at `t > 0`.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bbs_model_cdf(model: *const BbsModel, t: f64, out: *mut f64) -> BbsStatus {
    eval1(model, t, out, |p, t| p.cdf(t))
}

/// Survival function at `t > 0`.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bbs_model_sf(model: *const BbsModel, t: f64, out: *mut f64) -> BbsStatus {
    eval1(model, t, out, |p, t| p.sf(t))
}

/// Hazard rate at `t > 0`; fails with `NumericFailure` where the survival
/// function has underflowed.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bbs_model_hazard(
    model: *const BbsModel,
    t: f64,
    out: *mut f64,
) -> BbsStatus {
    eval1(model, t, out, |p, t| p.hazard(t))
}

/// Quantile for `u` in (0, 1).
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bbs_model_quantile(
    model: *const BbsModel,
    u: f64,
    out: *mut f64,
) -> BbsStatus {
    eval1(model, u, out, |p, u| p.quantile(u))
}

/// Mean and variance by omega-weighted quadrature.
///
/// # Safety
/// `model` must be a live handle; `mean` and `variance` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bbs_model_moments(
    model: *const BbsModel,
    mean: *mut f64,
    variance: *mut f64,
) -> BbsStatus {
    check_null!(model, mean, variance);
    match catch_unwind(AssertUnwindSafe(|| bbs_moments(&(*model).params))) {
        Ok(Ok(m)) => {
            *mean = m.mean;
            *variance = m.variance;
            BbsStatus::Ok
        }
        Ok(Err(e)) => status_from(&e),
        Err(_) => {
            set_error("panic in bbs_model_moments".into());
            BbsStatus::Panic
        }
    }
}

/// Critical points of the density. `locations`/`is_maximum` receive up to
/// `capacity` entries (ascending); `written` gets the total count found.
/// Returns `InvalidArgument` when capacity is too small (3 is always
/// enough: at most two maxima and one interior minimum).
///
/// # Safety
/// The output arrays must hold at least `capacity` elements.
#[no_mangle]
pub unsafe extern "C" fn bbs_model_modes(
    model: *const BbsModel,
    locations: *mut f64,
    is_maximum: *mut u8,
    capacity: size_t,
    written: *mut size_t,
) -> BbsStatus {
    check_null!(model, locations, is_maximum, written);
    let structure = match catch_unwind(AssertUnwindSafe(|| bbs_modes(&(*model).params))) {
        Ok(s) => s,
        Err(_) => {
            set_error("panic in bbs_model_modes".into());
            return BbsStatus::Panic;
        }
    };
    *written = structure.critical_points.len();
    if structure.critical_points.len() > capacity {
        set_error(format!(
            "capacity {capacity} too small for {} critical points",
            structure.critical_points.len()
        ));
        return BbsStatus::InvalidArgument;
    }
    for (i, c) in structure.critical_points.iter().enumerate() {
        *locations.add(i) = c.location;
        *is_maximum.add(i) = u8::from(c.kind == CriticalKind::Maximum);
    }
    BbsStatus::Ok
}

/// Fill `out` with `n` draws using the deterministic stream for `seed`.
///
/// # Safety
/// `out` must hold at least `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn bbs_model_sample(
    model: *const BbsModel,
    seed: u64,
    n: size_t,
    out: *mut f64,
) -> BbsStatus {
    check_null!(model, out);
    let mut rng = RngStream::new(seed);
    let draws = match catch_unwind(AssertUnwindSafe(|| (*model).params.sample(n, &mut rng))) {
        Ok(d) => d,
        Err(_) => {
            set_error("panic in bbs_model_sample".into());
            return BbsStatus::Panic;
        }
    };
    std::ptr::copy_nonoverlapping(draws.as_ptr(), out, n);
    BbsStatus::Ok
}

/// Profile-likelihood fit over the integer delta grid `[delta_lo, delta_hi]`.
/// `events` may be null (all observations are events) or hold 0/1 flags.
///
/// # Safety
/// `times` (and `events` when non-null) must hold `n` elements; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn bbs_fit_profile(
    times: *const f64,
    events: *const u8,
    n: size_t,
    delta_lo: i32,
    delta_hi: i32,
    out: *mut *mut BbsFit,
) -> BbsStatus {
    check_null!(times, out);
    if n == 0 {
        set_error("empty data".into());
        return BbsStatus::InvalidArgument;
    }
    if delta_lo > delta_hi {
        set_error(format!("empty delta grid {delta_lo}:{delta_hi}"));
        return BbsStatus::InvalidArgument;
    }
    let times = std::slice::from_raw_parts(times, n);
    let data: Result<Vec<Observation>, Error> = if events.is_null() {
        observations_from_times(times)
    } else {
        let flags = std::slice::from_raw_parts(events, n);
        times
            .iter()
            .zip(flags)
            .map(|(&t, &e)| Observation::new(t, e != 0))
            .collect()
    };
    let data = match data {
        Ok(d) => d,
        Err(e) => return status_from(&e),
    };
    let grid = ProfileGridSpec::integer_range(delta_lo, delta_hi);
    match catch_unwind(AssertUnwindSafe(|| fit_profile(&data, &grid))) {
        Ok(Ok(result)) => {
            *out = Box::into_raw(Box::new(BbsFit { result }));
            BbsStatus::Ok
        }
        Ok(Err(e)) => status_from(&e),
        Err(_) => {
            set_error("panic in bbs_fit_profile".into());
            BbsStatus::Panic
        }
    }
}

/// Release a fit handle. Null is a no-op.
///
/// # Safety
/// `fit` must have come from [`bbs_fit_profile`] and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn bbs_fit_free(fit: *mut BbsFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

/// Point estimates of the fit.
///
/// # Safety
/// `fit` must be a live handle; the out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn bbs_fit_params(
    fit: *const BbsFit,
    alpha: *mut f64,
    beta: *mut f64,
    delta: *mut f64,
) -> BbsStatus {
    check_null!(fit, alpha, beta, delta);
    let p = (*fit).result.params;
    *alpha = p.alpha();
    *beta = p.beta();
    *delta = p.delta();
    BbsStatus::Ok
}

/// Fit quality: maximized log-likelihood, AIC, BIC.
///
/// # Safety
/// `fit` must be a live handle; the out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn bbs_fit_quality(
    fit: *const BbsFit,
    loglik: *mut f64,
    aic: *mut f64,
    bic: *mut f64,
) -> BbsStatus {
    check_null!(fit, loglik, aic, bic);
    *loglik = (*fit).result.loglik;
    *aic = (*fit).result.aic;
    *bic = (*fit).result.bic;
    BbsStatus::Ok
}

/// Standard errors for (alpha, beta) from the inverse observed information;
/// `NumericFailure` when the information matrix was singular. The grid-valued
/// delta carries no standard error.
///
/// # Safety
/// `fit` must be a live handle; the out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn bbs_fit_standard_errors(
    fit: *const BbsFit,
    se_alpha: *mut f64,
    se_beta: *mut f64,
) -> BbsStatus {
    check_null!(fit, se_alpha, se_beta);
    match ((*fit).result.se_alpha, (*fit).result.se_beta) {
        (Some(a), Some(b)) => {
            *se_alpha = a;
            *se_beta = b;
            BbsStatus::Ok
        }
        _ => {
            set_error("standard errors unavailable (singular information matrix)".into());
            BbsStatus::NumericFailure
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;

    #[test]
    fn model_lifecycle_and_evaluations() {
        unsafe {
            let mut model: *mut BbsModel = std::ptr::null_mut();
            assert_eq!(bbs_model_new(1.0, 1.0, -1.0, &mut model), BbsStatus::Ok);
            let mut v = 0.0;
            assert_eq!(bbs_model_pdf(model, 1.0, &mut v), BbsStatus::Ok);
            assert!((v - 0.265_961_5).abs() < 1e-7);
            assert_eq!(bbs_model_cdf(model, 1.0, &mut v), BbsStatus::Ok);
            let mut sf = 0.0;
            assert_eq!(bbs_model_sf(model, 1.0, &mut sf), BbsStatus::Ok);
            assert!((v + sf - 1.0).abs() < 1e-12);
            assert_eq!(bbs_model_quantile(model, 0.5, &mut v), BbsStatus::Ok);
            let mut c = 0.0;
            assert_eq!(bbs_model_cdf(model, v, &mut c), BbsStatus::Ok);
            assert!((c - 0.5).abs() < 1e-9);
            bbs_model_free(model);
        }
    }

    #[test]
    fn invalid_inputs_produce_status_and_message() {
        unsafe {
            let mut model: *mut BbsModel = std::ptr::null_mut();
            assert_eq!(bbs_model_new(-1.0, 1.0, 0.0, &mut model), BbsStatus::InvalidArgument);
            let msg = CStr::from_ptr(bbs_last_error_message()).to_str().unwrap();
            assert!(msg.contains("alpha"), "{msg}");

            assert_eq!(bbs_model_new(1.0, 1.0, 0.0, &mut model), BbsStatus::Ok);
            let mut v = 0.0;
            assert_eq!(bbs_model_pdf(model, -3.0, &mut v), BbsStatus::InvalidArgument);
            assert_eq!(bbs_model_pdf(std::ptr::null(), 1.0, &mut v), BbsStatus::NullPointer);
            bbs_model_free(model);
        }
    }

    #[test]
    fn modes_of_the_worked_example() {
        unsafe {
            let mut model: *mut BbsModel = std::ptr::null_mut();
            assert_eq!(bbs_model_new(1.0, 1.0, -1.0, &mut model), BbsStatus::Ok);
            let mut locations = [0.0_f64; 8];
            let mut is_max = [0_u8; 8];
            let mut written = 0_usize;
            assert_eq!(
                bbs_model_modes(model, locations.as_mut_ptr(), is_max.as_mut_ptr(), 8, &mut written),
                BbsStatus::Ok
            );
            assert_eq!(written, 3);
            assert!((locations[0] - 0.1761).abs() < 1e-3);
            assert!((locations[2] - 1.0).abs() < 1e-3);
            assert_eq!([is_max[0], is_max[1], is_max[2]], [1, 0, 1]);
            bbs_model_free(model);
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        unsafe {
            let mut model: *mut BbsModel = std::ptr::null_mut();
            assert_eq!(bbs_model_new(0.5, 2.0, 1.0, &mut model), BbsStatus::Ok);
            let mut a = [0.0_f64; 64];
            let mut b = [0.0_f64; 64];
            assert_eq!(bbs_model_sample(model, 9, 64, a.as_mut_ptr()), BbsStatus::Ok);
            assert_eq!(bbs_model_sample(model, 9, 64, b.as_mut_ptr()), BbsStatus::Ok);
            assert_eq!(a, b);
            assert!(a.iter().all(|&t| t > 0.0));
            bbs_model_free(model);
        }
    }

    #[test]
    fn fit_round_trip() {
        unsafe {
            let mut model: *mut BbsModel = std::ptr::null_mut();
            assert_eq!(bbs_model_new(0.5, 1.0, -1.0, &mut model), BbsStatus::Ok);
            let mut draws = vec![0.0_f64; 400];
            assert_eq!(bbs_model_sample(model, 77, 400, draws.as_mut_ptr()), BbsStatus::Ok);
            bbs_model_free(model);

            let mut fit: *mut BbsFit = std::ptr::null_mut();
            assert_eq!(
                bbs_fit_profile(draws.as_ptr(), std::ptr::null(), 400, -4, 2, &mut fit),
                BbsStatus::Ok
            );
            let (mut alpha, mut beta, mut delta) = (0.0, 0.0, 0.0);
            assert_eq!(bbs_fit_params(fit, &mut alpha, &mut beta, &mut delta), BbsStatus::Ok);
            assert!((alpha - 0.5).abs() < 0.15, "alpha {alpha}");
            assert!((beta - 1.0).abs() < 0.15, "beta {beta}");
            let (mut ll, mut aic, mut bic) = (0.0, 0.0, 0.0);
            assert_eq!(bbs_fit_quality(fit, &mut ll, &mut aic, &mut bic), BbsStatus::Ok);
            assert!((aic - (-2.0 * ll + 6.0)).abs() < 1e-9);
            let (mut se_a, mut se_b) = (0.0, 0.0);
            assert_eq!(bbs_fit_standard_errors(fit, &mut se_a, &mut se_b), BbsStatus::Ok);
            assert!(se_a > 0.0 && se_b > 0.0);
            bbs_fit_free(fit);
        }
    }

    #[test]
    fn moments_via_handle() {
        unsafe {
            let mut model: *mut BbsModel = std::ptr::null_mut();
            assert_eq!(bbs_model_new(0.5, 1.0, 0.0, &mut model), BbsStatus::Ok);
            let (mut mean, mut variance) = (0.0, 0.0);
            assert_eq!(bbs_model_moments(model, &mut mean, &mut variance), BbsStatus::Ok);
            assert!((mean - 1.125).abs() < 1e-6);
            assert!(variance > 0.0);
            bbs_model_free(model);
        }
    }
}
