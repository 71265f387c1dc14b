//! Standard-normal density, distribution function and quantile.
//!
//! The CDF is evaluated through `erfc`, which gives absolute error well
//! below 1e-12 over the whole line; the quantile inverts the CDF with a
//! bracketed root search.

use crate::error::{Error, Result};
use crate::numerics::root;

pub(crate) const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// phi(x) = exp(-x^2/2) / sqrt(2 pi), unchecked.
#[inline]
pub(crate) fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Phi(x) = erfc(-x/sqrt(2)) / 2, unchecked.
#[inline]
pub(crate) fn big_phi(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal PDF.
pub fn std_normal_pdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("std_normal_pdf: non-finite x = {x}")));
    }
    Ok(phi(x))
}

/// Standard normal CDF.
pub fn std_normal_cdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("std_normal_cdf: non-finite x = {x}")));
    }
    Ok(big_phi(x))
}

/// Inverse standard normal CDF, `p` in (0, 1).
///
/// Used for the delta-method critical values `z`; inverts `Phi` by root
/// finding so its accuracy is tied to the CDF itself.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::Domain(format!(
            "std_normal_quantile: p = {p} outside (0, 1)"
        )));
    }
    // Phi(-39) underflows to 0 and Phi(39) rounds to 1 in f64, so this
    // bracket covers every representable p in (0, 1).
    root::find_root(|x| big_phi(x) - p, -40.0, 40.0, 1e-13)
}
