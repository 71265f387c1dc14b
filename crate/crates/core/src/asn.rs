//! Alpha-skew-normal law ASN(delta).
//!
//! Density g(x) = [(1 - delta x)^2 + 1] / (2 + delta^2) * phi(x), a normal
//! reweighted by a quadratic. One parameter controls whether the density has
//! one or two modes; delta = 0 recovers N(0, 1).

use crate::error::{Error, Result};
use crate::numerics::normal::{big_phi, phi};
use crate::numerics::root;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsnParams {
    delta: f64,
}

impl AsnParams {
    pub fn new(delta: f64) -> Result<Self> {
        if !delta.is_finite() {
            return Err(Error::Invalid(format!("ASN delta must be finite, got {delta}")));
        }
        Ok(AsnParams { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let d = self.delta;
        let u = 1.0 - d * x;
        (u * u + 1.0) / (2.0 + d * d) * phi(x)
    }

    /// G(x) = Phi(x) + delta (2 - delta x) / (2 + delta^2) phi(x).
    pub fn cdf(&self, x: f64) -> f64 {
        let d = self.delta;
        big_phi(x) + d * (2.0 - d * x) / (2.0 + d * d) * phi(x)
    }

    /// First derivative of the density.
    pub(crate) fn pdf_deriv1(&self, x: f64) -> f64 {
        let d = self.delta;
        phi(x) / (2.0 + d * d)
            * (-d * d * x * x * x + 2.0 * d * x * x - 2.0 * (1.0 - d * d) * x - 2.0 * d)
    }

    /// Second derivative of the density.
    pub(crate) fn pdf_deriv2(&self, x: f64) -> f64 {
        let d = self.delta;
        -x * self.pdf_deriv1(x)
            + phi(x) * (-3.0 * d * d * x * x + 4.0 * d * x - 2.0 * (1.0 - d * d)) / (2.0 + d * d)
    }

    /// Quantile by bracketed inversion of the CDF.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0 < u && u < 1.0) {
            return Err(Error::Domain(format!("ASN quantile: u = {u} outside (0, 1)")));
        }
        // The CDF is sandwiched between normal CDFs shifted by the phi-term
        // envelope, so +-45 brackets every representable u.
        root::find_root(|x| self.cdf(x) - u, -45.0, 45.0, 1e-13)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, QuadratureSettings};

    #[test]
    fn delta_zero_is_standard_normal() {
        let a = AsnParams::new(0.0).unwrap();
        assert!((a.pdf(0.0) - phi(0.0)).abs() < 1e-15);
        for &x in &[-2.0, -0.5, 0.7, 3.1] {
            assert!((a.pdf(x) - phi(x)).abs() < 1e-15);
            assert!((a.cdf(x) - big_phi(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn pdf_normalizes() {
        let s = QuadratureSettings::default();
        for &d in &[-6.0, -1.0, 0.3, 2.0, 9.0] {
            let a = AsnParams::new(d).unwrap();
            let v = integrate(|x| a.pdf(x), -42.0, 42.0, &s).unwrap();
            assert!((v - 1.0).abs() < 1e-8, "delta {d}: integral {v}");
        }
    }

    #[test]
    fn cdf_closed_form_at_zero_delta_one() {
        // Phi(0) + (2/3) phi(0), evaluated independently
        let a = AsnParams::new(1.0).unwrap();
        assert!((a.cdf(0.0) - 0.765_961_5).abs() < 1e-7);
    }

    #[test]
    fn cdf_monotone_with_limits() {
        let a = AsnParams::new(-3.0).unwrap();
        let mut prev = 0.0;
        for i in 0..=400 {
            let x = -10.0 + i as f64 * 0.05;
            let c = a.cdf(x);
            assert!(c >= prev - 1e-14);
            prev = c;
        }
        assert!(a.cdf(-40.0).abs() < 1e-12);
        assert!((a.cdf(40.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_round_trip() {
        let a = AsnParams::new(-1.0).unwrap();
        for i in 1..100 {
            let u = i as f64 / 100.0;
            let x = a.quantile(u).unwrap();
            assert!((a.cdf(x) - u).abs() < 1e-11);
        }
    }

    #[test]
    fn density_derivatives_match_finite_differences() {
        let a = AsnParams::new(-2.5).unwrap();
        let h = 1e-5;
        for &x in &[-1.8, -0.3, 0.0, 0.9, 2.4] {
            let d1 = (a.pdf(x + h) - a.pdf(x - h)) / (2.0 * h);
            let d2 = (a.pdf(x + h) - 2.0 * a.pdf(x) + a.pdf(x - h)) / (h * h);
            assert!((a.pdf_deriv1(x) - d1).abs() < 1e-6 * d1.abs().max(1.0));
            assert!((a.pdf_deriv2(x) - d2).abs() < 1e-4 * d2.abs().max(1.0));
        }
    }
}
