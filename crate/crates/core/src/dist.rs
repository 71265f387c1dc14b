//! The bimodal Birnbaum-Saunders law BBS(alpha, beta, delta).
//!
//! A lifetime T follows BBS(alpha, beta, delta) when a(T) ~ ASN(delta),
//! where a(t) = [sqrt(t/beta) - sqrt(beta/t)] / alpha is the usual
//! Birnbaum-Saunders transform. delta = 0 recovers the classical BS law;
//! nonzero delta buys one or two modes without resorting to mixtures.

use crate::asn::AsnParams;
use crate::error::{Error, Result};
use crate::numerics::normal::SQRT_2PI;
use crate::numerics::rng::RngStream;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BbsParams {
    alpha: f64,
    beta: f64,
    delta: f64,
}

impl BbsParams {
    pub fn new(alpha: f64, beta: f64, delta: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Invalid(format!("alpha must be positive, got {alpha}")));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::Invalid(format!("beta must be positive, got {beta}")));
        }
        if !delta.is_finite() {
            return Err(Error::Invalid(format!("delta must be finite, got {delta}")));
        }
        Ok(BbsParams { alpha, beta, delta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn asn(&self) -> AsnParams {
        AsnParams::new(self.delta).expect("delta validated at construction")
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("t must be in (0, inf), got {t}")));
        }
        Ok(())
    }

    // ---- the a(.) transform and its derivatives ----

    #[inline]
    pub(crate) fn a_raw(&self, t: f64) -> f64 {
        ((t / self.beta).sqrt() - (self.beta / t).sqrt()) / self.alpha
    }

    #[inline]
    pub(crate) fn a1_raw(&self, t: f64) -> f64 {
        ((t / self.beta).sqrt() + (self.beta / t).sqrt()) / (2.0 * self.alpha * t)
    }

    #[inline]
    pub(crate) fn a2_raw(&self, t: f64) -> f64 {
        -((t / self.beta).sqrt() + 3.0 * (self.beta / t).sqrt()) / (4.0 * self.alpha * t * t)
    }

    #[inline]
    pub(crate) fn a3_raw(&self, t: f64) -> f64 {
        3.0 * ((t / self.beta).sqrt() + 5.0 * (self.beta / t).sqrt())
            / (8.0 * self.alpha * t * t * t)
    }

    /// a(t); strictly increasing, a(beta) = 0.
    pub fn a_of_t(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.a_raw(t))
    }

    /// k-th derivative of a(t) for k in 1..=3. Odd orders are positive, even
    /// orders negative.
    pub fn a_derivative(&self, t: f64, order: u8) -> Result<f64> {
        self.check_t(t)?;
        match order {
            1 => Ok(self.a1_raw(t)),
            2 => Ok(self.a2_raw(t)),
            3 => Ok(self.a3_raw(t)),
            _ => Err(Error::Invalid(format!("derivative order {order} not in 1..=3"))),
        }
    }

    /// Inverse of a(.): (beta/4) [alpha x + sqrt((alpha x)^2 + 4)]^2.
    ///
    /// The bracket is positive for every x (sqrt dominates), so there is no
    /// cancellation for x < 0.
    pub fn a_inverse(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("a_inverse: non-finite x = {x}")));
        }
        Ok(self.a_inverse_raw(x))
    }

    #[inline]
    pub(crate) fn a_inverse_raw(&self, x: f64) -> f64 {
        let ax = self.alpha * x;
        let s = ax + (ax * ax + 4.0).sqrt();
        self.beta * 0.25 * s * s
    }

    // ---- density, distribution, survival, hazard ----

    pub fn pdf(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.pdf_raw(t))
    }

    #[inline]
    pub(crate) fn pdf_raw(&self, t: f64) -> f64 {
        self.asn().pdf(self.a_raw(t)) * self.a1_raw(t)
    }

    pub fn log_pdf(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.log_pdf_raw(t))
    }

    #[inline]
    pub(crate) fn log_pdf_raw(&self, t: f64) -> f64 {
        let d = self.delta;
        let a = self.a_raw(t);
        let u = 1.0 - d * a;
        (u * u + 1.0).ln() - (2.0 + d * d).ln() - 0.5 * a * a - SQRT_2PI.ln()
            + self.a1_raw(t).ln()
    }

    pub fn cdf(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.cdf_raw(t))
    }

    #[inline]
    pub(crate) fn cdf_raw(&self, t: f64) -> f64 {
        self.asn().cdf(self.a_raw(t)).clamp(0.0, 1.0)
    }

    pub fn sf(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.sf_raw(t))
    }

    #[inline]
    pub(crate) fn sf_raw(&self, t: f64) -> f64 {
        (1.0 - self.cdf_raw(t)).clamp(0.0, 1.0)
    }

    /// Hazard rate pdf/sf. Errs rather than returning infinity once the
    /// survival function has underflowed.
    pub fn hazard(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        let s = self.sf_raw(t);
        if s < 1e-300 {
            return Err(Error::Overflow(format!(
                "hazard at t = {t}: survival function underflowed"
            )));
        }
        Ok(self.pdf_raw(t) / s)
    }

    /// Quantile: a_inverse applied to the ASN quantile.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0 < u && u < 1.0) {
            return Err(Error::Domain(format!("quantile: u = {u} outside (0, 1)")));
        }
        Ok(self.a_inverse_raw(self.asn().quantile(u)?))
    }

    /// Draw `n` values by CDF inversion of the ASN law pushed through
    /// a_inverse. Inversion is exact to root tolerance; rejection against a
    /// normal envelope is not valid here because the ASN/normal density
    /// ratio is unbounded.
    pub fn sample(&self, n: usize, rng: &mut RngStream) -> Vec<f64> {
        let asn = self.asn();
        (0..n)
            .map(|_| {
                let u = rng.next_uniform();
                let x = asn.quantile(u).expect("u strictly inside (0,1)");
                self.a_inverse_raw(x)
            })
            .collect()
    }

    // ---- density derivatives (mode machinery) ----

    /// f'(t) = g'(a) a'^2 + g(a) a''.
    pub fn pdf_deriv1(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        let a = self.a_raw(t);
        let a1 = self.a1_raw(t);
        Ok(self.asn().pdf_deriv1(a) * a1 * a1 + self.asn().pdf(a) * self.a2_raw(t))
    }

    /// f''(t) = g''(a) a'^3 + 3 g'(a) a' a'' + g(a) a'''.
    pub fn pdf_deriv2(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        let asn = self.asn();
        let a = self.a_raw(t);
        let a1 = self.a1_raw(t);
        let a2 = self.a2_raw(t);
        Ok(asn.pdf_deriv2(a) * a1 * a1 * a1
            + 3.0 * asn.pdf_deriv1(a) * a1 * a2
            + asn.pdf(a) * self.a3_raw(t))
    }
}
