//! Delta-method confidence intervals for S(t), E[T] and Var[T], with the
//! bimodality parameter treated as known.
//!
//! The pointwise band is S(t; theta_hat) +- z sigma_hat(t) / sqrt(n) with
//! sigma_hat^2(t) = J_S [I(theta_hat)]^{-1} J_S^T, where I is the
//! per-observation information (observed information over n) and
//! J_S = -g(a(t)) [da/dalpha, da/dbeta] by the chain rule on F = G o a.
//! The mean interval integrates the band width over (0, inf); the variance
//! interval pushes the whole band through
//!   bound(f, g) = 2 Int t f(t) dt - (Int g(t) dt)^2,
//! which recovers Var[T] = E[T^2] - E[T]^2 exactly when the band collapses,
//! and holds with confidence coefficient 1 - 2 rho.

use crate::dist::BbsParams;
use crate::error::{Error, Result};
use crate::estimation::{invert_2x2, observed_information, FitResult, Observation};
use crate::moments::bbs_moments;
use crate::numerics::normal::std_normal_quantile;
use crate::numerics::quad::{integrate_seeded, QuadratureSettings};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "kebab-case")]
pub enum CiTarget {
    SurvivalAtT { t: f64 },
    Mean,
    Variance,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CiResult {
    pub target: CiTarget,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    /// 1 - rho for survival and mean targets, 1 - 2 rho for the variance.
    pub confidence: f64,
    pub rho: f64,
}

/// Per-observation asymptotic covariance scaled back to the sample:
/// n * [observed information]^{-1} / n = [observed information]^{-1}, i.e.
/// the z/sqrt(n) factor and the 1/n in I cancel. We keep the total-information
/// inverse and drop the explicit sqrt(n).
fn total_covariance(data: &[Observation], p: &BbsParams) -> Result<[[f64; 2]; 2]> {
    let info = observed_information(data, p)?;
    invert_2x2(&info).ok_or(Error::SingularInformation)
}

/// Band half-width divided by z: sqrt(J Sigma J^T) with Sigma the
/// total-information inverse.
fn band_unit_width(p: &BbsParams, cov: &[[f64; 2]; 2], t: f64) -> f64 {
    let a = p.a_raw(t);
    let g = p.asn().pdf(a);
    // da/dalpha = -a/alpha, da/dbeta = -(c1 + c2)/(2 alpha beta)
    let ja = -g * (-a / p.alpha());
    let c1 = (t / p.beta()).sqrt();
    let c2 = (p.beta() / t).sqrt();
    let jb = -g * (-(c1 + c2) / (2.0 * p.alpha() * p.beta()));
    let v = ja * (cov[0][0] * ja + cov[0][1] * jb) + jb * (cov[1][0] * ja + cov[1][1] * jb);
    v.max(0.0).sqrt()
}

fn check_rho(rho: f64) -> Result<f64> {
    if !(0.0 < rho && rho < 1.0) {
        return Err(Error::Domain(format!("rho = {rho} outside (0, 1)")));
    }
    std_normal_quantile(1.0 - rho / 2.0)
}

fn check_fit(fit: &FitResult) -> Result<()> {
    if !fit.converged {
        return Err(Error::Invalid("confidence intervals require a converged fit".into()));
    }
    Ok(())
}

/// Pointwise CI for S(t) at confidence level 1 - rho, clamped to [0, 1].
pub fn ci_survival(t: f64, fit: &FitResult, data: &[Observation], rho: f64) -> Result<CiResult> {
    check_fit(fit)?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("survival CI requires t > 0, got {t}")));
    }
    let z = check_rho(rho)?;
    let p = &fit.params;
    let cov = total_covariance(data, p)?;
    let s = p.sf(t)?;
    let half = z * band_unit_width(p, &cov, t);
    Ok(CiResult {
        target: CiTarget::SurvivalAtT { t },
        estimate: s,
        lower: (s - half).clamp(0.0, 1.0),
        upper: (s + half).clamp(0.0, 1.0),
        confidence: 1.0 - rho,
        rho,
    })
}

/// Integration bounds for the survival-band integrals: from 0 (the
/// Gauss-Kronrod rule never evaluates endpoints, and survival-type
/// integrands stay near 1 all the way down) to the 1 - 1e-10 quantile,
/// then doubled until the tail contribution drops below the absolute
/// tolerance.
fn band_integral<F: Fn(f64) -> f64>(p: &BbsParams, integrand: F, qs: &QuadratureSettings) -> Result<f64> {
    let lo = 0.0;
    let mut hi = p.quantile(qs.upper_truncation_quantile)?;
    let seeds: Vec<f64> = [1e-6, 1e-3, 0.05, 0.25, 0.5, 0.75, 0.95]
        .iter()
        .map(|&q| p.quantile(q))
        .collect::<Result<_>>()?;
    let mut total = integrate_seeded(&integrand, lo, hi, &seeds, qs)?;
    for _ in 0..32 {
        let next = hi * 2.0;
        let tail = integrate_seeded(&integrand, hi, next, &[], qs)?;
        total += tail;
        hi = next;
        if tail.abs() < qs.abs_tol {
            return Ok(total);
        }
    }
    Err(Error::Quadrature { estimate: total, error: f64::NAN })
}

fn ci_quadrature_settings() -> QuadratureSettings {
    QuadratureSettings { abs_tol: 1e-9, rel_tol: 1e-9, upper_truncation_quantile: 1.0 - 1e-10 }
}

/// CI for E[T] at confidence level 1 - rho; the lower bound is floored at 0.
pub fn ci_mean(fit: &FitResult, data: &[Observation], rho: f64) -> Result<CiResult> {
    check_fit(fit)?;
    let z = check_rho(rho)?;
    let p = &fit.params;
    let cov = total_covariance(data, p)?;
    let qs = ci_quadrature_settings();
    let mean = bbs_moments(p)?.mean;
    let width = band_integral(p, |t| band_unit_width(p, &cov, t), &qs)?;
    let half = z * width;
    Ok(CiResult {
        target: CiTarget::Mean,
        estimate: mean,
        lower: (mean - half).max(0.0),
        upper: mean + half,
        confidence: 1.0 - rho,
        rho,
    })
}

/// CI for Var[T] with confidence coefficient 1 - 2 rho.
///
/// Bounds push the lower/upper survival bands L-(t) (floored at zero
/// pointwise) and L+(t) through 2 Int t L dt - (Int L dt)^2, pairing the
/// opposite band inside the squared term; the final lower bound is floored
/// at 0.
pub fn ci_variance(fit: &FitResult, data: &[Observation], rho: f64) -> Result<CiResult> {
    check_fit(fit)?;
    let z = check_rho(rho)?;
    let p = &fit.params;
    let cov = total_covariance(data, p)?;
    let qs = ci_quadrature_settings();

    let l_minus = |t: f64| (p.sf_raw(t) - z * band_unit_width(p, &cov, t)).max(0.0);
    let l_plus = |t: f64| p.sf_raw(t) + z * band_unit_width(p, &cov, t);

    let i1_minus = band_integral(p, |t| t * l_minus(t), &qs)?;
    let i1_plus = band_integral(p, |t| t * l_plus(t), &qs)?;
    let i0_minus = band_integral(p, l_minus, &qs)?;
    let i0_plus = band_integral(p, l_plus, &qs)?;

    let lower = (2.0 * i1_minus - i0_plus * i0_plus).max(0.0);
    let upper = 2.0 * i1_plus - i0_minus * i0_minus;
    let variance = bbs_moments(p)?.variance;
    Ok(CiResult {
        target: CiTarget::Variance,
        estimate: variance,
        lower,
        upper,
        confidence: 1.0 - 2.0 * rho,
        rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{fit_at_delta, observations_from_times, ProfileGridSpec};
    use crate::numerics::RngStream;

    fn fitted_example() -> (FitResult, Vec<Observation>) {
        let truth = BbsParams::new(0.5, 1.0, -1.0).unwrap();
        let mut rng = RngStream::new(100);
        let data = observations_from_times(&truth.sample(300, &mut rng)).unwrap();
        // profile restricted around the truth keeps the test fast
        let fit =
            crate::estimation::fit_profile(&data, &ProfileGridSpec::integer_range(-3, 1)).unwrap();
        (fit, data)
    }

    #[test]
    fn survival_interval_shrinks_to_point_as_rho_goes_to_one() {
        let (fit, data) = fitted_example();
        // rho -> 1 means z -> 0: the interval collapses onto the estimate
        let ci = ci_survival(1.0, &fit, &data, 0.999_999).unwrap();
        assert!((ci.upper - ci.lower).abs() < 1e-5);
        assert!((ci.estimate - fit.params.sf(1.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn survival_jacobian_matches_finite_differences() {
        let p = BbsParams::new(0.5, 1.0, -1.0).unwrap();
        let cov = [[1.0, 0.0], [0.0, 1.0]];
        for &t in &[0.3, 0.8, 1.5, 3.0] {
            let got = band_unit_width(&p, &cov, t);
            // with identity covariance the width is the Jacobian norm
            let h = 1e-6;
            let sa = |al: f64, be: f64| BbsParams::new(al, be, -1.0).unwrap().sf(t).unwrap();
            let ja = (sa(0.5 + h * 0.5, 1.0) - sa(0.5 - h * 0.5, 1.0)) / (2.0 * h * 0.5);
            let jb = (sa(0.5, 1.0 + h) - sa(0.5, 1.0 - h)) / (2.0 * h);
            let want = (ja * ja + jb * jb).sqrt();
            assert!((got - want).abs() <= 1e-6 * want.max(1e-8), "t = {t}: {got} vs {want}");
        }
    }

    #[test]
    fn survival_bounds_stay_in_unit_interval() {
        let (fit, data) = fitted_example();
        for i in 1..=20 {
            let t = 0.2 * i as f64;
            let ci = ci_survival(t, &fit, &data, 0.05).unwrap();
            assert!(ci.lower >= 0.0 && ci.upper <= 1.0);
            assert!(ci.lower <= ci.estimate && ci.estimate <= ci.upper);
        }
    }

    #[test]
    fn mean_interval_contains_point_estimate() {
        let (fit, data) = fitted_example();
        let ci = ci_mean(&fit, &data, 0.05).unwrap();
        let m = bbs_moments(&fit.params).unwrap().mean;
        assert!((ci.estimate - m).abs() < 1e-8);
        assert!(ci.lower <= m && m <= ci.upper);
        assert!(ci.lower >= 0.0);
    }

    #[test]
    fn nested_intervals() {
        let (fit, data) = fitted_example();
        let wide = ci_survival(1.0, &fit, &data, 0.01).unwrap();
        let narrow = ci_survival(1.0, &fit, &data, 0.10).unwrap();
        assert!(wide.lower <= narrow.lower && narrow.upper <= wide.upper);
    }

    #[test]
    fn variance_interval_collapses_to_variance_as_z_vanishes() {
        let (fit, data) = fitted_example();
        let ci = ci_variance(&fit, &data, 0.999_999).unwrap();
        let v = bbs_moments(&fit.params).unwrap().variance;
        // both bounds approach 2 Int t S - (Int S)^2 = Var[T]
        assert!((ci.lower - v).abs() < 1e-4 * v.max(1.0), "lower {} vs {v}", ci.lower);
        assert!((ci.upper - v).abs() < 1e-4 * v.max(1.0), "upper {} vs {v}", ci.upper);
    }

    #[test]
    fn variance_interval_contains_plugin_variance() {
        let (fit, data) = fitted_example();
        let ci = ci_variance(&fit, &data, 0.025).unwrap();
        assert!((ci.confidence - 0.95).abs() < 1e-12);
        let v = bbs_moments(&fit.params).unwrap().variance;
        assert!(ci.lower <= v && v <= ci.upper);
    }

    #[test]
    fn mean_width_decreases_with_sample_size() {
        let truth = BbsParams::new(0.5, 1.0, -1.0).unwrap();
        let mut rng = RngStream::new(55);
        let times = truth.sample(800, &mut rng);
        let small = observations_from_times(&times[..200]).unwrap();
        let large = observations_from_times(&times).unwrap();
        let fit_small = {
            let s = fit_at_delta(&small, -1.0).unwrap();
            fit_result_known_delta(&small, s)
        };
        let fit_large = {
            let s = fit_at_delta(&large, -1.0).unwrap();
            fit_result_known_delta(&large, s)
        };
        let w_small = {
            let ci = ci_mean(&fit_small, &small, 0.05).unwrap();
            ci.upper - ci.lower
        };
        let w_large = {
            let ci = ci_mean(&fit_large, &large, 0.05).unwrap();
            ci.upper - ci.lower
        };
        assert!(w_large < w_small, "{w_large} vs {w_small}");
    }

    fn fit_result_known_delta(data: &[Observation], s: crate::estimation::SubFit) -> FitResult {
        FitResult {
            params: BbsParams::new(s.alpha, s.beta, -1.0).unwrap(),
            se_alpha: None,
            se_beta: None,
            delta_profiled: false,
            loglik: s.loglik,
            aic: f64::NAN,
            bic: f64::NAN,
            converged: s.converged,
            iterations: s.iterations,
            n: data.len(),
            n_events: data.len(),
            profile_trace: vec![],
            skipped_deltas: vec![],
        }
    }
}
