//! Maximum-likelihood machinery for the BBS model.
//!
//! The bimodality parameter delta is never optimized continuously: the
//! likelihood is profiled over a grid (integers -20..=20 by default), and
//! for each fixed delta the pair (alpha, beta) is maximized by BFGS on the
//! log scale. Right-censored records contribute log-survival terms.

use crate::dist::BbsParams;
use crate::error::{Error, Result};
use crate::numerics::optim::{minimize, Minimum, OptimizerSettings};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One time-to-event record: `time` is min(event time, censoring time),
/// `event` is true when the event was observed and false when right-censored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub time: f64,
    pub event: bool,
}

impl Observation {
    pub fn new(time: f64, event: bool) -> Result<Self> {
        if !(time > 0.0) || !time.is_finite() {
            return Err(Error::Domain(format!("observation time must be positive, got {time}")));
        }
        Ok(Observation { time, event })
    }

    pub fn exact(time: f64) -> Result<Self> {
        Observation::new(time, true)
    }
}

/// Convert plain times into all-event observations.
pub fn observations_from_times(times: &[f64]) -> Result<Vec<Observation>> {
    times.iter().map(|&t| Observation::exact(t)).collect()
}

// ---- log-likelihoods ----

/// Complete-data log-likelihood, constants included so the values line up
/// with published model-selection tables.
pub fn loglik_complete(data: &[Observation], p: &BbsParams) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Invalid("empty data".into()));
    }
    if let Some(o) = data.iter().find(|o| !o.event) {
        return Err(Error::Invalid(format!(
            "loglik_complete requires all-event data; found a censored record at t = {}",
            o.time
        )));
    }
    Ok(data.iter().map(|o| p.log_pdf_raw(o.time)).sum())
}

pub(crate) fn loglik_censored_raw(data: &[Observation], p: &BbsParams) -> f64 {
    data.iter()
        .map(|o| {
            if o.event {
                p.log_pdf_raw(o.time)
            } else {
                p.sf_raw(o.time).ln()
            }
        })
        .sum()
}

/// Log-likelihood under uninformative right censoring: events contribute
/// log f, censored records log S with S = 1 - F.
pub fn loglik_censored(data: &[Observation], p: &BbsParams) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Invalid("empty data".into()));
    }
    Ok(loglik_censored_raw(data, p))
}

// ---- score ----

/// W(t) = 2 delta (1 - delta a) / [1 + (1 - delta a)^2] + a; the score and
/// Hessian are built from W and its a-derivative V = -dW/da.
#[inline]
fn w_term(p: &BbsParams, a: f64) -> f64 {
    let d = p.delta();
    let u = 1.0 - d * a;
    2.0 * d * u / (1.0 + u * u) + a
}

#[inline]
fn v_term(p: &BbsParams, a: f64) -> f64 {
    let d = p.delta();
    let u = 1.0 - d * a;
    let den = 1.0 + u * u;
    2.0 * d * d * (1.0 - u * u) / (den * den) - 1.0
}

/// Partial derivatives of a(t) in (alpha, beta).
#[inline]
fn a_alpha(p: &BbsParams, t: f64) -> f64 {
    -p.a_raw(t) / p.alpha()
}

#[inline]
fn a_beta(p: &BbsParams, t: f64) -> f64 {
    let c1 = (t / p.beta()).sqrt();
    let c2 = (p.beta() / t).sqrt();
    -(c1 + c2) / (2.0 * p.alpha() * p.beta())
}

/// Analytic score of the complete-data log-likelihood in (alpha, beta).
pub fn score_complete(data: &[Observation], p: &BbsParams) -> Result<[f64; 2]> {
    if data.is_empty() {
        return Err(Error::Invalid("empty data".into()));
    }
    if data.iter().any(|o| !o.event) {
        return Err(Error::Invalid("score_complete requires all-event data".into()));
    }
    let n = data.len() as f64;
    let (alpha, beta) = (p.alpha(), p.beta());
    let mut s_alpha = -n / alpha;
    let mut s_beta = -n / (2.0 * beta);
    for o in data {
        let t = o.time;
        let a = p.a_raw(t);
        let w = w_term(p, a);
        s_alpha -= w * a_alpha(p, t);
        s_beta += 1.0 / (t + beta) - w * a_beta(p, t);
    }
    Ok([s_alpha, s_beta])
}

/// Score including censored terms: d log S / d theta = -g(a) a_theta / S.
pub(crate) fn score_full(data: &[Observation], p: &BbsParams) -> [f64; 2] {
    let (alpha, beta) = (p.alpha(), p.beta());
    let asn = p.asn();
    let mut s = [0.0_f64; 2];
    for o in data {
        let t = o.time;
        let a = p.a_raw(t);
        let (da, db) = (a_alpha(p, t), a_beta(p, t));
        if o.event {
            let w = w_term(p, a);
            s[0] += -1.0 / alpha - w * da;
            s[1] += -1.0 / (2.0 * beta) + 1.0 / (t + beta) - w * db;
        } else {
            let sf = p.sf_raw(t);
            let g = asn.pdf(a);
            s[0] -= g * da / sf;
            s[1] -= g * db / sf;
        }
    }
    s
}

// ---- observed information ----

/// Negative Hessian of the log-likelihood in (alpha, beta) at `p`.
///
/// Event terms use the analytic second derivatives built from V and W;
/// censored terms (no published second derivatives) are differenced
/// numerically from the censored part of the log-likelihood.
pub fn observed_information(data: &[Observation], p: &BbsParams) -> Result<[[f64; 2]; 2]> {
    if data.is_empty() {
        return Err(Error::Invalid("empty data".into()));
    }
    let (alpha, beta) = (p.alpha(), p.beta());
    let mut h_aa = 0.0;
    let mut h_ab = 0.0;
    let mut h_bb = 0.0;
    for o in data.iter().filter(|o| o.event) {
        let t = o.time;
        let a = p.a_raw(t);
        let w = w_term(p, a);
        let v = v_term(p, a);
        let (da, db) = (a_alpha(p, t), a_beta(p, t));
        let c1 = (t / beta).sqrt();
        let c2 = (beta / t).sqrt();
        let daa = 2.0 * a / (alpha * alpha);
        let dbb = (3.0 * c1 + c2) / (4.0 * alpha * beta * beta);
        let dab = (c1 + c2) / (2.0 * alpha * alpha * beta);
        h_aa += 1.0 / (alpha * alpha) + v * da * da - w * daa;
        h_bb += 1.0 / (2.0 * beta * beta) - 1.0 / ((t + beta) * (t + beta)) + v * db * db
            - w * dbb;
        h_ab += v * da * db - w * dab;
    }

    let censored: Vec<Observation> = data.iter().copied().filter(|o| !o.event).collect();
    if !censored.is_empty() {
        let f = |al: f64, be: f64| -> f64 {
            let q = BbsParams::new(al, be, p.delta()).expect("positive params");
            censored.iter().map(|o| q.sf_raw(o.time).ln()).sum()
        };
        let (ha, hb) = (1e-5 * alpha, 1e-5 * beta);
        let f00 = f(alpha, beta);
        h_aa += (f(alpha + ha, beta) - 2.0 * f00 + f(alpha - ha, beta)) / (ha * ha);
        h_bb += (f(alpha, beta + hb) - 2.0 * f00 + f(alpha, beta - hb)) / (hb * hb);
        h_ab += (f(alpha + ha, beta + hb) - f(alpha + ha, beta - hb) - f(alpha - ha, beta + hb)
            + f(alpha - ha, beta - hb))
            / (4.0 * ha * hb);
    }

    Ok([[-h_aa, -h_ab], [-h_ab, -h_bb]])
}

/// Invert a symmetric 2x2; None when (numerically) singular.
pub(crate) fn invert_2x2(m: &[[f64; 2]; 2]) -> Option<[[f64; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m[0][0].abs().max(m[1][1].abs()).max(1e-300);
    if !det.is_finite() || det.abs() <= 1e-14 * scale * scale {
        return None;
    }
    Some([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]])
}

// ---- fitting ----

/// Starting values: alpha from the coefficient of variation (clipped to a
/// sane band), beta from the sample median. Both are scale-correct, so the
/// same policy works untouched for every grid delta.
pub(crate) fn starting_values(times: &[f64]) -> (f64, f64) {
    let n = times.len() as f64;
    let mean = times.iter().sum::<f64>() / n;
    let var = times.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    let cv = (var.sqrt() / mean).clamp(0.05, 4.0);
    let mut sorted = times.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };
    (cv, median)
}

#[derive(Debug, Clone, Copy)]
pub struct SubFit {
    pub alpha: f64,
    pub beta: f64,
    pub loglik: f64,
    pub converged: bool,
    pub iterations: usize,
}

pub(crate) fn estimation_optimizer_settings() -> OptimizerSettings {
    OptimizerSettings {
        max_iterations: 400,
        gradient_tolerance: 1e-7,
        step_tolerance: 1e-12,
        finite_difference_step: 1e-6,
    }
}

/// Maximize the (possibly censored) likelihood over (alpha, beta) with delta
/// held fixed. Optimization runs on (ln alpha, ln beta) so positivity needs
/// no constraint handling.
///
/// The likelihood slice can be multimodal once delta makes the density
/// bimodal (the two model modes can latch onto the two data clusters in
/// either order), so a coarse log-spaced scan over beta at the CV-based
/// alpha picks the global basin before BFGS polishes; the sample-median
/// start is kept as a second candidate and the better optimum wins.
pub fn fit_at_delta(data: &[Observation], delta: f64) -> Result<SubFit> {
    if data.len() < 2 {
        return Err(Error::Fit("need at least 2 observations".into()));
    }
    let times: Vec<f64> = data.iter().map(|o| o.time).collect();
    let (a0, b0) = starting_values(&times);

    let nll = |x: &[f64]| -> f64 {
        let (alpha, beta) = (x[0].exp(), x[1].exp());
        match BbsParams::new(alpha, beta, delta) {
            Ok(p) => -loglik_censored_raw(data, &p),
            Err(_) => f64::INFINITY,
        }
    };
    // Analytic gradient on the log scale: d/d(ln theta) = theta d/d(theta).
    let grad = move |x: &[f64]| -> Vec<f64> {
        let (alpha, beta) = (x[0].exp(), x[1].exp());
        match BbsParams::new(alpha, beta, delta) {
            Ok(p) => {
                let s = score_full(data, &p);
                vec![-s[0] * alpha, -s[1] * beta]
            }
            Err(_) => vec![f64::NAN, f64::NAN],
        }
    };

    let t_min = times.iter().cloned().fold(f64::MAX, f64::min);
    let t_max = times.iter().cloned().fold(f64::MIN, f64::max);
    let (scan_lo, scan_hi) = ((0.25 * t_min).ln(), (4.0 * t_max).ln());
    let mut b_scan = b0.ln();
    let mut scan_best = f64::INFINITY;
    for i in 0..41 {
        let lb = scan_lo + (scan_hi - scan_lo) * i as f64 / 40.0;
        let v = nll(&[a0.ln(), lb]);
        if v < scan_best {
            scan_best = v;
            b_scan = lb;
        }
    }

    let settings = estimation_optimizer_settings();
    let mut starts = vec![[a0.ln(), b_scan]];
    if (b_scan - b0.ln()).abs() > 1e-9 {
        starts.push([a0.ln(), b0.ln()]);
    }
    let mut best: Option<Minimum> = None;
    let mut last_err = None;
    for start in starts {
        match minimize(nll, Some(grad), &start, &settings) {
            Ok(m) if m.value.is_finite() => {
                if best.as_ref().is_none_or(|b| m.value < b.value) {
                    best = Some(m);
                }
            }
            Ok(_) => {}
            Err(e) => last_err = Some(e),
        }
    }
    let m = match best {
        Some(m) => m,
        None => {
            return Err(last_err
                .unwrap_or_else(|| Error::Fit(format!("non-finite likelihood at delta = {delta}"))))
        }
    };
    Ok(SubFit {
        alpha: m.point[0].exp(),
        beta: m.point[1].exp(),
        loglik: -m.value,
        converged: m.converged,
        iterations: m.iterations,
    })
}

/// Profile grid: which delta values to scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileGridSpec {
    pub deltas: Vec<f64>,
}

impl Default for ProfileGridSpec {
    fn default() -> Self {
        ProfileGridSpec::integer_range(-20, 20)
    }
}

impl ProfileGridSpec {
    pub fn integer_range(lo: i32, hi: i32) -> Self {
        ProfileGridSpec { deltas: (lo..=hi).map(f64::from).collect() }
    }

    /// 0.1-spaced sub-grid spanning one unit either side of `center`; used by
    /// the optional refinement pass after the integer scan.
    pub fn refinement_around(center: f64) -> Self {
        ProfileGridSpec {
            deltas: (-10..=10).map(|i| center + 0.1 * f64::from(i)).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.deltas.is_empty() {
            return Err(Error::Invalid("empty delta grid".into()));
        }
        if self.deltas.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Invalid("delta grid must be strictly ascending".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub params: BbsParams,
    pub se_alpha: Option<f64>,
    pub se_beta: Option<f64>,
    /// True when delta came from the profile grid rather than being supplied.
    pub delta_profiled: bool,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub converged: bool,
    pub iterations: usize,
    pub n: usize,
    pub n_events: usize,
    /// (delta, maximized log-likelihood) for every grid point that fit.
    pub profile_trace: Vec<(f64, f64)>,
    /// Grid deltas whose sub-fit failed and was skipped.
    pub skipped_deltas: Vec<f64>,
}

/// Number of free parameters charged to the BBS fit: delta is counted even
/// though it is grid-valued.
pub const BBS_PARAM_COUNT: usize = 3;

/// Two-step profile estimate: maximize over (alpha, beta) at each grid
/// delta, then keep the delta with the largest maximized log-likelihood
/// (ties broken toward smaller |delta|). Sub-fits run in parallel; results
/// merge in grid order so the outcome is independent of thread count.
pub fn fit_profile(data: &[Observation], grid: &ProfileGridSpec) -> Result<FitResult> {
    grid.validate()?;
    let n = data.len();
    let n_events = data.iter().filter(|o| o.event).count();
    if n < 4 || n_events < 2 {
        return Err(Error::Fit(format!(
            "need at least 4 observations with at least 2 events, got n = {n}, events = {n_events}"
        )));
    }

    let fits: Vec<(f64, Result<SubFit>)> = grid
        .deltas
        .par_iter()
        .map(|&d| (d, fit_at_delta(data, d)))
        .collect();

    let mut profile_trace = Vec::with_capacity(fits.len());
    let mut skipped_deltas = Vec::new();
    let mut best: Option<(f64, SubFit)> = None;
    for (d, r) in fits {
        match r {
            Ok(sub) => {
                profile_trace.push((d, sub.loglik));
                let better = match &best {
                    None => true,
                    Some((bd, bs)) => {
                        sub.loglik > bs.loglik
                            || (sub.loglik == bs.loglik && d.abs() < bd.abs())
                    }
                };
                if better {
                    best = Some((d, sub));
                }
            }
            Err(_) => skipped_deltas.push(d),
        }
    }
    let (delta, sub) = best.ok_or_else(|| Error::Fit("every profile sub-fit failed".into()))?;

    let params = BbsParams::new(sub.alpha, sub.beta, delta)?;
    let (se_alpha, se_beta) = match observed_information(data, &params) {
        Ok(info) => match invert_2x2(&info) {
            Some(cov) if cov[0][0] > 0.0 && cov[1][1] > 0.0 => {
                (Some(cov[0][0].sqrt()), Some(cov[1][1].sqrt()))
            }
            _ => (None, None),
        },
        Err(_) => (None, None),
    };

    let k = BBS_PARAM_COUNT as f64;
    Ok(FitResult {
        params,
        se_alpha,
        se_beta,
        delta_profiled: true,
        loglik: sub.loglik,
        aic: -2.0 * sub.loglik + 2.0 * k,
        bic: -2.0 * sub.loglik + k * (n as f64).ln(),
        converged: sub.converged,
        iterations: sub.iterations,
        n,
        n_events,
        profile_trace,
        skipped_deltas,
    })
}

// ---- likelihood ratio test ----

/// Chi-squared(1) critical value at the 5% level used by the BS-vs-BBS test.
pub const LR_CRITICAL_5PCT: f64 = 3.84;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LrTest {
    pub statistic: f64,
    pub reject_at_5pct: bool,
    pub loglik_bs: f64,
    pub loglik_bbs: f64,
}

/// LR = -2 (l_BS - l_BBS), the BS null (delta = 0) against the profiled BBS
/// alternative.
pub fn lr_test_bs_vs_bbs(data: &[Observation], grid: &ProfileGridSpec) -> Result<LrTest> {
    let bbs = fit_profile(data, grid)?;
    let bs = fit_at_delta(data, 0.0)?;
    let statistic = -2.0 * (bs.loglik - bbs.loglik);
    Ok(LrTest {
        statistic,
        reject_at_5pct: statistic > LR_CRITICAL_5PCT,
        loglik_bs: bs.loglik,
        loglik_bbs: bbs.loglik,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    fn all_events(times: &[f64]) -> Vec<Observation> {
        observations_from_times(times).unwrap()
    }

    #[test]
    fn single_point_at_beta() {
        let p = BbsParams::new(1.0, 1.0, 0.0).unwrap();
        let data = all_events(&[1.0]);
        let ll = loglik_complete(&data, &p).unwrap();
        // log phi(0)
        assert!((ll - (-0.918_938_533_2)).abs() < 1e-9);
    }

    #[test]
    fn censored_reduces_to_complete_when_all_events() {
        let p = BbsParams::new(0.7, 2.0, -1.0).unwrap();
        let data = all_events(&[0.5, 1.1, 2.7, 3.0]);
        let a = loglik_complete(&data, &p).unwrap();
        let b = loglik_censored(&data, &p).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn one_censored_obs_at_beta() {
        let p = BbsParams::new(1.3, 2.0, 0.0).unwrap();
        let data = vec![Observation::new(2.0, false).unwrap()];
        let ll = loglik_censored(&data, &p).unwrap();
        assert!((ll - 0.5_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn score_at_single_beta_observation() {
        // t = beta, delta = 0: a(beta) = 0 kills the W term, leaving -1/alpha
        let p = BbsParams::new(0.8, 1.5, 0.0).unwrap();
        let data = all_events(&[1.5]);
        let s = score_complete(&data, &p).unwrap();
        assert!((s[0] - (-1.0 / 0.8)).abs() < 1e-12);
    }

    #[test]
    fn score_matches_finite_differences() {
        let mut rng = RngStream::new(5);
        let gen = BbsParams::new(0.6, 1.2, -2.0).unwrap();
        let times = gen.sample(50, &mut rng);
        let data = all_events(&times);
        for &(alpha, beta, delta) in &[(0.5, 1.0, -2.0), (0.9, 1.6, 1.0), (0.3, 0.8, 0.0)] {
            let p = BbsParams::new(alpha, beta, delta).unwrap();
            let s = score_complete(&data, &p).unwrap();
            let h = 1e-6;
            let f = |al: f64, be: f64| {
                loglik_complete(&data, &BbsParams::new(al, be, delta).unwrap()).unwrap()
            };
            let fd_a = (f(alpha + h * alpha, beta) - f(alpha - h * alpha, beta))
                / (2.0 * h * alpha);
            let fd_b = (f(alpha, beta + h * beta) - f(alpha, beta - h * beta)) / (2.0 * h * beta);
            assert!((s[0] - fd_a).abs() <= 1e-5 * fd_a.abs().max(1.0), "alpha score");
            assert!((s[1] - fd_b).abs() <= 1e-5 * fd_b.abs().max(1.0), "beta score");
        }
    }

    #[test]
    fn observed_information_matches_finite_differences() {
        let mut rng = RngStream::new(6);
        let gen = BbsParams::new(0.5, 1.0, -1.0).unwrap();
        let mut data = all_events(&gen.sample(60, &mut rng));
        // censor a handful to exercise the numeric branch
        for o in data.iter_mut().take(8) {
            o.event = false;
        }
        let p = BbsParams::new(0.55, 1.1, -1.0).unwrap();
        let info = observed_information(&data, &p).unwrap();
        let f = |al: f64, be: f64| {
            loglik_censored(&data, &BbsParams::new(al, be, -1.0).unwrap()).unwrap()
        };
        let (alpha, beta) = (0.55, 1.1);
        let (ha, hb) = (1e-4 * alpha, 1e-4 * beta);
        let fd_aa = -(f(alpha + ha, beta) - 2.0 * f(alpha, beta) + f(alpha - ha, beta)) / (ha * ha);
        let fd_bb = -(f(alpha, beta + hb) - 2.0 * f(alpha, beta) + f(alpha, beta - hb)) / (hb * hb);
        let fd_ab = -(f(alpha + ha, beta + hb) - f(alpha + ha, beta - hb)
            - f(alpha - ha, beta + hb)
            + f(alpha - ha, beta - hb))
            / (4.0 * ha * hb);
        assert!((info[0][0] - fd_aa).abs() <= 1e-4 * fd_aa.abs().max(1.0));
        assert!((info[1][1] - fd_bb).abs() <= 1e-4 * fd_bb.abs().max(1.0));
        assert!((info[0][1] - fd_ab).abs() <= 1e-3 * fd_ab.abs().max(1.0));
    }

    #[test]
    fn profile_recovers_truth_on_simulated_data() {
        let mut rng = RngStream::new(11);
        let truth = BbsParams::new(0.5, 1.0, -1.0).unwrap();
        let data = all_events(&truth.sample(800, &mut rng));
        let fit = fit_profile(&data, &ProfileGridSpec::default()).unwrap();
        assert!(fit.converged);
        assert!((fit.params.alpha() - 0.5).abs() < 0.08, "alpha {}", fit.params.alpha());
        assert!((fit.params.beta() - 1.0).abs() < 0.08, "beta {}", fit.params.beta());
        assert!(fit.params.delta().abs() <= 3.0, "delta {}", fit.params.delta());
        // argmax of the trace is the returned delta
        let best = fit
            .profile_trace
            .iter()
            .cloned()
            .fold((f64::NAN, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        assert_eq!(best.0, fit.params.delta());
        // AIC/BIC arithmetic
        assert!((fit.aic - (-2.0 * fit.loglik + 6.0)).abs() < 1e-10);
        assert!((fit.bic - (-2.0 * fit.loglik + 3.0 * (data.len() as f64).ln())).abs() < 1e-10);
    }

    #[test]
    fn loglik_is_permutation_invariant() {
        let mut rng = RngStream::new(8);
        let gen = BbsParams::new(0.8, 2.0, 1.0).unwrap();
        let mut times = gen.sample(30, &mut rng);
        let p = BbsParams::new(0.7, 1.9, 1.0).unwrap();
        let a = loglik_complete(&all_events(&times), &p).unwrap();
        times.reverse();
        let b = loglik_complete(&all_events(&times), &p).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn requires_minimum_data() {
        let data = all_events(&[1.0, 2.0]);
        assert!(fit_profile(&data, &ProfileGridSpec::integer_range(-1, 1)).is_err());
    }
}
