//! Comparison models: classical Birnbaum-Saunders, log-normal, the BBSO
//! bimodal BS extension, and a two-component BS mixture.
//!
//! Each model exposes density/CDF/survival, a log-likelihood that accepts
//! right-censored records, a sampler, and ML fitting with standard errors
//! from the inverse observed information.

use crate::error::{Error, Result};
use crate::estimation::{starting_values, Observation};
use crate::numerics::normal::{big_phi, SQRT_2PI};
use crate::numerics::optim::{minimize_fd, OptimizerSettings};
use crate::numerics::rng::RngStream;
use crate::numerics::root;
use serde::{Deserialize, Serialize};

// ---- parameter records ----

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsParams {
    pub alpha: f64,
    pub beta: f64,
}

impl BsParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) || !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Invalid(format!("BS requires alpha, beta > 0: {alpha}, {beta}")));
        }
        Ok(BsParams { alpha, beta })
    }

    fn a(&self, t: f64) -> f64 {
        ((t / self.beta).sqrt() - (self.beta / t).sqrt()) / self.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LnParams {
    pub mu: f64,
    pub sigma: f64,
}

impl LnParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Invalid(format!("LN requires finite mu, sigma > 0: {mu}, {sigma}")));
        }
        Ok(LnParams { mu, sigma })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BbsoParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl BbsoParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite())
            || !(beta > 0.0 && beta.is_finite())
            || !gamma.is_finite()
        {
            return Err(Error::Invalid(format!(
                "BBSO requires alpha, beta > 0 and finite gamma: {alpha}, {beta}, {gamma}"
            )));
        }
        Ok(BbsoParams { alpha, beta, gamma })
    }

    fn a(&self, t: f64) -> f64 {
        ((t / self.beta).sqrt() - (self.beta / t).sqrt()) / self.alpha
    }

    /// Mass of phi(|x| + gamma) below y, out of a total of 2 Phi(-gamma).
    fn half_folded_mass(&self, y: f64) -> f64 {
        let g = self.gamma;
        if y <= 0.0 {
            big_phi(y - g)
        } else {
            big_phi(-g) - big_phi(g) + big_phi(y + g)
        }
    }
}

/// Two-component BS mixture. The boundary weights p = 0 and p = 1 are
/// accepted for evaluation and sampling (degenerate mixtures); fitting keeps
/// p strictly inside (0, 1) through a logit transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MxbsParams {
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha2: f64,
    pub beta2: f64,
    pub p: f64,
}

impl MxbsParams {
    pub fn new(alpha1: f64, beta1: f64, alpha2: f64, beta2: f64, p: f64) -> Result<Self> {
        for (name, v) in [("alpha1", alpha1), ("beta1", beta1), ("alpha2", alpha2), ("beta2", beta2)]
        {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Invalid(format!("MXBS requires {name} > 0, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Invalid(format!("MXBS weight p must lie in [0, 1], got {p}")));
        }
        Ok(MxbsParams { alpha1, beta1, alpha2, beta2, p })
    }
}

// ---- the model enum ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Bs,
    Ln,
    Bbso,
    Mxbs,
}

impl ModelKind {
    pub fn parameter_count(&self) -> usize {
        match self {
            ModelKind::Bs | ModelKind::Ln => 2,
            ModelKind::Bbso => 3,
            ModelKind::Mxbs => 5,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Bs => "bs",
            ModelKind::Ln => "ln",
            ModelKind::Bbso => "bbso",
            ModelKind::Mxbs => "mxbs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum Model {
    Bs(BsParams),
    Ln(LnParams),
    Bbso(BbsoParams),
    Mxbs(MxbsParams),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Bs(_) => ModelKind::Bs,
            Model::Ln(_) => ModelKind::Ln,
            Model::Bbso(_) => ModelKind::Bbso,
            Model::Mxbs(_) => ModelKind::Mxbs,
        }
    }

    fn check_t(t: f64) -> Result<()> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("t must be in (0, inf), got {t}")));
        }
        Ok(())
    }

    pub fn pdf(&self, t: f64) -> Result<f64> {
        Self::check_t(t)?;
        Ok(self.log_pdf_raw(t).exp())
    }

    pub(crate) fn log_pdf_raw(&self, t: f64) -> f64 {
        match self {
            Model::Bs(p) => {
                let a = p.a(t);
                -0.5 * a * a - SQRT_2PI.ln() - 1.5 * t.ln() + (t + p.beta).ln()
                    - (2.0 * p.alpha * p.beta.sqrt()).ln()
            }
            Model::Ln(p) => {
                let z = (t.ln() - p.mu) / p.sigma;
                -0.5 * z * z - SQRT_2PI.ln() - t.ln() - p.sigma.ln()
            }
            Model::Bbso(p) => {
                let x = p.a(t).abs() + p.gamma;
                -0.5 * x * x - SQRT_2PI.ln() - 1.5 * t.ln() + (t + p.beta).ln()
                    - (4.0 * p.alpha * p.beta.sqrt() * big_phi(-p.gamma)).ln()
            }
            Model::Mxbs(p) => {
                let f1 = Model::Bs(BsParams { alpha: p.alpha1, beta: p.beta1 }).log_pdf_raw(t);
                let f2 = Model::Bs(BsParams { alpha: p.alpha2, beta: p.beta2 }).log_pdf_raw(t);
                // log(p e^f1 + (1-p) e^f2), stabilized around the larger term
                let (hi, lo, w_hi, w_lo) =
                    if f1 >= f2 { (f1, f2, p.p, 1.0 - p.p) } else { (f2, f1, 1.0 - p.p, p.p) };
                if w_hi == 0.0 {
                    lo + w_lo.ln()
                } else {
                    hi + (w_hi + w_lo * (lo - hi).exp()).ln()
                }
            }
        }
    }

    pub fn cdf(&self, t: f64) -> Result<f64> {
        Self::check_t(t)?;
        Ok(self.cdf_raw(t))
    }

    pub(crate) fn cdf_raw(&self, t: f64) -> f64 {
        match self {
            Model::Bs(p) => big_phi(p.a(t)),
            Model::Ln(p) => big_phi((t.ln() - p.mu) / p.sigma),
            Model::Bbso(p) => p.half_folded_mass(p.a(t)) / (2.0 * big_phi(-p.gamma)),
            Model::Mxbs(p) => {
                let f1 = big_phi(BsParams { alpha: p.alpha1, beta: p.beta1 }.a(t));
                let f2 = big_phi(BsParams { alpha: p.alpha2, beta: p.beta2 }.a(t));
                p.p * f1 + (1.0 - p.p) * f2
            }
        }
    }

    pub fn sf(&self, t: f64) -> Result<f64> {
        Ok((1.0 - self.cdf(t)?).clamp(0.0, 1.0))
    }

    pub(crate) fn sf_raw(&self, t: f64) -> f64 {
        (1.0 - self.cdf_raw(t)).clamp(0.0, 1.0)
    }

    /// Log-likelihood: events contribute log f, right-censored records log S.
    pub fn loglik(&self, data: &[Observation]) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::Invalid("empty data".into()));
        }
        let ll = loglik_raw(self, data);
        if !ll.is_finite() {
            return Err(Error::Overflow(format!(
                "log-likelihood is not finite for {:?}",
                self.kind()
            )));
        }
        Ok(ll)
    }

    pub fn sample(&self, n: usize, rng: &mut RngStream) -> Vec<f64> {
        match self {
            Model::Bs(p) => (0..n)
                .map(|_| {
                    let z = rng.next_standard_normal();
                    let az = p.alpha * z;
                    let s = az + (az * az + 4.0).sqrt();
                    p.beta * 0.25 * s * s
                })
                .collect(),
            Model::Ln(p) => {
                (0..n).map(|_| (p.mu + p.sigma * rng.next_standard_normal()).exp()).collect()
            }
            Model::Bbso(p) => (0..n)
                .map(|_| {
                    let u = rng.next_uniform();
                    let target = 2.0 * big_phi(-p.gamma) * u;
                    let y = root::find_root(
                        |y| p.half_folded_mass(y) - target,
                        -45.0,
                        45.0,
                        1e-13,
                    )
                    .expect("folded-normal mass is continuous and monotone");
                    let ay = p.alpha * y;
                    let s = ay + (ay * ay + 4.0).sqrt();
                    p.beta * 0.25 * s * s
                })
                .collect(),
            Model::Mxbs(p) => {
                let c1 = Model::Bs(BsParams { alpha: p.alpha1, beta: p.beta1 });
                let c2 = Model::Bs(BsParams { alpha: p.alpha2, beta: p.beta2 });
                (0..n)
                    .map(|_| {
                        let pick1 = rng.next_uniform() < p.p;
                        let m = if pick1 { &c1 } else { &c2 };
                        m.sample(1, rng)[0]
                    })
                    .collect()
            }
        }
    }
}

pub(crate) fn loglik_raw(model: &Model, data: &[Observation]) -> f64 {
    data.iter()
        .map(|o| {
            if o.event {
                model.log_pdf_raw(o.time)
            } else {
                model.sf_raw(o.time).ln()
            }
        })
        .sum()
}

// ---- fitting ----

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFit {
    pub model: Model,
    /// (name, estimate, standard error) in display order; the SE is None
    /// where the observed information was not invertible.
    pub estimates: Vec<(String, f64, Option<f64>)>,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub converged: bool,
    pub iterations: usize,
    pub k: usize,
}

fn fit_optimizer_settings() -> OptimizerSettings {
    OptimizerSettings {
        max_iterations: 500,
        gradient_tolerance: 1e-7,
        step_tolerance: 1e-12,
        finite_difference_step: 1e-6,
    }
}

/// Fit `kind` to possibly censored data by ML.
pub fn model_fit(data: &[Observation], kind: ModelKind) -> Result<ModelFit> {
    model_fit_with(data, kind, None)
}

/// Variant with the mixture weight held fixed (the fixed-p mode for MXBS).
pub fn model_fit_with(
    data: &[Observation],
    kind: ModelKind,
    fixed_p: Option<f64>,
) -> Result<ModelFit> {
    let k = kind.parameter_count();
    if data.len() < k.max(4) + 1 {
        return Err(Error::Fit(format!(
            "need at least {} observations to fit {}, got {}",
            k.max(4) + 1,
            kind.name(),
            data.len()
        )));
    }
    if fixed_p.is_some() && kind != ModelKind::Mxbs {
        return Err(Error::Invalid("fixed_p only applies to the MXBS model".into()));
    }
    let times: Vec<f64> = data.iter().map(|o| o.time).collect();
    let (cv, median) = starting_values(&times);

    // encode/decode between the optimizer space and the model
    type Decoder = Box<dyn Fn(&[f64]) -> Option<Model> + Sync>;
    let decode: Decoder = match kind {
        ModelKind::Bs => Box::new(|x: &[f64]| {
            BsParams::new(x[0].exp(), x[1].exp()).ok().map(Model::Bs)
        }),
        ModelKind::Ln => Box::new(|x: &[f64]| {
            LnParams::new(x[0], x[1].exp()).ok().map(Model::Ln)
        }),
        ModelKind::Bbso => Box::new(|x: &[f64]| {
            BbsoParams::new(x[0].exp(), x[1].exp(), x[2]).ok().map(Model::Bbso)
        }),
        ModelKind::Mxbs => {
            let fp = fixed_p;
            // beta2 = beta1 + exp(gap) keeps the component labels ordered
            Box::new(move |x: &[f64]| {
                let b1 = x[1].exp();
                let b2 = b1 + x[3].exp();
                let p = match fp {
                    Some(v) => v,
                    None => 1.0 / (1.0 + (-x[4]).exp()),
                };
                MxbsParams::new(x[0].exp(), b1, x[2].exp(), b2, p).ok().map(Model::Mxbs)
            })
        }
    };

    let start: Vec<f64> = match kind {
        ModelKind::Bs => vec![cv.ln(), median.ln()],
        ModelKind::Ln => {
            // complete-data closed form as the start
            let n = times.len() as f64;
            let mu = times.iter().map(|t| t.ln()).sum::<f64>() / n;
            let s2 = times.iter().map(|t| (t.ln() - mu).powi(2)).sum::<f64>() / n;
            vec![mu, s2.sqrt().max(1e-6).ln()]
        }
        ModelKind::Bbso => vec![cv.ln(), median.ln(), -1.0],
        ModelKind::Mxbs => {
            // split at the sample median for cluster starts
            let mut sorted = times.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let half = sorted.len() / 2;
            let (lo, hi) = sorted.split_at(half.max(2));
            let (cv1, med1) = starting_values(lo);
            let (cv2, med2) = starting_values(hi);
            let gap = (med2 - med1).max(1e-3 * med2.max(1.0));
            let mut s = vec![cv1.ln(), med1.ln(), cv2.ln(), gap.ln()];
            if fixed_p.is_none() {
                s.push(0.0); // logit(1/2)
            }
            s
        }
    };

    let nll = |x: &[f64]| -> f64 {
        match decode(x) {
            Some(m) => {
                let ll = loglik_raw(&m, data);
                if ll.is_finite() {
                    -ll
                } else {
                    f64::INFINITY
                }
            }
            None => f64::INFINITY,
        }
    };

    let minimum = minimize_fd(nll, &start, &fit_optimizer_settings())?;
    let model = decode(&minimum.point)
        .ok_or_else(|| Error::Fit(format!("{} optimum decoded to invalid parameters", kind.name())))?;
    let loglik = -minimum.value;
    if !loglik.is_finite() {
        return Err(Error::Fit(format!("{} fit produced a non-finite likelihood", kind.name())));
    }

    let k_free = if fixed_p.is_some() { k - 1 } else { k };
    let names_values = parameter_list(&model);
    let ses = standard_errors(&model, data).unwrap_or_else(|| vec![None; names_values.len()]);
    let estimates = names_values
        .into_iter()
        .zip(ses)
        .map(|((name, value), se)| (name, value, se))
        .collect();

    let n = data.len() as f64;
    Ok(ModelFit {
        model,
        estimates,
        loglik,
        aic: -2.0 * loglik + 2.0 * k_free as f64,
        bic: -2.0 * loglik + k_free as f64 * n.ln(),
        converged: minimum.converged,
        iterations: minimum.iterations,
        k: k_free,
    })
}

fn parameter_list(model: &Model) -> Vec<(String, f64)> {
    match model {
        Model::Bs(p) => vec![("alpha".into(), p.alpha), ("beta".into(), p.beta)],
        Model::Ln(p) => vec![("mu".into(), p.mu), ("sigma".into(), p.sigma)],
        Model::Bbso(p) => {
            vec![("alpha".into(), p.alpha), ("beta".into(), p.beta), ("gamma".into(), p.gamma)]
        }
        Model::Mxbs(p) => vec![
            ("alpha1".into(), p.alpha1),
            ("alpha2".into(), p.alpha2),
            ("beta1".into(), p.beta1),
            ("beta2".into(), p.beta2),
            ("p".into(), p.p),
        ],
    }
}

/// SEs from the inverse finite-difference observed information on the
/// natural parameter scale; None when singular or with non-positive
/// diagonal.
fn standard_errors(model: &Model, data: &[Observation]) -> Option<Vec<Option<f64>>> {
    let theta: Vec<f64> = parameter_list(model).iter().map(|(_, v)| *v).collect();
    let k = theta.len();
    let rebuild = |v: &[f64]| -> Option<Model> {
        match model {
            Model::Bs(_) => BsParams::new(v[0], v[1]).ok().map(Model::Bs),
            Model::Ln(_) => LnParams::new(v[0], v[1]).ok().map(Model::Ln),
            Model::Bbso(_) => BbsoParams::new(v[0], v[1], v[2]).ok().map(Model::Bbso),
            Model::Mxbs(_) => MxbsParams::new(v[0], v[2], v[1], v[3], v[4]).ok().map(Model::Mxbs),
        }
    };
    let ll = |v: &[f64]| -> f64 {
        match rebuild(v) {
            Some(m) => loglik_raw(&m, data),
            None => f64::NAN,
        }
    };
    // negative FD Hessian
    let mut h = vec![vec![0.0_f64; k]; k];
    let base = ll(&theta);
    if !base.is_finite() {
        return None;
    }
    let steps: Vec<f64> = theta.iter().map(|v| 1e-4 * v.abs().max(1e-4)).collect();
    for i in 0..k {
        for j in i..k {
            let mut tp = theta.clone();
            let v = if i == j {
                tp[i] = theta[i] + steps[i];
                let fp = ll(&tp);
                tp[i] = theta[i] - steps[i];
                let fm = ll(&tp);
                -(fp - 2.0 * base + fm) / (steps[i] * steps[i])
            } else {
                tp[i] = theta[i] + steps[i];
                tp[j] = theta[j] + steps[j];
                let fpp = ll(&tp);
                tp[j] = theta[j] - steps[j];
                let fpm = ll(&tp);
                tp[i] = theta[i] - steps[i];
                let fmm = ll(&tp);
                tp[j] = theta[j] + steps[j];
                let fmp = ll(&tp);
                -(fpp - fpm - fmp + fmm) / (4.0 * steps[i] * steps[j])
            };
            if !v.is_finite() {
                return None;
            }
            h[i][j] = v;
            h[j][i] = v;
        }
    }
    let inv = invert_symmetric(&h)?;
    Some(
        (0..k)
            .map(|i| {
                let v = inv[i][i];
                if v > 0.0 {
                    Some(v.sqrt())
                } else {
                    None
                }
            })
            .collect(),
    )
}

/// Gauss-Jordan inverse with partial pivoting for the small (<= 5x5)
/// information matrices.
pub(crate) fn invert_symmetric(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let pivot_row = (col..n).max_by(|&r1, &r2| {
            a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap()
        })?;
        if a[pivot_row][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = a[col][col];
        for j in 0..n {
            a[col][j] /= pivot;
            inv[col][j] /= pivot;
        }
        for row in 0..n {
            if row != col {
                let factor = a[row][col];
                for j in 0..n {
                    a[row][j] -= factor * a[col][j];
                    inv[row][j] -= factor * inv[col][j];
                }
            }
        }
    }
    Some(inv)
}

/// Convenience wrapper: MXBS with the paper-table layout where `p` may have
/// been held fixed.
pub fn fit_mxbs_fixed_p(data: &[Observation], p: f64) -> Result<ModelFit> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::Invalid(format!("fixed p must lie in (0, 1), got {p}")));
    }
    model_fit_with(data, ModelKind::Mxbs, Some(p))
}
