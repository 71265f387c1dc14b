//! Self-contained quasi-Newton minimizer.
//!
//! BFGS with the inverse-Hessian update and an Armijo backtracking line
//! search. Dimensions here are tiny (2 to 5 parameters), so the dense
//! update is stored as a plain row-major matrix.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OptimizerSettings {
    pub max_iterations: usize,
    /// Convergence when the gradient sup-norm falls below this.
    pub gradient_tolerance: f64,
    /// Convergence when the accepted step falls below this (sup-norm).
    pub step_tolerance: f64,
    /// Relative step for central finite differences when no gradient is given.
    pub finite_difference_step: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            max_iterations: 300,
            gradient_tolerance: 1e-8,
            step_tolerance: 1e-11,
            finite_difference_step: 1e-6,
        }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Invalid("max_iterations must be >= 1".into()));
        }
        if !(self.gradient_tolerance > 0.0)
            || !(self.step_tolerance > 0.0)
            || !(self.finite_difference_step > 0.0)
        {
            return Err(Error::Invalid(
                "optimizer tolerances must be strictly positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn finite_difference_gradient<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x: &[f64],
    rel_step: f64,
) -> Vec<f64> {
    let n = x.len();
    let mut g = vec![0.0; n];
    let mut xp = x.to_vec();
    for i in 0..n {
        let h = rel_step * x[i].abs().max(1.0);
        xp[i] = x[i] + h;
        let fp = f(&xp);
        xp[i] = x[i] - h;
        let fm = f(&xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, &x| m.max(x.abs()))
}

/// Minimize `objective` starting from `start`.
///
/// `gradient`, when given, must return the same length as `start`; otherwise
/// central finite differences of the objective are used. Non-finite
/// objective values during the line search are treated as +inf and trigger
/// further backtracking, so the iterate never leaves the finite region it
/// started in.
pub fn minimize<F, G>(
    mut objective: F,
    mut gradient: Option<G>,
    start: &[f64],
    settings: &OptimizerSettings,
) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64]) -> Vec<f64>,
{
    settings.validate()?;
    let n = start.len();
    if n == 0 {
        return Err(Error::Invalid("empty start point".into()));
    }
    let mut x = start.to_vec();
    let mut fx = objective(&x);
    if !fx.is_finite() {
        return Err(Error::Optimization(format!(
            "objective is not finite at the start point ({fx})"
        )));
    }

    let fd = settings.finite_difference_step;
    let grad_at = |f: &mut F, g: &mut Option<G>, x: &[f64]| -> Vec<f64> {
        match g {
            Some(gr) => gr(x),
            None => finite_difference_gradient(f, x, fd),
        }
    };

    let mut g = grad_at(&mut objective, &mut gradient, &x);
    // inverse Hessian approximation, identity to start
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }

    let mut converged = sup_norm(&g) <= settings.gradient_tolerance;
    let mut iterations = 0;

    while !converged && iterations < settings.max_iterations {
        iterations += 1;
        // direction d = -H g
        let mut d = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                s += h[i * n + j] * g[j];
            }
            d[i] = -s;
        }
        let mut slope: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
        if !(slope < 0.0) {
            // not a descent direction (stale curvature); restart from steepest descent
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] = if i == j { 1.0 } else { 0.0 };
                }
            }
            for i in 0..n {
                d[i] = -g[i];
            }
            slope = -g.iter().map(|v| v * v).sum::<f64>();
            if slope == 0.0 {
                converged = true;
                break;
            }
        }

        // Armijo backtracking
        let mut step = 1.0;
        let mut x_new = vec![0.0; n];
        let mut f_new = f64::INFINITY;
        let mut accepted = false;
        for _ in 0..60 {
            for i in 0..n {
                x_new[i] = x[i] + step * d[i];
            }
            f_new = objective(&x_new);
            if f_new.is_finite() && f_new <= fx + 1e-4 * step * slope {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // no finite sufficient-decrease point along the ray
            if !f_new.is_finite() && step <= 1e-17 {
                return Err(Error::Optimization(
                    "line search found no finite objective value".into(),
                ));
            }
            // flat to machine precision: declare the step converged
            converged = true;
            break;
        }

        let g_new = grad_at(&mut objective, &mut gradient, &x_new);
        let s: Vec<f64> = (0..n).map(|i| x_new[i] - x[i]).collect();
        let y: Vec<f64> = (0..n).map(|i| g_new[i] - g[i]).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();

        let step_size = sup_norm(&s);
        x = x_new;
        fx = f_new;
        g = g_new;

        if sup_norm(&g) <= settings.gradient_tolerance || step_size < settings.step_tolerance {
            converged = true;
            break;
        }

        // BFGS inverse update, skipped when curvature is too small to trust
        let ss: f64 = s.iter().map(|v| v * v).sum();
        let yy: f64 = y.iter().map(|v| v * v).sum();
        if sy > 1e-12 * (ss * yy).sqrt() {
            if iterations == 1 {
                // scale the initial inverse Hessian (Nocedal & Wright 6.20)
                let scale = sy / yy;
                for i in 0..n {
                    for j in 0..n {
                        h[i * n + j] = if i == j { scale } else { 0.0 };
                    }
                }
            }
            // H <- (I - s y^T / sy) H (I - y s^T / sy) + s s^T / sy
            let mut hy = vec![0.0; n];
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += h[i * n + j] * y[j];
                }
                hy[i] = acc;
            }
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] += ((sy + yhy) * s[i] * s[j]) / (sy * sy)
                        - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
    }

    Ok(Minimum { point: x, value: fx, converged, iterations })
}

/// Variant of [`minimize`] for objectives without a supplied gradient.
pub fn minimize_fd<F: FnMut(&[f64]) -> f64>(
    objective: F,
    start: &[f64],
    settings: &OptimizerSettings,
) -> Result<Minimum> {
    minimize(objective, None::<fn(&[f64]) -> Vec<f64>>, start, settings)
}
