//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Find a root of `f` on `[lo, hi]` given `f(lo) * f(hi) <= 0`.
///
/// Brent's method: inverse quadratic interpolation / secant steps with a
/// bisection fallback, so convergence is guaranteed for any continuous `f`
/// with a sign change on the bracket. Stops when the bracket is narrower
/// than `tol` (plus a relative floor) or the residual is exactly zero.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Bracket(format!("invalid bracket [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::Bracket("function is NaN at a bracket endpoint".into()));
    }
    if fa * fb > 0.0 {
        return Err(Error::Bracket(format!(
            "no sign change on [{lo}, {hi}]: f(lo) = {fa}, f(hi) = {fb}"
        )));
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..200 {
        if fb.abs() > fc.abs() {
            // b must carry the smallest residual
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let eps = f64::EPSILON * b.abs() + 0.5 * tol;
        let m = 0.5 * (c - b);
        if m.abs() <= eps || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() < eps || fa.abs() <= fb.abs() {
            // bisection
            d = m;
            e = m;
        } else {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                // inverse quadratic interpolation
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * m * q - (eps * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        }
        a = b;
        fa = fb;
        b += if d.abs() > eps { d } else { eps.copysign(m) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::Bracket(format!("function is NaN at x = {b}")));
        }
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear() {
        let r = find_root(|x| x - 2.0, 0.0, 5.0, 1e-10).unwrap();
        assert!((r - 2.0).abs() < 1e-10);
    }

    #[test]
    fn sqrt_two() {
        let r = find_root(|x| x * x - 2.0, 1.0, 2.0, 1e-12).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-8);
    }

    #[test]
    fn normal_upper_quantile() {
        let r = find_root(|x| super::super::normal::big_phi(x) - 0.975, 0.0, 10.0, 1e-10).unwrap();
        assert!((r - 1.959_964).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_bracket() {
        assert!(matches!(
            find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-8),
            Err(Error::Bracket(_))
        ));
    }

    #[test]
    fn random_affine_functions_solve_to_tolerance() {
        // 100 deterministic pseudo-random affine functions; root residual
        // should be ~ 10 * tol * local slope.
        let mut state = 0x9e3779b97f4a7c15_u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let slope = 0.1 + 10.0 * next();
            let root = -5.0 + 10.0 * next();
            let tol = 1e-9;
            let r = find_root(|x| slope * (x - root), -20.0, 20.0, tol).unwrap();
            let residual = (slope * (r - root)).abs();
            assert!(residual <= 10.0 * tol * slope.max(1.0));
        }
    }
}
