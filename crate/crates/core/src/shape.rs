//! Numeric hazard-shape diagnostic.
//!
//! s(t) = -f'(t)/f(t) has the closed form a'(t) m(t) / [(1 - delta a(t))^2 + 1]
//! with
//! m(t) = delta^2 a^3 - 2 delta a^2 - 2 (delta^2 - 1) a + 2 delta
//!        - [(1 - delta a)^2 + 1] a'' / a'^2.
//! Sampling s, m, the hazard and the sign of its derivative over a grid makes
//! increasing / decreasing / bathtub / upside-down-bathtub segments visible
//! without any of the analytic set conditions.

use crate::dist::BbsParams;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HazardPoint {
    pub t: f64,
    /// s(t) = -f'/f.
    pub s: f64,
    /// The polynomial factor m(t); s and m share their sign pattern.
    pub m: f64,
    /// Hazard rate, NaN where the survival function has underflowed.
    pub hazard: f64,
    /// Sign of h'(t) by central differences: -1, 0 or +1.
    pub hazard_deriv_sign: i8,
}

pub(crate) fn m_of_t(p: &BbsParams, t: f64) -> f64 {
    let d = p.delta();
    let a = p.a_raw(t);
    let a1 = p.a1_raw(t);
    let a2 = p.a2_raw(t);
    let u = 1.0 - d * a;
    d * d * a * a * a - 2.0 * d * a * a - 2.0 * (d * d - 1.0) * a + 2.0 * d
        - (u * u + 1.0) * a2 / (a1 * a1)
}

pub(crate) fn s_of_t(p: &BbsParams, t: f64) -> f64 {
    let d = p.delta();
    let a = p.a_raw(t);
    let u = 1.0 - d * a;
    p.a1_raw(t) * m_of_t(p, t) / (u * u + 1.0)
}

/// Evaluate the diagnostic on a strictly positive, ascending grid.
pub fn hazard_diagnostic(p: &BbsParams, grid: &[f64]) -> Result<Vec<HazardPoint>> {
    if grid.is_empty() {
        return Err(Error::Domain("hazard_diagnostic: empty grid".into()));
    }
    for w in grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::Domain(format!(
                "hazard_diagnostic: grid not strictly ascending at {} -> {}",
                w[0], w[1]
            )));
        }
    }
    if !(grid[0] > 0.0) {
        return Err(Error::Domain(format!(
            "hazard_diagnostic: grid must be strictly positive, starts at {}",
            grid[0]
        )));
    }

    let hr = |t: f64| -> f64 { p.hazard(t).unwrap_or(f64::NAN) };
    Ok(grid
        .iter()
        .map(|&t| {
            let h = hr(t);
            let step = 1e-6 * t;
            let (hp, hm) = (hr(t + step), hr(t - step));
            let sign = if hp.is_nan() || hm.is_nan() {
                0
            } else {
                let slope = (hp - hm) / (2.0 * step);
                if slope.abs() <= 1e-10 * h.abs().max(1.0) {
                    0
                } else if slope > 0.0 {
                    1
                } else {
                    -1
                }
            };
            HazardPoint { t, s: s_of_t(p, t), m: m_of_t(p, t), hazard: h, hazard_deriv_sign: sign }
        })
        .collect())
}
