//! Mode structure of the BBS density.
//!
//! Critical points are the roots of f'; the density has at most two maxima
//! (and exactly one when delta = 0). The search scans a log-spaced grid
//! between extreme quantiles for sign changes of f', polishes each bracket
//! by root finding and classifies with the sign of f''.

use crate::dist::BbsParams;
use crate::numerics::root;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalKind {
    Maximum,
    Minimum,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub location: f64,
    pub kind: CriticalKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeStructure {
    /// Ascending critical points with alternating classification.
    pub critical_points: Vec<CriticalPoint>,
    pub is_bimodal: bool,
}

impl ModeStructure {
    pub fn maxima(&self) -> Vec<f64> {
        self.critical_points
            .iter()
            .filter(|c| c.kind == CriticalKind::Maximum)
            .map(|c| c.location)
            .collect()
    }

    pub fn minima(&self) -> Vec<f64> {
        self.critical_points
            .iter()
            .filter(|c| c.kind == CriticalKind::Minimum)
            .map(|c| c.location)
            .collect()
    }
}

const GRID_POINTS: usize = 2048;

pub fn bbs_modes(p: &BbsParams) -> ModeStructure {
    let lo = p.quantile(1e-6).expect("valid params");
    let hi = p.quantile(1.0 - 1e-6).expect("valid params");
    let (log_lo, log_hi) = (lo.ln(), hi.ln());
    let step = (log_hi - log_lo) / (GRID_POINTS - 1) as f64;

    let fp = |t: f64| p.pdf_deriv1(t).expect("t inside support");
    let fpp = |t: f64| p.pdf_deriv2(t).expect("t inside support");

    // Evaluation points: the log grid plus every extremum of f' (roots of
    // f'' bracketed on the same grid). A minimum/maximum pair of the density
    // can sit inside a single grid cell, where f' dips through zero and back
    // without changing sign at the cell edges; inserting the f' extrema
    // splits such cells.
    let mut points: Vec<f64> = (0..GRID_POINTS).map(|i| (log_lo + step * i as f64).exp()).collect();
    let mut extrema: Vec<f64> = Vec::new();
    for w in points.windows(2) {
        let (v0, v1) = (fpp(w[0]), fpp(w[1]));
        if v0 != 0.0 && v1 != 0.0 && v0.signum() != v1.signum() {
            if let Ok(r) = root::find_root(fpp, w[0], w[1], 1e-12 * w[1].max(1.0)) {
                extrema.push(r);
            }
        }
    }
    points.extend(extrema);
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup();

    let mut roots: Vec<f64> = Vec::new();
    let mut prev_t = points[0];
    let mut prev_v = fp(prev_t);
    for &t in &points[1..] {
        let v = fp(t);
        if prev_v == 0.0 {
            roots.push(prev_t);
        } else if v != 0.0 && prev_v.signum() != v.signum() {
            if let Ok(r) = root::find_root(fp, prev_t, t, 1e-12 * t.max(1.0)) {
                roots.push(r);
            }
        }
        prev_t = t;
        prev_v = v;
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1e-12));

    let mut critical_points: Vec<CriticalPoint> = roots
        .into_iter()
        .map(|t| {
            let mut f2 = p.pdf_deriv2(t).expect("t inside support");
            if f2 == 0.0 {
                // degenerate second derivative; classify from f' nearby
                let h = 1e-6 * t;
                f2 = (p.pdf_deriv1(t + h).unwrap() - p.pdf_deriv1(t - h).unwrap()) / (2.0 * h);
            }
            CriticalPoint {
                location: t,
                kind: if f2 < 0.0 { CriticalKind::Maximum } else { CriticalKind::Minimum },
            }
        })
        .collect();

    // Drop grazing roots that break alternation (f' touching zero without a
    // genuine extremum swap).
    let mut cleaned: Vec<CriticalPoint> = Vec::with_capacity(critical_points.len());
    for c in critical_points.drain(..) {
        if let Some(last) = cleaned.last() {
            if last.kind == c.kind {
                continue;
            }
        }
        cleaned.push(c);
    }

    let n_max = cleaned.iter().filter(|c| c.kind == CriticalKind::Maximum).count();
    ModeStructure { critical_points: cleaned, is_bimodal: n_max >= 2 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_bimodal_example() {
        // alpha = beta = 1, delta = -1: maxima at ~0.1761 and 1.0, minimum at ~0.4184
        let p = BbsParams::new(1.0, 1.0, -1.0).unwrap();
        let m = bbs_modes(&p);
        assert!(m.is_bimodal);
        let maxima = m.maxima();
        let minima = m.minima();
        assert_eq!(maxima.len(), 2);
        assert_eq!(minima.len(), 1);
        assert!((maxima[0] - 0.1761).abs() < 1e-3, "first mode {}", maxima[0]);
        assert!((maxima[1] - 1.0).abs() < 1e-3, "second mode {}", maxima[1]);
        assert!((minima[0] - 0.4184).abs() < 1e-3, "antimode {}", minima[0]);
    }

    #[test]
    fn delta_equal_minus_alpha_puts_a_mode_at_beta() {
        // The critical point at t = beta is a maximum for alpha < 2
        // (f''(beta) is proportional to 1/2 - 2/alpha^2, so it degenerates
        // into a saddle at alpha = 2 and flips sign beyond).
        for &(alpha, beta) in &[(0.5, 1.0), (1.0, 1.0), (1.3, 4.0), (1.9, 0.3)] {
            let p = BbsParams::new(alpha, beta, -alpha).unwrap();
            let m = bbs_modes(&p);
            let hit = m.maxima().iter().any(|&t| (t - beta).abs() < 1e-8 * beta.max(1.0));
            assert!(hit, "alpha {alpha} beta {beta}: maxima {:?}", m.maxima());
        }
    }

    #[test]
    fn delta_zero_is_unimodal() {
        for &alpha in &[0.2, 0.8, 1.5, 3.0] {
            let p = BbsParams::new(alpha, 1.0, 0.0).unwrap();
            let m = bbs_modes(&p);
            assert_eq!(m.maxima().len(), 1, "alpha {alpha}");
            assert!(!m.is_bimodal);
        }
    }

    #[test]
    fn classifications_alternate() {
        for &delta in &[-10.0, -2.0, -0.5, 0.7, 4.0, 11.0] {
            let p = BbsParams::new(0.9, 1.0, delta).unwrap();
            let m = bbs_modes(&p);
            assert!(!m.critical_points.is_empty());
            for w in m.critical_points.windows(2) {
                assert_ne!(w[0].kind, w[1].kind, "delta {delta}");
                assert!(w[0].location < w[1].location);
            }
            let n_max = m.maxima().len();
            assert!((1..=2).contains(&n_max), "delta {delta}: {n_max} maxima");
        }
    }
}
