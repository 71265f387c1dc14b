//! Shannon entropy of the BBS law.
//!
//! H(T) = C(alpha, beta, delta) + E[ log{ T^{3/2} / [(T + beta)
//! ((1 - delta a(T))^2 + 1)] } ], with
//! C = log(2 + delta^2) + log(2 alpha sqrt(beta)) + log(sqrt(2 pi))
//!     + (1 + 2 delta^2 / (2 + delta^2)) / 2,
//! the last term being E[a^2(T)]/2 since a(T) ~ ASN(delta).

use crate::dist::BbsParams;
use crate::error::Result;
use crate::numerics::normal::SQRT_2PI;
use crate::numerics::quad::{integrate_seeded, QuadratureSettings};

/// Expectation of `h(t)` against the BBS density, integrated between extreme
/// quantiles with interior quantiles as subdivision seeds (the density can be
/// arbitrarily narrow, so blind panel placement would miss it).
pub(crate) fn expect_under_pdf<F: FnMut(f64) -> f64>(
    p: &BbsParams,
    mut h: F,
    qs: &QuadratureSettings,
) -> Result<f64> {
    let lo = p.quantile(1e-12)?;
    let hi = p.quantile(1.0 - 1e-12)?;
    let seeds: Vec<f64> = [0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99]
        .iter()
        .map(|&q| p.quantile(q))
        .collect::<Result<_>>()?;
    integrate_seeded(
        |t| {
            let f = p.pdf_raw(t);
            if f > 0.0 {
                h(t) * f
            } else {
                0.0
            }
        },
        lo,
        hi,
        &seeds,
        qs,
    )
}

pub fn bbs_entropy(p: &BbsParams) -> Result<f64> {
    bbs_entropy_with(p, &QuadratureSettings { abs_tol: 1e-9, rel_tol: 1e-9, ..Default::default() })
}

pub fn bbs_entropy_with(p: &BbsParams, qs: &QuadratureSettings) -> Result<f64> {
    let (alpha, beta, delta) = (p.alpha(), p.beta(), p.delta());
    let d2 = delta * delta;
    let constant = (2.0 + d2).ln()
        + (2.0 * alpha * beta.sqrt()).ln()
        + SQRT_2PI.ln()
        + 0.5 * (1.0 + 2.0 * d2 / (2.0 + d2));
    let expectation = expect_under_pdf(
        p,
        |t| {
            let a = p.a_raw(t);
            let u = 1.0 - delta * a;
            1.5 * t.ln() - (t + beta).ln() - (u * u + 1.0).ln()
        },
        qs,
    )?;
    Ok(constant + expectation)
}
