//! Bimodal Birnbaum-Saunders (BBS) lifetime distribution and its inference
//! toolkit.
//!
//! The crate covers, in rough dependency order:
//!
//! - [`numerics`]: normal functions, root finding, adaptive quadrature, a
//!   self-contained BFGS minimizer and seedable RNG streams;
//! - [`asn`] and [`dist`]: the alpha-skew-normal law and the BBS law built on
//!   top of it (densities, survival, hazard, quantiles, sampling);
//! - [`moments`], [`modes`], [`entropy`], [`shape`]: moments through
//!   omega-weighted quadrature, mode structure, Shannon entropy, and the
//!   hazard-shape diagnostic;
//! - [`estimation`]: complete and right-censored log-likelihoods, analytic
//!   score and observed information, and the two-step profile fit over the
//!   bimodality parameter;
//! - [`inference`]: delta-method confidence intervals for the survival
//!   function, the mean and the variance;
//! - [`competitors`]: classical BS, log-normal, BBSO and two-component BS
//!   mixture baselines with their own ML fitting;
//! - [`sim`]: the Monte Carlo study harness (bias/MSE under censoring,
//!   misspecification comparisons);
//! - [`io`] and [`cli`]: dataset ingestion, Kaplan-Meier, and the command
//!   implementations behind the `bbs` binary.

// `!(x > 0.0)`-style guards double as NaN checks throughout; the plain
// comparison would silently admit NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asn;
pub mod cli;
pub mod competitors;
pub mod dist;
pub mod entropy;
pub mod error;
pub mod estimation;
pub mod inference;
pub mod io;
pub mod moments;
pub mod modes;
pub mod numerics;
pub mod shape;
pub mod sim;

pub use asn::AsnParams;
pub use dist::BbsParams;
pub use error::{Error, Result};
