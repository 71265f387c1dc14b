//! Shared numerical kernels: normal functions, root finding, quadrature,
//! quasi-Newton minimization and seedable RNG streams.
//!
//! Everything here is pure given its inputs; RNG streams are owned values.

pub mod normal;
pub mod optim;
pub mod quad;
pub mod rng;
pub mod root;

pub use normal::{std_normal_cdf, std_normal_pdf, std_normal_quantile};
pub use optim::{minimize, minimize_fd, Minimum, OptimizerSettings};
pub use quad::{integrate, integrate_positive_axis, integrate_seeded, QuadratureSettings};
pub use rng::RngStream;
pub use root::find_root;
