//! Palm distributions of log Gaussian Cox processes and the summary
//! functions built on them.
//!
//! * [`model`]: covariance families, intensities, joint intensities and
//!   reduced Palm models (a Palm LGCP is an LGCP with a shifted mean).
//! * [`numerics`]: dense Cholesky/QR factorizations and a finite-difference
//!   gradient checker.
//! * [`laplace`]: quadrature over `B(o, r)` and Laplace approximations of
//!   `F`, `G` and `J`.
//! * [`montecarlo`]: seeded field, LGCP and Palm simulation, the thinning
//!   coupling and Monte Carlo oracles for the exact expectations.
//! * [`estimate`]: non-parametric `F̂`, `Ĝ`, `Ĵ`, `K̂`, theoretical `K` and
//!   minimum-contrast fitting.

pub mod curve;
pub mod error;
pub mod estimate;
pub mod laplace;
pub mod model;
pub mod montecarlo;
pub mod numerics;
pub mod pattern;

pub use curve::{Method, SummaryCurve, SummaryKind};
pub use error::{Error, Result};
pub use model::{CovarianceFamily, CovarianceModel, LgcpModel, ModelConfig, PalmConditioning, PalmModel};
pub use pattern::{PointPattern, Window};
