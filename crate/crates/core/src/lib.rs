//! Goodness-of-fit testing and lag selection for sparse Toeplitz covariance
//! matrices of high-dimensional Gaussian vectors.
//!
//! Observations `X_1, …, X_n` are `p`-dimensional centred Gaussian vectors
//! whose covariance is Toeplitz, `Cov(X^i, X^j) = σ_{|i−j|}`. The crate tests
//! `H0: Σ = I_p` against alternatives with `s` significant lags among the
//! first `S` diagonals and selects the significant lags.
//!
//! Layout:
//!
//! - [`model`]: Toeplitz specifications, sparse alternatives, the functional
//!   matrices `A_W`.
//! - [`estimator`]: empirical lag functionals `ξ_j` and the sum / scan
//!   statistics built on them.
//! - [`concentration`]: sub-exponential parameters, Bernstein thresholds,
//!   norm bounds, closed-form test and selector thresholds.
//! - [`sampler`]: reproducible Gaussian and moving-average sample generation.
//! - [`procedures`]: the four tests, aggregation over sparsity levels,
//!   empirical calibration, the lag selector.
//! - [`harness`]: Monte Carlo experiments producing CSV tables, and the CLI.
//!
//! The `examples/` directory has one runnable program per capability.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod concentration;
pub mod error;
pub mod estimator;
pub mod harness;
mod linalg;
pub mod model;
pub mod procedures;
pub mod sampler;

pub use concentration::{NormBounds, SubExpParams, ThresholdKind, ThresholdSpec};
pub use error::{Error, Result};
pub use estimator::{DiagonalStats, SampleSet};
pub use model::{FunctionalMatrix, Placement, SparseAlternative, ToeplitzSpec};
pub use procedures::{SelectorResult, TestKind, TestOutcome, TestStatistic, ThresholdSource};
pub use sampler::{GaussianSampler, MaSpec, RngStream};
