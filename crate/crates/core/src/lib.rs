//! Spectral estimation of probability mass functions on large discrete
//! supports.
//!
//! The empirical histogram is treated as a signal on a path graph and
//! low-pass filtered with a data-dependent basis: the eigenvectors of the
//! smallest eigenvalues of `L - diag(p)`, where `L` is the path Laplacian and
//! `p` the histogram. The operator is tridiagonal, so `k` basis vectors cost
//! `O(kN)` time and memory.
//!
//! ```
//! use eigenhist::estimator::estimate_auto;
//!
//! let samples = [3, 3, 4, 9, 10, 10, 10, 11, 25];
//! let est = estimate_auto(&samples, None).unwrap();
//! assert!((est.q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
//! ```

pub mod error;
pub mod estimator;
pub mod harness;
pub mod kde;
pub mod rng;
pub mod select;
pub mod synthetic;
pub mod tridiag;

pub use error::{Error, Result};
pub use estimator::{
    build_operator, estimate_auto, estimate_auto_pmf, estimate_fixed_k, estimate_fixed_k_pmf,
    project_and_normalize, Diagnostics, EmpiricalPmf, PmfEstimate,
};
pub use kde::{kde_estimate, KdeEstimate};
pub use select::{max_basis_size, select_k, RiskCurve};
pub use synthetic::{Catalog, DistributionSpec, SampleBatch, Shape};
pub use tridiag::{EigenBasis, TridiagMatrix};
