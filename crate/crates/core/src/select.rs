//! Data-driven choice of the truncation level `k`.
//!
//! The cap on the basis size follows the logspline knot heuristic
//! `K = ceil(min(4 n^{1/5}, n/4, N_distinct, 30))`. Within `1..=K` the level
//! is picked by minimizing an orthogonal-series estimate of the expected
//! squared L2 error:
//!
//! ```text
//! c     = V^T p
//! s2    = (V ⊙ V)^T p
//! cbar2 = [n c² - s2]_+ / (n - 1)          (zero when n = 1)
//! E(m)  = (1/n) Σ_{j<=m} (s2_j - cbar2_j) + Σ_{j>m} cbar2_j
//! ```
//!
//! The first sum is the variance of the kept coefficients and the second the
//! squared bias of the dropped ones.

use serde::{Deserialize, Serialize};

use crate::estimator::EmpiricalPmf;
use crate::tridiag::EigenBasis;

/// Hard ceiling on the number of basis vectors considered.
pub const MAX_BASIS_CAP: usize = 30;

/// Upper bound `K` on the number of eigenvectors for `n` observations taking
/// `n_distinct` different values. Never below 1.
pub fn max_basis_size(n: u64, n_distinct: usize) -> usize {
    let n = n as f64;
    let bound = (4.0 * n.powf(0.2))
        .min(n / 4.0)
        .min(n_distinct as f64)
        .min(MAX_BASIS_CAP as f64);
    (bound.ceil() as usize).max(1)
}

/// Risk estimate for every truncation level `m = 1..=K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskCurve {
    /// Number of basis vectors `K` the curve covers.
    pub max_basis: usize,
    pub coefficients: Vec<f64>,
    pub second_moments: Vec<f64>,
    /// De-biased squared coefficients, clipped at zero.
    pub debiased_sq: Vec<f64>,
    /// `risk[m - 1]` is the estimated error of keeping `m` vectors.
    pub risk: Vec<f64>,
}

impl RiskCurve {
    /// Evaluate the curve over all columns of `basis`.
    pub fn new(basis: &EigenBasis, pmf: &EmpiricalPmf) -> Self {
        let p = pmf.frequencies();
        assert_eq!(basis.dim(), p.len(), "basis rows must match support size");
        let n = pmf.sample_count() as f64;
        let k = basis.len();

        let mut coefficients = Vec::with_capacity(k);
        let mut second_moments = Vec::with_capacity(k);
        for v in basis.columns() {
            let (c, s2) = v
                .iter()
                .zip(p)
                .fold((0.0, 0.0), |(c, s2), (vi, pi)| (c + vi * pi, s2 + vi * vi * pi));
            coefficients.push(c);
            second_moments.push(s2);
        }

        let debiased_sq: Vec<f64> = if pmf.sample_count() > 1 {
            coefficients
                .iter()
                .zip(&second_moments)
                .map(|(c, s2)| ((n * c * c - s2) / (n - 1.0)).max(0.0))
                .collect()
        } else {
            vec![0.0; k]
        };

        let mut risk = vec![0.0; k];
        let mut variance = 0.0;
        for m in 0..k {
            variance += second_moments[m] - debiased_sq[m];
            risk[m] = variance / n;
        }
        let mut bias = 0.0;
        for m in (0..k).rev() {
            risk[m] += bias;
            bias += debiased_sq[m];
        }

        Self {
            max_basis: k,
            coefficients,
            second_moments,
            debiased_sq,
            risk,
        }
    }

    /// Smallest `m` attaining the minimum risk.
    pub fn best_k(&self) -> usize {
        select_k(&self.risk)
    }
}

/// 1-based index of the first minimum of `risk`; ties go to the smaller
/// (more regularized) level. Returns 1 for an empty curve.
pub fn select_k(risk: &[f64]) -> usize {
    let mut best = 0;
    for (i, r) in risk.iter().enumerate() {
        if *r < risk[best] {
            best = i;
        }
    }
    best + 1
}
