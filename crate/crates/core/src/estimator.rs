//! Spectral PMF estimation.
//!
//! The empirical frequency vector `p` over `{0, ..., N-1}` is projected onto
//! the eigenvectors belonging to the `k` smallest eigenvalues of
//! `H = L - diag(p)`, where `L` is the path-graph Laplacian. Negative entries
//! of the projection are clipped and the result renormalized.
//!
//! `x^T H x = Σ (x_i - x_{i-1})² - Σ x_i² p_i`: the low end of the spectrum
//! consists of vectors that are smooth but carry their mass where the
//! histogram does.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::select::{max_basis_size, RiskCurve};
use crate::tridiag::{EigenBasis, TridiagMatrix};

/// Histogram of nonnegative integer samples on `{0, ..., N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalPmf {
    counts: Vec<u64>,
    n: u64,
    p: Vec<f64>,
}

impl EmpiricalPmf {
    /// Count `samples` over `[0, N)`, where `N` is `support_size` or
    /// `max(samples) + 1` when absent.
    pub fn from_samples(samples: &[i64], support_size: Option<usize>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::param("cannot estimate a PMF from an empty sample"));
        }
        if let Some(&neg) = samples.iter().find(|&&x| x < 0) {
            return Err(Error::param(format!(
                "negative sample {neg}: values must be nonnegative integers \
                 (shift the data first, e.g. with --shift-min)"
            )));
        }
        let max = *samples.iter().max().expect("nonempty") as u64;
        let support = match support_size {
            Some(s) if (s as u64) <= max => {
                return Err(Error::param(format!(
                    "support size {s} must exceed the largest sample {max}"
                )))
            }
            Some(s) => s,
            None => usize::try_from(max + 1)
                .map_err(|_| Error::param("largest sample does not fit in memory"))?,
        };
        let mut counts = vec![0u64; support];
        for &x in samples {
            counts[x as usize] += 1;
        }
        Self::from_counts(counts)
    }

    /// Histogram from raw counts; needs at least one cell and one observation.
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::param("support must contain at least one cell"));
        }
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::param("counts must contain at least one observation"));
        }
        let nf = n as f64;
        let p = counts.iter().map(|&c| c as f64 / nf).collect();
        Ok(Self { counts, n, p })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of observations `n`.
    pub fn sample_count(&self) -> u64 {
        self.n
    }

    /// Support size `N`.
    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.p
    }

    /// Cells with at least one observation.
    pub fn distinct_values(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }
}

/// What the estimator computed on the way to `q`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Eigenvalues of `H` for the basis that was computed.
    pub eigenvalues: Vec<f64>,
    /// Present only for automatic selection.
    pub risk_curve: Option<RiskCurve>,
    /// The projection had no positive mass and `q` fell back to `p`.
    pub degenerate_projection: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfEstimate {
    pub q: Vec<f64>,
    pub k_used: usize,
    pub diagnostics: Option<Diagnostics>,
}

/// `H = L - diag(p)`.
pub fn build_operator(pmf: &EmpiricalPmf) -> Result<TridiagMatrix> {
    let n = pmf.support_size();
    if n < 2 {
        return Err(Error::param("operator needs a support of at least two cells"));
    }
    let diag = pmf
        .frequencies()
        .iter()
        .enumerate()
        .map(|(i, p)| if i == 0 || i == n - 1 { 1.0 - p } else { 2.0 - p })
        .collect();
    TridiagMatrix::new(diag, vec![-1.0; n - 1])
}

/// Replace negatives by zero and rescale to unit sum.
pub fn clip_normalize(mut u: Vec<f64>) -> Result<Vec<f64>> {
    u.iter_mut().for_each(|x| *x = x.max(0.0));
    let total = neumaier_sum(&u);
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::DegenerateProjection);
    }
    u.iter_mut().for_each(|x| *x /= total);
    Ok(u)
}

fn neumaier_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Project `p` onto the span of all columns of `basis`, then clip-normalize.
pub fn project_and_normalize(basis: &EigenBasis, pmf: &EmpiricalPmf) -> Result<PmfEstimate> {
    if basis.dim() != pmf.support_size() {
        return Err(Error::param(format!(
            "basis has {} rows but the histogram has {} cells",
            basis.dim(),
            pmf.support_size()
        )));
    }
    let q = clip_normalize(basis.project(pmf.frequencies()))?;
    Ok(PmfEstimate {
        q,
        k_used: basis.len(),
        diagnostics: None,
    })
}

fn point_mass() -> PmfEstimate {
    PmfEstimate {
        q: vec![1.0],
        k_used: 1,
        diagnostics: None,
    }
}

fn finish(q: Result<Vec<f64>>, pmf: &EmpiricalPmf, k_used: usize, mut diag: Diagnostics) -> Result<PmfEstimate> {
    let q = match q {
        Ok(q) => q,
        Err(Error::DegenerateProjection) => {
            diag.degenerate_projection = true;
            pmf.frequencies().to_vec()
        }
        Err(e) => return Err(e),
    };
    Ok(PmfEstimate {
        q,
        k_used,
        diagnostics: Some(diag),
    })
}

/// Spectral estimate with a fixed number of basis vectors. `k` larger than
/// the support is clamped to it.
pub fn estimate_fixed_k_pmf(pmf: &EmpiricalPmf, k: usize) -> Result<PmfEstimate> {
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    if pmf.support_size() == 1 {
        return Ok(point_mass());
    }
    let k = k.min(pmf.support_size());
    let basis = build_operator(pmf)?.smallest_eigenpairs(k)?;
    let q = clip_normalize(basis.project(pmf.frequencies()));
    let diag = Diagnostics {
        eigenvalues: basis.values().to_vec(),
        ..Default::default()
    };
    finish(q, pmf, k, diag)
}

pub fn estimate_fixed_k(samples: &[i64], k: usize, support_size: Option<usize>) -> Result<PmfEstimate> {
    estimate_fixed_k_pmf(&EmpiricalPmf::from_samples(samples, support_size)?, k)
}

/// Spectral estimate with `k` chosen by minimizing the risk curve over
/// `1..=K`, `K = max_basis_size(n, N_distinct)`.
pub fn estimate_auto_pmf(pmf: &EmpiricalPmf) -> Result<PmfEstimate> {
    if pmf.support_size() == 1 {
        return Ok(point_mass());
    }
    let cap = max_basis_size(pmf.sample_count(), pmf.distinct_values()).min(pmf.support_size());
    let basis = build_operator(pmf)?.smallest_eigenpairs(cap)?;
    let curve = RiskCurve::new(&basis, pmf);
    let k = curve.best_k();
    let q = clip_normalize(basis.combine(&curve.coefficients[..k]));
    let diag = Diagnostics {
        eigenvalues: basis.values().to_vec(),
        risk_curve: Some(curve),
        degenerate_projection: false,
    };
    finish(q, pmf, k, diag)
}

pub fn estimate_auto(samples: &[i64], support_size: Option<usize>) -> Result<PmfEstimate> {
    estimate_auto_pmf(&EmpiricalPmf::from_samples(samples, support_size)?)
}
