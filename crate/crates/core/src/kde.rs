//! Gaussian kernel density baseline evaluated on the integer grid.
//!
//! Bandwidth follows Scott's rule, `h = σ̂ n^{-1/5}` with `σ̂` the sample
//! standard deviation (`n - 1` denominator). Degenerate samples (one
//! observation, or all equal) use `σ̂ = 1`. Kernels are truncated at `±8h`,
//! where the Gaussian tail is far below double-precision resolution of the
//! normalized result.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::estimator::EmpiricalPmf;

/// Kernel support radius in bandwidths.
pub const TRUNCATION_BANDWIDTHS: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdeEstimate {
    pub q: Vec<f64>,
    pub bandwidth: f64,
}

/// Scott's-rule bandwidth for a histogram.
pub fn scott_bandwidth(pmf: &EmpiricalPmf) -> f64 {
    let n = pmf.sample_count() as f64;
    let mut sigma = 1.0;
    if pmf.sample_count() > 1 {
        let mean = pmf
            .counts()
            .iter()
            .enumerate()
            .map(|(i, &c)| i as f64 * c as f64)
            .sum::<f64>()
            / n;
        let ss: f64 = pmf
            .counts()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| c as f64 * (i as f64 - mean).powi(2))
            .sum();
        let sd = (ss / (n - 1.0)).sqrt();
        if sd > 0.0 {
            sigma = sd;
        }
    }
    sigma * n.powf(-0.2)
}

pub fn kde_estimate_pmf(pmf: &EmpiricalPmf) -> KdeEstimate {
    let bandwidth = scott_bandwidth(pmf);
    let support = pmf.support_size();
    let radius = ((TRUNCATION_BANDWIDTHS * bandwidth).floor() as usize).min(support);
    let kernel: Vec<f64> = (0..=radius)
        .map(|d| {
            let z = d as f64 / bandwidth;
            (-0.5 * z * z).exp()
        })
        .collect();

    let mut q = vec![0.0; support];
    for (v, &c) in pmf.counts().iter().enumerate() {
        if c == 0 {
            continue;
        }
        let c = c as f64;
        let lo = v.saturating_sub(radius);
        let hi = (v + radius).min(support - 1);
        for (i, qi) in q[lo..=hi].iter_mut().enumerate() {
            *qi += c * kernel[(lo + i).abs_diff(v)];
        }
    }
    let total: f64 = q.iter().sum();
    q.iter_mut().for_each(|x| *x /= total);
    KdeEstimate { q, bandwidth }
}

pub fn kde_estimate(samples: &[i64], support_size: Option<usize>) -> Result<KdeEstimate> {
    Ok(kde_estimate_pmf(&EmpiricalPmf::from_samples(samples, support_size)?))
}
