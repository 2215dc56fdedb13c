//! Ground-truth distributions for benchmarking.
//!
//! Each [`DistributionSpec`] describes an exact PMF on `{0, ..., N-1}`:
//!
//! - `zipf`: `p(n) ∝ (a + n)^(-b)`
//! - `centered-zipf`: `p(n) ∝ (a + |n - mu|)^(-b)`
//! - `mixture`: convex combination of other shapes on the same support
//! - `bell`: Gaussian density at the integer points, renormalized
//! - `mid-plateau`: uniform block on `[lo, hi]` holding `1 - floor_mass`,
//!   with `floor_mass` spread uniformly over the remaining cells
//!
//! Sampling inverts the exact CDF with the [`CounterRng`] stream, so a
//! `(spec, n, seed)` triple always yields the same batch.
//!
//! The named presets live in `data/presets.json` (see [`Catalog`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::CounterRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Shape {
    Zipf {
        a: f64,
        b: f64,
    },
    CenteredZipf {
        a: f64,
        b: f64,
        mu: i64,
    },
    Mixture {
        weights: Vec<f64>,
        components: Vec<Shape>,
    },
    Bell {
        mu: f64,
        sigma: f64,
    },
    MidPlateau {
        lo: usize,
        hi: usize,
        floor_mass: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub support_size: usize,
    pub shape: Shape,
}

impl DistributionSpec {
    pub fn new(support_size: usize, shape: Shape) -> Self {
        Self {
            support_size,
            shape,
        }
    }

    /// Exact normalized PMF over `[0, N)`.
    pub fn pmf(&self) -> Result<Vec<f64>> {
        if self.support_size == 0 {
            return Err(Error::param("support size must be at least 1"));
        }
        let mut w = unnormalized(&self.shape, self.support_size)?;
        let total: f64 = w.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::param("distribution has no mass on the support"));
        }
        w.iter_mut().for_each(|x| *x /= total);
        Ok(w)
    }

    /// `n` i.i.d. draws by inverse CDF.
    pub fn sample(&self, n: usize, seed: u64) -> Result<SampleBatch> {
        let pmf = self.pmf()?;
        let values = sample_from_pmf(&pmf, n, seed);
        Ok(SampleBatch {
            spec: self.clone(),
            seed,
            values,
        })
    }
}

/// Nonnegative weights proportional to the PMF (mixtures normalize their
/// components before weighting).
fn unnormalized(shape: &Shape, n: usize) -> Result<Vec<f64>> {
    let w = match *shape {
        Shape::Zipf { a, b } => {
            check_zipf(a, b)?;
            (0..n).map(|i| (a + i as f64).powf(-b)).collect()
        }
        Shape::CenteredZipf { a, b, mu } => {
            check_zipf(a, b)?;
            (0..n)
                .map(|i| (a + (i as f64 - mu as f64).abs()).powf(-b))
                .collect()
        }
        Shape::Bell { mu, sigma } => {
            if !(sigma > 0.0) || !mu.is_finite() || !sigma.is_finite() {
                return Err(Error::param("bell needs finite mu and sigma > 0"));
            }
            (0..n)
                .map(|i| {
                    let z = (i as f64 - mu) / sigma;
                    (-0.5 * z * z).exp()
                })
                .collect()
        }
        Shape::MidPlateau { lo, hi, floor_mass } => {
            if lo > hi || hi >= n {
                return Err(Error::param(format!(
                    "plateau [{lo}, {hi}] must lie inside [0, {n})"
                )));
            }
            if !(0.0..1.0).contains(&floor_mass) {
                return Err(Error::param("floor_mass must lie in [0, 1)"));
            }
            let block = (hi - lo + 1) as f64;
            let outside = n - (hi - lo + 1);
            // with no cells outside the block the floor has nowhere to go
            let floor_mass = if outside == 0 { 0.0 } else { floor_mass };
            (0..n)
                .map(|i| {
                    if (lo..=hi).contains(&i) {
                        (1.0 - floor_mass) / block
                    } else {
                        floor_mass / outside as f64
                    }
                })
                .collect()
        }
        Shape::Mixture {
            ref weights,
            ref components,
        } => {
            if weights.len() != components.len() || weights.is_empty() {
                return Err(Error::param("mixture needs one weight per component"));
            }
            if weights.iter().any(|w| !(*w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::param("mixture weights must lie on the simplex"));
            }
            let mut out = vec![0.0; n];
            for (w, c) in weights.iter().zip(components) {
                let comp = DistributionSpec::new(n, c.clone()).pmf()?;
                out.iter_mut().zip(comp).for_each(|(o, x)| *o += w * x);
            }
            out
        }
    };
    Ok(w)
}

fn check_zipf(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::param("zipf offset a must be positive"));
    }
    if !b.is_finite() {
        return Err(Error::param("zipf exponent b must be finite"));
    }
    Ok(())
}

/// Inverse-CDF draws from an explicit PMF. Draw `i` uses counter `i` of the
/// stream keyed by `seed`.
pub fn sample_from_pmf(pmf: &[f64], n: usize, seed: u64) -> Vec<i64> {
    let mut cdf = Vec::with_capacity(pmf.len());
    let mut acc = 0.0;
    for &p in pmf {
        acc += p;
        cdf.push(acc);
    }
    // rounding can leave the total a hair below 1; anything past it lands on
    // the last cell with mass
    let last = pmf.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let rng = CounterRng::new(seed);
    (0..n as u64)
        .map(|i| {
            let u = rng.f64_at(i) * acc;
            let idx = cdf.partition_point(|&c| c <= u);
            idx.min(last) as i64
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub spec: DistributionSpec,
    pub seed: u64,
    pub values: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    pub spec: DistributionSpec,
}

/// Versioned set of named benchmark distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub version: u32,
    pub presets: Vec<Preset>,
}

const BUILTIN_CATALOG: &str = include_str!("../data/presets.json");

impl Catalog {
    /// The presets shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_json(BUILTIN_CATALOG).expect("bundled preset catalog is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let catalog: Catalog = serde_json::from_str(text)
            .map_err(|e| Error::param(format!("bad preset catalog: {e}")))?;
        for p in &catalog.presets {
            p.spec.pmf()?;
        }
        Ok(catalog)
    }

    pub fn get(&self, name: &str) -> Option<&DistributionSpec> {
        self.presets.iter().find(|p| p.name == name).map(|p| &p.spec)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.presets.iter().map(|p| p.name.as_str())
    }
}
