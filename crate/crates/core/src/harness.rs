//! Benchmark grids: preset × sample size × method × trial.
//!
//! Every trial draws one sample batch shared by all methods, so methods are
//! compared on identical data. The batch seed depends only on the base seed,
//! the preset name, the sample size and the trial index.
//!
//! Result files:
//!
//! - rows (`rows.csv`, `rows.json`): one record per (preset, n, method,
//!   trial) with columns `preset,n,method,trial,status,error,l1,l2,tv,kl,
//!   kl_infinite,k_used`. `status` is `ok` or `failed`; metric columns are
//!   empty for failed rows. `kl` is KL(truth ‖ estimate) and is left empty
//!   with `kl_infinite = true` when the estimate is zero where the truth is
//!   not.
//! - summary (`summary.csv`, `summary.json`): one record per (preset, n,
//!   method) with `ok,failed,l1_mean,l1_median,l1_std,l2_mean,l2_median,
//!   l2_std,tv_mean,tv_median,tv_std,kl_infinite`. Standard deviations use
//!   the `n - 1` denominator and are 0 for a single row.
//! - timings (`timings.csv`, optional): `preset,n,method,trial,wall_time_s`.
//!   Kept apart from the rows so that those stay byte-reproducible.

use std::fmt;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{estimate_auto_pmf, estimate_fixed_k_pmf, EmpiricalPmf};
use crate::kde::kde_estimate_pmf;
use crate::rng::CounterRng;
use crate::synthetic::{sample_from_pmf, Catalog};

pub const DEFAULT_SAMPLE_SIZES: [usize; 4] = [100, 500, 2500, 12500];
pub const DEFAULT_FIXED_K: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SpectralFixedK,
    SpectralAuto,
    Kde,
    Empirical,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::SpectralFixedK,
        Method::SpectralAuto,
        Method::Kde,
        Method::Empirical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::SpectralFixedK => "spectral-fixed-k",
            Method::SpectralAuto => "spectral-auto",
            Method::Kde => "kde",
            Method::Empirical => "empirical",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::param(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentGrid {
    pub presets: Vec<String>,
    pub sample_sizes: Vec<usize>,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub base_seed: u64,
    /// Basis size for [`Method::SpectralFixedK`].
    pub fixed_k: usize,
}

impl ExperimentGrid {
    /// All catalog presets, default sizes, every method.
    pub fn default_for(catalog: &Catalog) -> Self {
        Self {
            presets: catalog.names().map(str::to_owned).collect(),
            sample_sizes: DEFAULT_SAMPLE_SIZES.to_vec(),
            trials: 10,
            methods: Method::ALL.to_vec(),
            base_seed: 0,
            fixed_k: DEFAULT_FIXED_K,
        }
    }

    fn validate(&self, catalog: &Catalog) -> Result<()> {
        if self.presets.is_empty() || self.sample_sizes.is_empty() || self.methods.is_empty() {
            return Err(Error::param("grid needs at least one preset, size and method"));
        }
        if self.trials == 0 {
            return Err(Error::param("grid needs at least one trial"));
        }
        if self.sample_sizes.contains(&0) {
            return Err(Error::param("sample sizes must be positive"));
        }
        if self.fixed_k == 0 {
            return Err(Error::param("fixed k must be at least 1"));
        }
        if let Some(bad) = self.presets.iter().find(|p| catalog.get(p).is_none()) {
            return Err(Error::param(format!("unknown preset {bad:?}")));
        }
        Ok(())
    }
}

/// Seed of the sample batch for one (preset, n, trial) cell.
pub fn trial_seed(base_seed: u64, preset: &str, n: usize, trial: usize) -> u64 {
    // FNV-1a of the preset name keys the stream
    let key = preset.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    });
    CounterRng::new(base_seed ^ key).derive(((n as u64) << 24) ^ trial as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub preset: String,
    pub n: usize,
    pub method: Method,
    pub trial: usize,
    pub status: RowStatus,
    pub error: Option<String>,
    pub l1: Option<f64>,
    pub l2: Option<f64>,
    pub tv: Option<f64>,
    pub kl: Option<f64>,
    pub kl_infinite: bool,
    pub k_used: Option<usize>,
    #[serde(skip)]
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Failed,
}

/// Distances between a ground truth and an estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub l1: f64,
    pub l2: f64,
    pub tv: f64,
    /// `None` when KL(truth ‖ estimate) is infinite.
    pub kl: Option<f64>,
}

impl Metrics {
    pub fn between(truth: &[f64], estimate: &[f64]) -> Self {
        assert_eq!(truth.len(), estimate.len());
        let mut l1 = 0.0;
        let mut l2 = 0.0;
        let mut kl = Some(0.0);
        for (&p, &q) in truth.iter().zip(estimate) {
            let d = p - q;
            l1 += d.abs();
            l2 += d * d;
            if p > 0.0 {
                kl = match kl {
                    Some(acc) if q > 0.0 => Some(acc + p * (p / q).ln()),
                    _ => None,
                };
            }
        }
        Self {
            l1,
            l2: l2.sqrt(),
            tv: 0.5 * l1,
            kl,
        }
    }
}

fn estimate(method: Method, pmf: &EmpiricalPmf, fixed_k: usize) -> Result<(Vec<f64>, Option<usize>)> {
    match method {
        Method::SpectralFixedK => estimate_fixed_k_pmf(pmf, fixed_k).map(|e| (e.q, Some(e.k_used))),
        Method::SpectralAuto => estimate_auto_pmf(pmf).map(|e| (e.q, Some(e.k_used))),
        Method::Kde => Ok((kde_estimate_pmf(pmf).q, None)),
        Method::Empirical => Ok((pmf.frequencies().to_vec(), None)),
    }
}

fn run_method(method: Method, pmf: &EmpiricalPmf, fixed_k: usize) -> Result<(Vec<f64>, Option<usize>)> {
    match catch_unwind(AssertUnwindSafe(|| estimate(method, pmf, fixed_k))) {
        Ok(r) => r,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "estimator panicked".into());
            Err(Error::param(format!("estimator panicked: {msg}")))
        }
    }
}

/// Run every cell of the grid. Estimator failures become `failed` rows;
/// only an invalid grid is an error. Rows come out ordered by preset (grid
/// order), sample size (grid order), trial, then method (grid order).
pub fn run_grid(grid: &ExperimentGrid, catalog: &Catalog) -> Result<Vec<MetricRow>> {
    grid.validate(catalog)?;
    let mut truths = Vec::with_capacity(grid.presets.len());
    for name in &grid.presets {
        let spec = catalog.get(name).expect("validated");
        truths.push(spec.pmf()?);
    }
    let cells: Vec<(usize, usize, usize)> = (0..grid.presets.len())
        .flat_map(|p| {
            grid.sample_sizes
                .iter()
                .flat_map(move |&n| (0..grid.trials).map(move |t| (p, n, t)))
        })
        .collect();

    let rows: Vec<Vec<MetricRow>> = cells
        .par_iter()
        .map(|&(p, n, trial)| {
            let preset = &grid.presets[p];
            let truth = &truths[p];
            let seed = trial_seed(grid.base_seed, preset, n, trial);
            let samples = sample_from_pmf(truth, n, seed);
            let mut counts = vec![0u64; truth.len()];
            samples.iter().for_each(|&s| counts[s as usize] += 1);
            let pmf = EmpiricalPmf::from_counts(counts).expect("n >= 1 draws");
            grid.methods
                .iter()
                .map(|&method| {
                    let start = Instant::now();
                    let result = run_method(method, &pmf, grid.fixed_k);
                    let wall_time_s = start.elapsed().as_secs_f64();
                    let mut row = MetricRow {
                        preset: preset.clone(),
                        n,
                        method,
                        trial,
                        status: RowStatus::Ok,
                        error: None,
                        l1: None,
                        l2: None,
                        tv: None,
                        kl: None,
                        kl_infinite: false,
                        k_used: None,
                        wall_time_s,
                    };
                    match result {
                        Ok((q, k_used)) => {
                            let m = Metrics::between(truth, &q);
                            row.l1 = Some(m.l1);
                            row.l2 = Some(m.l2);
                            row.tv = Some(m.tv);
                            row.kl = m.kl;
                            row.kl_infinite = m.kl.is_none();
                            row.k_used = k_used;
                        }
                        Err(e) => {
                            row.status = RowStatus::Failed;
                            row.error = Some(e.to_string());
                        }
                    }
                    row
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub median: f64,
    pub std: f64,
}

impl Stats {
    /// `None` for an empty slice.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            0.5 * (sorted[mid - 1] + sorted[mid])
        };
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, median, std })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub preset: String,
    pub n: usize,
    pub method: Method,
    pub ok: usize,
    pub failed: usize,
    pub l1: Option<Stats>,
    pub l2: Option<Stats>,
    pub tv: Option<Stats>,
    pub kl_infinite: usize,
}

/// Aggregate rows per (preset, n, method), in order of first appearance.
pub fn summarize(rows: &[MetricRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(&str, usize, Method)> = Vec::new();
    for r in rows {
        let key = (r.preset.as_str(), r.n, r.method);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(preset, n, method)| {
            let group: Vec<&MetricRow> = rows
                .iter()
                .filter(|r| r.preset == preset && r.n == n && r.method == method)
                .collect();
            let collect = |f: fn(&MetricRow) -> Option<f64>| -> Vec<f64> {
                group.iter().filter_map(|r| f(r)).collect()
            };
            SummaryRow {
                preset: preset.to_owned(),
                n,
                method,
                ok: group.iter().filter(|r| r.status == RowStatus::Ok).count(),
                failed: group.iter().filter(|r| r.status == RowStatus::Failed).count(),
                l1: Stats::of(&collect(|r| r.l1)),
                l2: Stats::of(&collect(|r| r.l2)),
                tv: Stats::of(&collect(|r| r.tv)),
                kl_infinite: group.iter().filter(|r| r.kl_infinite).count(),
            }
        })
        .collect()
}

fn csv_err(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_rows_csv<W: Write>(rows: &[MetricRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "preset", "n", "method", "trial", "status", "error", "l1", "l2", "tv", "kl", "kl_infinite", "k_used",
    ])
    .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.preset.clone(),
            r.n.to_string(),
            r.method.to_string(),
            r.trial.to_string(),
            if r.status == RowStatus::Ok { "ok" } else { "failed" }.to_string(),
            r.error.clone().unwrap_or_default(),
            opt(r.l1),
            opt(r.l2),
            opt(r.tv),
            opt(r.kl),
            r.kl_infinite.to_string(),
            opt(r.k_used),
        ])
        .map_err(csv_err)?;
    }
    w.flush()
}

pub fn write_timings_csv<W: Write>(rows: &[MetricRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["preset", "n", "method", "trial", "wall_time_s"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.preset.clone(),
            r.n.to_string(),
            r.method.to_string(),
            r.trial.to_string(),
            r.wall_time_s.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()
}

pub fn write_summary_csv<W: Write>(summary: &[SummaryRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "preset", "n", "method", "ok", "failed", "l1_mean", "l1_median", "l1_std", "l2_mean", "l2_median",
        "l2_std", "tv_mean", "tv_median", "tv_std", "kl_infinite",
    ])
    .map_err(csv_err)?;
    for s in summary {
        let mut rec = vec![
            s.preset.clone(),
            s.n.to_string(),
            s.method.to_string(),
            s.ok.to_string(),
            s.failed.to_string(),
        ];
        for stats in [s.l1, s.l2, s.tv] {
            rec.push(opt(stats.map(|x| x.mean)));
            rec.push(opt(stats.map(|x| x.median)));
            rec.push(opt(stats.map(|x| x.std)));
        }
        rec.push(s.kl_infinite.to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()
}
