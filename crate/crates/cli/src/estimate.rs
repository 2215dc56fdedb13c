//! The `estimate` command.
//!
//! JSON output fields: `support_offset` (add to an index to get the original
//! value), `n` (samples used), `N` (support size), `k_used`, `mode`
//! (`auto` or `fixed`), `q` (the estimate), `empirical` (sample frequencies)
//! and, with `--diagnostics`, `diagnostics` (eigenvalues and, for automatic
//! selection, the risk curve). CSV output has a `value,probability` header
//! and one row per support cell in original coordinates.

use std::io::{Read, Write};

use eigenhist::estimator::{estimate_auto_pmf, estimate_fixed_k_pmf, Diagnostics, EmpiricalPmf};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::ingest::{ingest, IngestSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateOptions {
    pub ingest: IngestSpec,
    pub mode: Mode,
    /// Support size on the shifted (internal) axis.
    pub support: Option<usize>,
    pub format: OutputFormat,
    pub diagnostics: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateOutput {
    pub support_offset: i64,
    pub n: u64,
    #[serde(rename = "N")]
    pub support_size: usize,
    pub k_used: usize,
    pub mode: String,
    pub q: Vec<f64>,
    pub empirical: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
}

pub fn run_estimate<R: Read, W: Write>(opts: &EstimateOptions, input: R, mut out: W) -> CliResult<EstimateOutput> {
    if opts.mode == Mode::Fixed(0) {
        return Err(CliError::usage("--k must be at least 1"));
    }
    let data = ingest(&opts.ingest, input)?;
    log::info!(
        "read {} records, estimating from {} samples (offset {})",
        data.records,
        data.values.len(),
        data.offset
    );
    let pmf = EmpiricalPmf::from_samples(&data.values, opts.support)?;
    let est = match opts.mode {
        Mode::Auto => estimate_auto_pmf(&pmf)?,
        Mode::Fixed(k) => estimate_fixed_k_pmf(&pmf, k)?,
    };
    log::info!("N = {}, k_used = {}", pmf.support_size(), est.k_used);
    if est.diagnostics.as_ref().is_some_and(|d| d.degenerate_projection) {
        log::warn!("projection had no positive mass; returning the empirical frequencies");
    }

    let output = EstimateOutput {
        support_offset: data.offset,
        n: pmf.sample_count(),
        support_size: pmf.support_size(),
        k_used: est.k_used,
        mode: match opts.mode {
            Mode::Auto => "auto",
            Mode::Fixed(_) => "fixed",
        }
        .to_owned(),
        q: est.q,
        empirical: pmf.frequencies().to_vec(),
        diagnostics: if opts.diagnostics { est.diagnostics } else { None },
    };

    let written = match opts.format {
        OutputFormat::Json => serde_json::to_writer(&mut out, &output)
            .map_err(std::io::Error::from)
            .and_then(|()| writeln!(out)),
        OutputFormat::Csv => write_csv(&output, &mut out),
    };
    written
        .and_then(|()| out.flush())
        .map_err(|e| CliError::io("writing the estimate", e))?;
    Ok(output)
}

fn write_csv<W: Write>(output: &EstimateOutput, out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["value", "probability"])?;
    for (i, q) in output.q.iter().enumerate() {
        w.write_record([(i as i64 + output.support_offset).to_string(), q.to_string()])?;
    }
    w.flush()
}
