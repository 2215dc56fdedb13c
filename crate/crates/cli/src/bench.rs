//! The `bench` command: run a benchmark grid and write its result tables.
//!
//! Files written to the output directory: `rows.csv`, `rows.json`,
//! `summary.csv`, `summary.json`, and `timings.csv` when requested. Column
//! meanings are documented in `eigenhist::harness`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use eigenhist::harness::{
    run_grid, summarize, write_rows_csv, write_summary_csv, write_timings_csv, ExperimentGrid, Method, SummaryRow,
};
use eigenhist::Catalog;
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    /// `None` runs every catalog preset.
    pub presets: Option<Vec<String>>,
    pub sizes: Option<Vec<usize>>,
    pub trials: usize,
    pub seed: u64,
    pub methods: Option<Vec<Method>>,
    pub fixed_k: Option<usize>,
    pub out_dir: PathBuf,
    pub timings: bool,
}

pub fn run_bench<W: Write>(opts: &BenchOptions, catalog: &Catalog, mut report: W) -> CliResult<Vec<SummaryRow>> {
    let mut grid = ExperimentGrid::default_for(catalog);
    if let Some(p) = &opts.presets {
        if let Some(bad) = p.iter().find(|name| catalog.get(name).is_none()) {
            let known: Vec<&str> = catalog.names().collect();
            return Err(CliError::usage(format!(
                "unknown preset {bad:?}; available: {}",
                known.join(", ")
            )));
        }
        grid.presets = p.clone();
    }
    if let Some(s) = &opts.sizes {
        grid.sample_sizes = s.clone();
    }
    if let Some(m) = &opts.methods {
        grid.methods = m.clone();
    }
    if let Some(k) = opts.fixed_k {
        grid.fixed_k = k;
    }
    grid.trials = opts.trials;
    grid.base_seed = opts.seed;

    log::info!(
        "running {} presets x {} sizes x {} trials x {} methods",
        grid.presets.len(),
        grid.sample_sizes.len(),
        grid.trials,
        grid.methods.len()
    );
    let rows = run_grid(&grid, catalog)?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        log::warn!("{failed} rows failed; see the error column of rows.csv");
    }
    let summary = summarize(&rows);

    let dir = &opts.out_dir;
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    write_file(&dir.join("rows.csv"), |w| write_rows_csv(&rows, w))?;
    write_file(&dir.join("rows.json"), |w| write_json(&rows, w))?;
    write_file(&dir.join("summary.csv"), |w| write_summary_csv(&summary, w))?;
    write_file(&dir.join("summary.json"), |w| write_json(&summary, w))?;
    if opts.timings {
        write_file(&dir.join("timings.csv"), |w| write_timings_csv(&rows, w))?;
    }

    print_summary(&summary, &mut report).map_err(|e| CliError::io("writing the summary", e))?;
    Ok(summary)
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> CliResult<()> {
    let err = |e| CliError::io(format!("writing {}", path.display()), e);
    let mut w = BufWriter::new(File::create(path).map_err(err)?);
    body(&mut w).and_then(|()| w.flush()).map_err(err)
}

fn write_json<T: Serialize + ?Sized, W: Write>(value: &T, mut w: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)
}

fn print_summary<W: Write>(summary: &[SummaryRow], mut w: W) -> std::io::Result<()> {
    writeln!(
        w,
        "{:<16} {:>6} {:<17} {:>4} {:>6} {:>9} {:>9} {:>6}",
        "preset", "n", "method", "ok", "failed", "l1_mean", "l1_std", "kl_inf"
    )?;
    for s in summary {
        let (mean, std) = match s.l1 {
            Some(st) => (format!("{:.4}", st.mean), format!("{:.4}", st.std)),
            None => ("-".into(), "-".into()),
        };
        writeln!(
            w,
            "{:<16} {:>6} {:<17} {:>4} {:>6} {:>9} {:>9} {:>6}",
            s.preset,
            s.n,
            s.method.name(),
            s.ok,
            s.failed,
            mean,
            std,
            s.kl_infinite
        )?;
    }
    w.flush()
}
