//! Command-line front end for `eigenhist`.
//!
//! Subcommands:
//!
//! - `estimate`: spectral PMF estimate from raw samples (file or stdin)
//! - `bench`: benchmark grid over the synthetic presets
//! - `plot`: SVG overlay of estimates on the empirical histogram
//! - `presets`, `sample`, `truth`: inspect the preset catalog, draw samples
//!   from a preset, write its exact PMF
//!
//! Exit status is 0 on success, 2 for usage or input errors and 3 when the
//! estimator fails numerically. Log verbosity is read from `EIGENHIST_LOG`
//! (`error`, `warn`, `info`, `debug`, `trace`).

pub mod bench;
pub mod error;
pub mod estimate;
pub mod ingest;
pub mod plot;

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eigenhist::harness::Method;
use eigenhist::Catalog;

pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "eigenhist", version, about = "Spectral estimation of discrete distributions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate a PMF from integer samples.
    Estimate(EstimateArgs),
    /// Run a benchmark grid over synthetic presets.
    Bench(BenchArgs),
    /// Render estimates as an SVG plot.
    Plot(PlotArgs),
    /// List the built-in presets as JSON.
    Presets,
    /// Draw samples from a preset, one per line.
    Sample(SampleArgs),
    /// Write the exact PMF of a preset as JSON.
    Truth(TruthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Input file; stdin when absent or `-`.
    pub input: Option<PathBuf>,
    /// Fixed basis size.
    #[arg(long, conflicts_with = "auto")]
    pub k: Option<usize>,
    /// Choose the basis size automatically (the default).
    #[arg(long)]
    pub auto: bool,
    /// Support size after shifting; defaults to max + 1.
    #[arg(long)]
    pub support: Option<usize>,
    /// Discard samples equal to zero (after scaling).
    #[arg(long)]
    pub drop_zeros: bool,
    /// Shift samples so the minimum maps to 0.
    #[arg(long)]
    pub shift_min: bool,
    /// Multiply by this factor and round to the nearest integer.
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Read a CSV with a header row and take this column (name or 0-based index).
    #[arg(long)]
    pub column: Option<String>,
    /// Include eigenvalues and the risk curve in JSON output.
    #[arg(long)]
    pub diagnostics: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated preset names; all presets when absent.
    #[arg(long, value_delimiter = ',')]
    pub presets: Option<Vec<String>>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated subset of spectral-fixed-k, spectral-auto, kde, empirical.
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    pub methods: Option<Vec<Method>>,
    /// Basis size for spectral-fixed-k.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value = "bench-out")]
    pub out: PathBuf,
    /// Also write per-row wall times to timings.csv.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Estimate JSON files written by `estimate`.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Exact PMF to overlay (JSON array or `truth` output).
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub log_y: bool,
    #[arg(long, default_value = "plot.svg")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    pub preset: String,
    #[arg(long, short = 'n', default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TruthArgs {
    pub preset: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: eigenhist::Error| e.to_string())
}

impl EstimateArgs {
    pub fn options(&self) -> estimate::EstimateOptions {
        use estimate::{EstimateOptions, Mode, OutputFormat};
        use ingest::{Column, IngestSpec, InputFormat};
        EstimateOptions {
            ingest: IngestSpec {
                format: match &self.column {
                    Some(c) => InputFormat::Csv(Column::parse(c)),
                    None => InputFormat::Lines,
                },
                drop_zeros: self.drop_zeros,
                shift_min: self.shift_min,
                scale: self.scale,
            },
            mode: self.k.map_or(Mode::Auto, Mode::Fixed),
            support: self.support,
            format: match self.format {
                Format::Json => OutputFormat::Json,
                Format::Csv => OutputFormat::Csv,
            },
            diagnostics: self.diagnostics,
        }
    }
}

impl BenchArgs {
    pub fn options(&self) -> bench::BenchOptions {
        bench::BenchOptions {
            presets: self.presets.clone(),
            sizes: self.sizes.clone(),
            trials: self.trials,
            seed: self.seed,
            methods: self.methods.clone(),
            fixed_k: self.k,
            out_dir: self.out.clone(),
            timings: self.timings,
        }
    }
}

fn open_output(path: Option<&PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::io(format!("creating {}", p.display()), e))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn open_input(path: Option<&PathBuf>) -> CliResult<Box<dyn Read>> {
    Ok(match path {
        Some(p) if p.as_os_str() != "-" => {
            Box::new(File::open(p).map_err(|e| CliError::io(format!("opening {}", p.display()), e))?)
        }
        _ => Box::new(io::stdin().lock()),
    })
}

fn preset<'a>(catalog: &'a Catalog, name: &str) -> CliResult<&'a eigenhist::DistributionSpec> {
    catalog.get(name).ok_or_else(|| {
        let known: Vec<&str> = catalog.names().collect();
        CliError::usage(format!("unknown preset {name:?}; available: {}", known.join(", ")))
    })
}

pub fn run(cli: Cli) -> CliResult<()> {
    let catalog = Catalog::builtin();
    match cli.command {
        Command::Estimate(args) => {
            let input = open_input(args.input.as_ref())?;
            let out = open_output(args.out.as_ref())?;
            estimate::run_estimate(&args.options(), input, out).map(|_| ())
        }
        Command::Bench(args) => bench::run_bench(&args.options(), &catalog, io::stdout().lock()).map(|_| ()),
        Command::Plot(args) => plot::run_plot(&plot::PlotOptions {
            inputs: args.files,
            truth: args.truth,
            log_y: args.log_y,
            out: args.out,
        }),
        Command::Presets => {
            let mut out = io::stdout().lock();
            serde_json::to_writer_pretty(&mut out, &catalog)
                .map_err(io::Error::from)
                .and_then(|()| writeln!(out))
                .map_err(|e| CliError::io("writing presets", e))
        }
        Command::Sample(args) => {
            let batch = preset(&catalog, &args.preset)?.sample(args.n, args.seed)?;
            let mut out = open_output(args.out.as_ref())?;
            let mut write = || -> io::Result<()> {
                for v in &batch.values {
                    writeln!(out, "{v}")?;
                }
                out.flush()
            };
            write().map_err(|e| CliError::io("writing samples", e))
        }
        Command::Truth(args) => {
            let spec = preset(&catalog, &args.preset)?;
            let q = spec.pmf()?;
            let body = serde_json::json!({ "support_offset": 0, "N": q.len(), "q": q });
            let mut out = open_output(args.out.as_ref())?;
            serde_json::to_writer(&mut out, &body)
                .map_err(io::Error::from)
                .and_then(|()| writeln!(out))
                .and_then(|()| out.flush())
                .map_err(|e| CliError::io("writing the truth", e))
        }
    }
}
