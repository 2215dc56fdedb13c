//! The `plot` command: overlay estimates on the empirical histogram as SVG.
//!
//! Inputs are JSON files written by `estimate`. All of them, and the truth
//! file if given, must cover the same support (same offset and length). The
//! gray bars show the empirical frequencies stored in the first input. Each
//! estimate is drawn as a polyline colored by its position in [`PALETTE`];
//! the truth, when given, is a dashed black line.
//!
//! A truth file is either a bare JSON array of probabilities (offset 0) or an
//! object with a `q` array and an optional `support_offset`, which is what
//! `eigenhist truth` writes.
//!
//! With `log_y` the axis spans whole decades from the smallest positive value
//! (but not below `1e-12`) to the largest; zero cells are drawn at the floor.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::estimate::EstimateOutput;

/// Line colors for estimates, in input order; wraps after the last entry.
pub const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
pub const BAR_COLOR: &str = "#bdbdbd";
pub const TRUTH_COLOR: &str = "#000000";
pub const LOG_FLOOR_MIN: f64 = 1e-12;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    pub inputs: Vec<PathBuf>,
    pub truth: Option<PathBuf>,
    pub log_y: bool,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub offset: i64,
    pub values: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TruthFile {
    Bare(Vec<f64>),
    Object {
        #[serde(default)]
        support_offset: i64,
        q: Vec<f64>,
    },
}

pub fn run_plot(opts: &PlotOptions) -> CliResult<()> {
    if opts.inputs.is_empty() {
        return Err(CliError::usage("plot needs at least one estimate file"));
    }
    let estimates = opts
        .inputs
        .iter()
        .map(|p| {
            let est: EstimateOutput = read_json(p)?;
            Ok((label_for(p), est))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let truth = match &opts.truth {
        Some(p) => Some(match read_json::<TruthFile>(p)? {
            TruthFile::Bare(q) => Series {
                label: "truth".into(),
                offset: 0,
                values: q,
            },
            TruthFile::Object { support_offset, q } => Series {
                label: "truth".into(),
                offset: support_offset,
                values: q,
            },
        }),
        None => None,
    };
    let svg = render_svg(&estimates, truth.as_ref(), opts.log_y)?;
    fs::write(&opts.out, svg).map_err(|e| CliError::io(format!("writing {}", opts.out.display()), e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        line: e.line() as u64,
        message: format!("{}: {e}", path.display()),
    })
}

fn label_for(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Render the overlay. Fails when the series do not share a support.
pub fn render_svg(estimates: &[(String, EstimateOutput)], truth: Option<&Series>, log_y: bool) -> CliResult<String> {
    let (_, first) = estimates
        .first()
        .ok_or_else(|| CliError::usage("plot needs at least one estimate"))?;
    let offset = first.support_offset;
    let n = first.q.len();
    if n == 0 || first.empirical.len() != n {
        return Err(CliError::usage("estimate file has an empty or inconsistent support"));
    }
    let mut lines: Vec<Series> = estimates
        .iter()
        .map(|(label, e)| Series {
            label: label.clone(),
            offset: e.support_offset,
            values: e.q.clone(),
        })
        .collect();
    if let Some(t) = truth {
        lines.push(t.clone());
    }
    for s in &lines {
        if s.offset != offset || s.values.len() != n {
            return Err(CliError::usage(format!(
                "{} covers [{}, {}) but the first estimate covers [{offset}, {})",
                s.label,
                s.offset,
                s.offset + s.values.len() as i64,
                offset + n as i64
            )));
        }
    }

    let all = lines.iter().flat_map(|s| s.values.iter()).chain(&first.empirical);
    let (min_pos, max) = all.fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
        let lo = if v > 0.0 && v < lo { v } else { lo };
        (lo, hi.max(v))
    });
    let axis = if log_y {
        YAxis::log(min_pos, max)
    } else {
        YAxis::linear(max)
    };

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let cell = pw / n as f64;
    let x = |i: usize| LEFT + (i as f64 + 0.5) * cell;
    let y = |v: f64| TOP + ph * (1.0 - axis.frac(v));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    let _ = writeln!(svg, r#"<g class="empirical" fill="{BAR_COLOR}">"#);
    for (i, &v) in first.empirical.iter().enumerate() {
        if v > 0.0 {
            let top = y(v);
            let _ = writeln!(
                svg,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}"/>"#,
                LEFT + i as f64 * cell,
                top,
                cell,
                TOP + ph - top
            );
        }
    }
    let _ = writeln!(svg, "</g>");

    for (idx, s) in lines.iter().enumerate() {
        let is_truth = truth.is_some() && idx == lines.len() - 1;
        let (color, extra, class) = if is_truth {
            (TRUTH_COLOR, r#" stroke-dasharray="5,3""#, "truth")
        } else {
            (PALETTE[idx % PALETTE.len()], "", "estimate")
        };
        let mut pts = String::new();
        for (i, &v) in s.values.iter().enumerate() {
            if i > 0 {
                pts.push(' ');
            }
            let _ = write!(pts, "{:.3},{:.3}", x(i), y(v));
        }
        let _ = writeln!(
            svg,
            r#"<polyline class="{class}" fill="none" stroke="{color}" stroke-width="1.5"{extra} points="{pts}"/>"#
        );
    }

    // axes and ticks
    let _ = writeln!(
        svg,
        r#"<path d="M{LEFT},{TOP} V{:.3} H{:.3}" fill="none" stroke="black"/>"#,
        TOP + ph,
        LEFT + pw
    );
    for (v, label) in axis.ticks() {
        let ty = y(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.3}" y1="{ty:.3}" x2="{LEFT}" y2="{ty:.3}" stroke="black"/><text x="{:.3}" y="{:.3}" text-anchor="end">{label}</text>"#,
            LEFT - 4.0,
            LEFT - 6.0,
            ty + 4.0
        );
    }
    for t in 0..5 {
        let i = if n == 1 { 0 } else { t * (n - 1) / 4 };
        let tx = x(i);
        let _ = writeln!(
            svg,
            r#"<line x1="{tx:.3}" y1="{:.3}" x2="{tx:.3}" y2="{:.3}" stroke="black"/><text x="{tx:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 4.0,
            TOP + ph + 16.0,
            offset + i as i64
        );
        if n == 1 {
            break;
        }
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">value</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.3}" text-anchor="middle" transform="rotate(-90 14 {:.3})">probability</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    // legend
    let lx = LEFT + pw - 180.0;
    let mut ly = TOP + 8.0;
    let _ = writeln!(
        svg,
        r#"<rect x="{lx:.3}" y="{:.3}" width="10" height="10" fill="{BAR_COLOR}"/><text x="{:.3}" y="{:.3}">empirical</text>"#,
        ly - 8.0,
        lx + 16.0,
        ly + 1.0
    );
    for (idx, s) in lines.iter().enumerate() {
        ly += 16.0;
        let is_truth = truth.is_some() && idx == lines.len() - 1;
        let color = if is_truth { TRUTH_COLOR } else { PALETTE[idx % PALETTE.len()] };
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{color}" stroke-width="2"/><text x="{:.3}" y="{:.3}">{}</text>"#,
            ly - 3.0,
            lx + 10.0,
            ly - 3.0,
            lx + 16.0,
            ly + 1.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

enum YAxis {
    Linear { max: f64 },
    Log { lo: f64, hi: f64 },
}

impl YAxis {
    fn linear(max: f64) -> Self {
        YAxis::Linear {
            max: if max > 0.0 { max * 1.05 } else { 1.0 },
        }
    }

    fn log(min_pos: f64, max: f64) -> Self {
        if !min_pos.is_finite() || max <= 0.0 {
            return YAxis::Log { lo: -1.0, hi: 0.0 };
        }
        let lo = min_pos.max(LOG_FLOOR_MIN).log10().floor();
        let hi = max.log10().ceil().max(lo + 1.0);
        YAxis::Log { lo, hi }
    }

    /// Position of `v` within the axis, in `[0, 1]`.
    fn frac(&self, v: f64) -> f64 {
        match *self {
            YAxis::Linear { max } => (v / max).clamp(0.0, 1.0),
            YAxis::Log { lo, hi } => {
                let floor = 10f64.powf(lo);
                ((v.max(floor).log10() - lo) / (hi - lo)).clamp(0.0, 1.0)
            }
        }
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        match *self {
            YAxis::Linear { max } => (0..=4).map(|t| {
                let v = max * t as f64 / 4.0;
                (v, format!("{v:.3}"))
            })
            .collect(),
            YAxis::Log { lo, hi } => {
                let step = ((hi - lo) / 6.0).ceil().max(1.0) as i32;
                (lo as i32..=hi as i32)
                    .step_by(step as usize)
                    .map(|e| (10f64.powi(e), format!("1e{e}")))
                    .collect()
            }
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
