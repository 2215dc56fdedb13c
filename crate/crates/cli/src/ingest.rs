//! Reading raw samples and mapping them onto a nonnegative integer support.
//!
//! Two input layouts are accepted:
//!
//! - lines: one number per line; blank lines and lines starting with `#`
//!   are skipped.
//! - csv: a header row followed by records; one column is selected by
//!   header name or by 0-based index. Empty cells are errors.
//!
//! Preprocessing runs in a fixed order: multiply by `scale` and round to the
//! nearest integer (only when a scale is given; otherwise values must already
//! be integers), drop zeros, then subtract the minimum when `shift_min` is
//! set. The subtracted amount is reported as the support offset so results
//! can be mapped back to original values.

use std::io::{BufRead, BufReader, Read};

use crate::error::{CliError, CliResult};

/// Largest support the CLI will allocate a histogram for.
pub const MAX_SUPPORT: u64 = 1 << 28;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    Name(String),
    Index(usize),
}

impl Column {
    /// A selector that parses as an unsigned integer is an index.
    pub fn parse(s: &str) -> Self {
        match s.parse::<usize>() {
            Ok(i) => Column::Index(i),
            Err(_) => Column::Name(s.to_owned()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputFormat {
    Lines,
    Csv(Column),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestSpec {
    pub format: InputFormat,
    pub drop_zeros: bool,
    pub shift_min: bool,
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    /// Values on the internal support, all `>= 0`.
    pub values: Vec<i64>,
    /// Add to an internal value to recover the original one.
    pub offset: i64,
    /// Raw records read before any filtering.
    pub records: usize,
}

pub fn ingest<R: Read>(spec: &IngestSpec, input: R) -> CliResult<Ingested> {
    if let Some(s) = spec.scale {
        if !s.is_finite() || s == 0.0 {
            return Err(CliError::usage(format!("--scale must be finite and nonzero, got {s}")));
        }
    }
    let raw = match &spec.format {
        InputFormat::Lines => read_lines(input, spec.scale)?,
        InputFormat::Csv(col) => read_csv(input, col, spec.scale)?,
    };
    let records = raw.len();

    let mut kept: Vec<(u64, i64)> = raw;
    if spec.drop_zeros {
        kept.retain(|&(_, v)| v != 0);
    }
    if kept.is_empty() {
        return Err(CliError::usage("no samples left to estimate from"));
    }

    let mut offset = 0;
    if spec.shift_min {
        offset = kept.iter().map(|&(_, v)| v).min().expect("nonempty");
        for (_, v) in kept.iter_mut() {
            *v = v.checked_sub(offset).ok_or_else(|| CliError::usage("value range overflows i64"))?;
        }
    } else if let Some(&(line, v)) = kept.iter().find(|&&(_, v)| v < 0) {
        return Err(CliError::Parse {
            line,
            message: format!("negative value {v}; pass --shift-min to shift the data onto [0, ..)"),
        });
    }

    let max = kept.iter().map(|&(_, v)| v).max().expect("nonempty") as u64;
    if max >= MAX_SUPPORT {
        return Err(CliError::usage(format!(
            "value range spans {} cells, above the limit of {MAX_SUPPORT}; rescale or shift the data",
            max as u128 + 1
        )));
    }
    Ok(Ingested {
        values: kept.into_iter().map(|(_, v)| v).collect(),
        offset,
        records,
    })
}

fn read_lines<R: Read>(input: R, scale: Option<f64>) -> CliResult<Vec<(u64, i64)>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let lineno = i as u64 + 1;
        let line = line.map_err(|e| CliError::Parse {
            line: lineno,
            message: format!("unreadable input: {e}"),
        })?;
        let field = line.trim();
        if field.is_empty() || field.starts_with('#') {
            continue;
        }
        out.push((lineno, parse_value(field, scale, lineno)?));
    }
    Ok(out)
}

fn read_csv<R: Read>(input: R, column: &Column, scale: Option<f64>) -> CliResult<Vec<(u64, i64)>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| CliError::Parse {
            line: 1,
            message: format!("unreadable csv header: {e}"),
        })?
        .clone();
    let idx = match column {
        Column::Index(i) if *i < headers.len() => *i,
        Column::Index(i) => {
            return Err(CliError::usage(format!(
                "column index {i} out of range; the header has {} columns",
                headers.len()
            )))
        }
        Column::Name(name) => headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::usage(format!("no column named {name:?} in the csv header")))?,
    };

    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: format!("malformed csv record: {e}"),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = record.get(idx).map(str::trim).unwrap_or("");
        if field.is_empty() {
            return Err(CliError::Parse {
                line,
                message: format!("missing value in column {}", idx),
            });
        }
        out.push((line, parse_value(field, scale, line)?));
    }
    Ok(out)
}

fn parse_value(field: &str, scale: Option<f64>, line: u64) -> CliResult<i64> {
    let bad = |message: String| CliError::Parse { line, message };
    if scale.is_none() {
        if let Ok(v) = field.parse::<i64>() {
            return Ok(v);
        }
    }
    let x: f64 = field
        .parse()
        .map_err(|_| bad(format!("{field:?} is not a number")))?;
    if !x.is_finite() {
        return Err(bad(format!("{field:?} is not finite")));
    }
    let y = match scale {
        Some(s) => (x * s).round(),
        None if x.fract() == 0.0 => x,
        None => return Err(bad(format!("{field:?} is not an integer; use --scale to rescale and round"))),
    };
    if y.abs() > 2f64.powi(62) {
        return Err(bad(format!("{field:?} is out of range after scaling")));
    }
    Ok(y as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lines(drop_zeros: bool, shift_min: bool, scale: Option<f64>) -> IngestSpec {
        IngestSpec {
            format: InputFormat::Lines,
            drop_zeros,
            shift_min,
            scale,
        }
    }

    #[test]
    fn plain_lines() {
        let got = ingest(&lines(false, false, None), "3\n\n# note\n0\n 7 \n".as_bytes()).unwrap();
        assert_eq!(got.values, vec![3, 0, 7]);
        assert_eq!(got.offset, 0);
        assert_eq!(got.records, 3);
    }

    #[test]
    fn negative_without_shift_reports_line() {
        let err = ingest(&lines(false, false, None), "1\n2\n-4\n".as_bytes()).unwrap_err();
        match err {
            CliError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shift_records_minimum() {
        let got = ingest(&lines(false, true, None), "-2\n5\n-7\n".as_bytes()).unwrap();
        assert_eq!(got.offset, -7);
        assert_eq!(got.values, vec![5, 12, 0]);
    }

    #[test]
    fn scale_rounds_before_dropping_zeros() {
        // 0.0004 * 1000 rounds to 0 and is dropped
        let got = ingest(&lines(true, false, Some(1000.0)), "0.0004\n0.034\n1.2\n".as_bytes()).unwrap();
        assert_eq!(got.values, vec![34, 1200]);
    }

    #[test]
    fn fractional_without_scale_rejected() {
        let err = ingest(&lines(false, false, None), "1\n2.5\n".as_bytes()).unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 2, .. }));
        assert!(ingest(&lines(false, false, None), "4.0\n".as_bytes()).is_ok());
    }

    #[test]
    fn garbage_reports_line() {
        let err = ingest(&lines(false, false, None), "1\n\nabc\n".as_bytes()).unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 3, .. }));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn csv_by_name_and_index() {
        let data = "id,balance\n1,10\n2,-3\n3,0\n";
        let by_name = IngestSpec {
            format: InputFormat::Csv(Column::parse("balance")),
            drop_zeros: true,
            shift_min: true,
            scale: None,
        };
        let got = ingest(&by_name, data.as_bytes()).unwrap();
        assert_eq!(got.offset, -3);
        assert_eq!(got.values, vec![13, 0]);

        let by_index = IngestSpec {
            format: InputFormat::Csv(Column::parse("0")),
            ..by_name
        };
        assert_eq!(ingest(&by_index, data.as_bytes()).unwrap().values, vec![0, 1, 2]);
    }

    #[test]
    fn csv_errors() {
        let spec = IngestSpec {
            format: InputFormat::Csv(Column::parse("x")),
            drop_zeros: false,
            shift_min: false,
            scale: None,
        };
        assert!(matches!(ingest(&spec, "y\n1\n".as_bytes()), Err(CliError::Usage(_))));
        let err = ingest(&spec, "x,y\n1,2\n,3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 3, .. }));
    }

    #[test]
    fn all_zero_dropped_is_usage_error() {
        assert!(matches!(
            ingest(&lines(true, false, None), "0\n0\n".as_bytes()),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn huge_range_rejected() {
        let input = format!("0\n{}\n", MAX_SUPPORT);
        assert!(ingest(&lines(false, false, None), input.as_bytes()).is_err());
    }
}
