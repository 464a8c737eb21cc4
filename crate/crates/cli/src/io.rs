//! CSV input and output helpers.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{csv_err, io_err, CliError, CliResult};

/// A series read from CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesInput {
    pub values: Vec<f64>,
    pub truth: Option<Vec<f64>>,
    pub change_points: Option<Vec<usize>>,
}

fn display(path: &Path) -> String {
    if path == Path::new("-") {
        "<stdin>".to_string()
    } else {
        path.display().to_string()
    }
}

pub fn open_input(path: &Path) -> CliResult<Box<dyn Read>> {
    if path == Path::new("-") {
        Ok(Box::new(io::stdin()))
    } else {
        Ok(Box::new(File::open(path).map_err(io_err(path))?))
    }
}

/// Buffered writer to `path`, or standard output when `path` is `None`.
pub fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    match path {
        Some(p) if p != Path::new("-") => {
            Ok(Box::new(BufWriter::new(File::create(p).map_err(io_err(p))?)))
        }
        _ => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

/// Reads either a single headerless numeric column, or a CSV with a header
/// row containing a `value` column (and optionally `truth` and
/// `is_change_point`, as written by `generate`).
pub fn read_series(path: &Path) -> CliResult<SeriesInput> {
    read_series_column(path, "value")
}

/// As [`read_series`], taking the data from the header column `column`.
pub fn read_series_column(path: &Path, column: &str) -> CliResult<SeriesInput> {
    let origin = display(path);
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(open_input(path)?);
    let records: Vec<csv::StringRecord> = rdr
        .records()
        .collect::<Result<_, _>>()
        .map_err(csv_err(PathBuf::from(&origin)))?;
    let parse_err = |line: usize, msg: String| CliError::Parse {
        origin: origin.clone(),
        line,
        msg,
    };

    let first = records
        .iter()
        .position(|r| !(r.len() == 1 && r[0].is_empty()))
        .ok_or_else(|| parse_err(1, "input is empty".into()))?;
    let header_row = &records[first];
    let has_header = header_row.get(0).is_some_and(|f| f.parse::<f64>().is_err());
    let (value_col, truth_col, cp_col) = if has_header {
        let find = |name: &str| header_row.iter().position(|h| h.eq_ignore_ascii_case(name));
        let v = find(column).ok_or_else(|| {
            parse_err(first + 1, format!("header has no '{column}' column"))
        })?;
        (v, find("truth"), find("is_change_point"))
    } else {
        (0, None, None)
    };

    let mut values = Vec::new();
    let mut truth = truth_col.map(|_| Vec::new());
    let mut cps = cp_col.map(|_| Vec::new());
    let body = if has_header { first + 1 } else { first };
    for (i, rec) in records.iter().enumerate().skip(body) {
        let line = i + 1;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        let field = |col: usize, what: &str| -> CliResult<&str> {
            rec.get(col)
                .ok_or_else(|| parse_err(line, format!("missing {what} column")))
        };
        let num = |col: usize, what: &str| -> CliResult<f64> {
            let s = field(col, what)?;
            s.parse::<f64>()
                .map_err(|_| parse_err(line, format!("cannot parse {what} '{s}' as a number")))
        };
        values.push(num(value_col, column)?);
        if let (Some(t), Some(col)) = (truth.as_mut(), truth_col) {
            t.push(num(col, "truth")?);
        }
        if let (Some(c), Some(col)) = (cps.as_mut(), cp_col) {
            if num(col, "is_change_point")? != 0.0 {
                c.push(values.len() - 1);
            }
        }
    }
    if values.is_empty() {
        return Err(parse_err(body + 1, "input has no data rows".into()));
    }
    Ok(SeriesInput {
        values,
        truth,
        change_points: cps,
    })
}
