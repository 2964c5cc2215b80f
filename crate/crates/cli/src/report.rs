//! Run reports and data files.
//!
//! Every run writes `report.json` with the tool version, the resolved
//! configuration, the seed, and the numerical results including error bars,
//! so a run can be reproduced from its report alone.  Tables go to CSV files
//! that begin with a versioned schema line; plot-ready columns go to `.dat`
//! files with whitespace-separated values.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

pub const CSV_SCHEMA_VERSION: &str = "v1";

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub directions: usize,
    pub config: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
    pub results: Value,
}

impl Report {
    pub fn new(
        command: &'static str,
        seed: u64,
        directions: usize,
        config: Value,
        with_timestamp: bool,
        results: Value,
    ) -> Self {
        let timestamp_unix = with_timestamp.then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Self {
            tool: "rieszcap",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            directions,
            config,
            timestamp_unix,
            results,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_report(out_dir: &Path, report: &Report) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let path = out_dir.join("report.json");
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Config(format!("report serialization failed: {e}")))?;
    text.push('\n');
    std::fs::write(&path, text).map_err(io_err(&path))?;
    Ok(path)
}

/// One cell of a table row; floats render via Rust's shortest round-trip
/// formatting so reruns are identical to the last digit.
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

fn render(cell: &Cell) -> String {
    match cell {
        Cell::Float(v) => format!("{}", normalize(*v)),
        Cell::Int(v) => format!("{v}"),
        Cell::Text(s) => s.clone(),
    }
}

/// Map negative zero to zero so tables never print `-0`.
fn normalize(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// CSV with a schema comment line first, then the column header.
pub fn write_csv(
    out_dir: &Path,
    name: &str,
    columns: &[&str],
    rows: &[Vec<Cell>],
) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let path = out_dir.join(name);
    let stem = name.trim_end_matches(".csv");
    let mut text = format!("# rieszcap-csv {CSV_SCHEMA_VERSION} {stem}\n");
    text.push_str(&columns.join(","));
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        let line: Vec<String> = row.iter().map(render).collect();
        text.push_str(&line.join(","));
        text.push('\n');
    }
    std::fs::write(&path, text).map_err(io_err(&path))?;
    Ok(path)
}

/// Whitespace-separated columns for plotting; `#`-prefixed header.
pub fn write_dat(
    out_dir: &Path,
    name: &str,
    columns: &[&str],
    rows: &[Vec<f64>],
) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let path = out_dir.join(name);
    let mut text = format!("# {}\n", columns.join(" "));
    for row in rows {
        let mut line = String::new();
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            let _ = write!(line, "{}", normalize(*v));
        }
        text.push_str(&line);
        text.push('\n');
    }
    std::fs::write(&path, text).map_err(io_err(&path))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_schema_line_then_header() {
        let dir = std::env::temp_dir().join("rieszcap-csv-test");
        let rows = vec![vec![Cell::from(0.5), Cell::from(2usize)]];
        let path = write_csv(&dir, "sample.csv", &["x", "n"], &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# rieszcap-csv v1 sample"));
        assert_eq!(lines.next(), Some("x,n"));
        assert_eq!(lines.next(), Some("0.5,2"));
        std::fs::remove_dir_all(&dir).ok();
    }
}
