//! Report model and table export.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::LabError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub seed: u64,
    pub passed: bool,
    /// `suite N (kind) anchor: detail` for the first failed check.
    pub first_failure: Option<String>,
    pub suites: Vec<SuiteReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub index: usize,
    pub kind: String,
    pub function: String,
    pub checks: Vec<Check>,
    pub measured: serde_json::Value,
    pub tables: Vec<Table>,
}

/// One named inequality, keyed by its anchor (e.g. `eq7a`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub anchor: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(anchor: &str, passed: bool, detail: String) -> Self {
        Self { anchor: anchor.to_owned(), passed, detail }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.to_owned(), columns: columns.iter().map(|c| (*c).to_owned()).collect(), rows: Vec::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| sig12(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// `v` with 12 significant digits, trailing zeros dropped; integers print
/// without a fraction.
pub fn sig12(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_owned() } else { s };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{v:.11e}");
        let (mantissa, e) = s.split_once('e').expect("scientific format");
        let mantissa =
            if mantissa.contains('.') { mantissa.trim_end_matches('0').trim_end_matches('.') } else { mantissa };
        let mut out = String::new();
        write!(out, "{mantissa}e{e}").unwrap();
        out
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|source| LabError::Io { path: path.to_owned(), source })?;
        serde_json::from_str(&text).map_err(|e| LabError::Report(format!("{}: {e}", path.display())))
    }
}

/// Writes every suite table to `dir` as `NN_<kind>_<name>.csv` (or `.json`).
pub fn export_tables(report: &Report, dir: &Path, format: Format) -> Result<Vec<PathBuf>, LabError> {
    std::fs::create_dir_all(dir).map_err(|source| LabError::Io { path: dir.to_owned(), source })?;
    let mut written = Vec::new();
    for suite in &report.suites {
        for table in &suite.tables {
            let stem = format!("{:02}_{}_{}", suite.index, suite.kind, table.name);
            let (path, body) = match format {
                Format::Csv => (dir.join(format!("{stem}.csv")), table.to_csv()),
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(table).expect("table serializes");
                    s.push('\n');
                    (dir.join(format!("{stem}.json")), s)
                }
            };
            std::fs::write(&path, body).map_err(|source| LabError::Io { path: path.clone(), source })?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_formatting() {
        assert_eq!(sig12(262144.0), "262144");
        assert_eq!(sig12(-2.0), "-2");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(-24.000000000000004), "-24");
        assert_eq!(sig12(1.5e-9), "1.5e-9");
        assert_eq!(sig12(123456789012345.0), "1.23456789012e14");
        assert_eq!(sig12(0.0), "0");
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut t = Table::new("curves", &["scale", "d", "u_log2", "v_log2"]);
        t.rows.push(vec![10.0, 1.0, -1.0, -2.0]);
        assert_eq!(t.to_csv(), "scale,d,u_log2,v_log2\n10,1,-1,-2\n");
    }
}
