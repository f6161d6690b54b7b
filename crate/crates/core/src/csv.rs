//! Numeric CSV tables.
//!
//! Output is comma-separated with a mandatory header row, LF line endings and
//! every value in scientific notation with 17 significant digits, which
//! round-trips `f64` exactly. Metadata precedes the header as `# key: value`
//! comment lines.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    meta: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<f64>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == columns.len()));
        Table {
            meta: Vec::new(),
            columns,
            rows,
        }
    }

    pub fn push_meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.meta.push((key.into(), value.into()));
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.push_meta(key, value);
        self
    }

    pub fn meta(&self) -> &[(String, String)] {
        &self.meta
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let v = v.replace(['\n', '\r'], " ");
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format_number(*x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut meta = Vec::new();
        let mut lines = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l));
        let header = loop {
            match lines.next() {
                None => return Err(Error::Schema("CSV has no header row".into())),
                Some(line) if line.trim_start().starts_with('#') => {
                    let body = line.trim_start()[1..].trim_start();
                    if let Some((k, v)) = body.split_once(':') {
                        meta.push((k.trim().to_string(), v.trim().to_string()));
                    }
                }
                Some(line) if line.trim().is_empty() => {}
                Some(line) => break line,
            }
        };
        let columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
        if columns.iter().any(|c| c.is_empty()) {
            return Err(Error::Schema("empty column name in header".into()));
        }
        let mut rows = Vec::new();
        for (k, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|cell| {
                    cell.trim().parse::<f64>().map_err(|_| {
                        Error::Parse(format!("row {}: '{}' is not a number", k + 1, cell.trim()))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != columns.len() {
                return Err(Error::Schema(format!(
                    "row {} has {} cells, header has {}",
                    k + 1,
                    row.len(),
                    columns.len()
                )));
            }
            rows.push(row);
        }
        Ok(Table {
            meta,
            columns,
            rows,
        })
    }
}

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}
