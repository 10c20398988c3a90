//! Command-line value parsing and CSV ingestion.

use std::path::Path;

use chrono::{NaiveDate, NaiveDateTime};

use crate::CliError;

/// Comma-separated reals; the empty string is the empty list.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            let t = t.trim();
            match t.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(format!("'{t}' is not a finite number")),
            }
        })
        .collect()
}

pub fn parse_count_list(s: &str) -> Result<Vec<usize>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<usize>().map_err(|_| format!("'{t}' is not a count"))
        })
        .collect()
}

fn is_iso_date(s: &str) -> bool {
    let s = s.trim();
    NaiveDate::parse_from_str(s, "%Y-%m-%d").is_ok()
        || NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S").is_ok()
        || NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S").is_ok()
        || NaiveDate::parse_from_str(&format!("{s}-01"), "%Y-%m-%d").is_ok()
}

fn is_number(s: &str) -> bool {
    s.trim().parse::<f64>().is_ok()
}

/// How to read a returns file.
#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    /// `None` auto-detects a header from a non-numeric first row.
    pub header: Option<bool>,
    /// `Some(None)` disables date detection; `Some(Some(i))` forces column `i`.
    pub date_column: Option<Option<usize>>,
    pub percent: bool,
}

/// Numeric columns of a returns file.
#[derive(Debug, Clone)]
pub struct ReturnsTable {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    pub dates: Option<Vec<String>>,
}

impl ReturnsTable {
    pub fn read(path: &Path, opts: &CsvOptions) -> Result<Self, CliError> {
        let fail = |msg: String| CliError::Input(format!("{}: {msg}", path.display()));
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| fail(e.to_string()))?;
        let mut rows: Vec<Vec<String>> = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| fail(e.to_string()))?;
            rows.push(record.iter().map(str::to_string).collect());
        }
        if rows.is_empty() {
            return Err(fail("no rows".into()));
        }

        let header = opts
            .header
            .unwrap_or_else(|| rows[0].iter().any(|c| !is_number(c) && !is_iso_date(c)));
        let names: Vec<String> = if header {
            rows.remove(0)
        } else {
            (1..=rows[0].len()).map(|i| format!("column{i}")).collect()
        };
        if rows.is_empty() {
            return Err(fail("header but no data rows".into()));
        }
        let width = names.len();
        if let Some(i) = rows.iter().position(|r| r.len() != width) {
            return Err(fail(format!("row {} has {} fields, expected {width}", i + 1, rows[i].len())));
        }

        let date_col = match opts.date_column {
            Some(forced) => forced,
            None => (0..width).find(|&j| rows.iter().all(|r| is_iso_date(&r[j]))),
        };
        if let Some(j) = date_col {
            if j >= width {
                return Err(fail(format!("date column {j} out of range")));
            }
        }

        let scale = if opts.percent { 0.01 } else { 1.0 };
        let mut table = ReturnsTable {
            names: Vec::new(),
            columns: Vec::new(),
            dates: date_col.map(|j| rows.iter().map(|r| r[j].clone()).collect()),
        };
        for j in (0..width).filter(|&j| Some(j) != date_col) {
            let mut col = Vec::with_capacity(rows.len());
            for (i, r) in rows.iter().enumerate() {
                match r[j].parse::<f64>() {
                    Ok(v) if v.is_finite() => col.push(scale * v),
                    _ => {
                        return Err(fail(format!(
                            "row {}, column '{}': '{}' is not a finite number",
                            i + 1,
                            names[j],
                            r[j]
                        )))
                    }
                }
            }
            table.names.push(names[j].clone());
            table.columns.push(col);
        }
        if table.columns.is_empty() {
            return Err(fail("no numeric columns".into()));
        }
        Ok(table)
    }

    pub fn rows(&self) -> usize {
        self.columns[0].len()
    }

    /// Index of a column given by name or by 0-based position among the
    /// numeric columns.
    pub fn index(&self, key: &str) -> Result<usize, CliError> {
        if let Some(i) = self.names.iter().position(|n| n == key) {
            return Ok(i);
        }
        match key.parse::<usize>() {
            Ok(i) if i < self.columns.len() => Ok(i),
            _ => Err(CliError::Usage(format!(
                "no column '{key}' (numeric columns: {})",
                self.names.join(", ")
            ))),
        }
    }

    pub fn select(&self, keys: &[String]) -> Result<Vec<usize>, CliError> {
        keys.iter().map(|k| self.index(k)).collect()
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.columns[i].clone()
    }
}
