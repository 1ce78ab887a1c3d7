//! File emission and the per-run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use super::config::Format;
use crate::analysis::{format_sig12, CurveResult, NO_EVENTS};
use crate::error::Result;

/// One cell of a wide table.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    /// A point where nothing passed the filter.
    Flag,
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Flag, Cell::Num)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_sig12(*v),
            Cell::Flag => NO_EVENTS.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Flag => Value::Null,
            Cell::Text(s) => json!(s),
        }
    }
}

/// Parameter value rendered for a file name.
pub fn tag(v: f64) -> String {
    format!("{v}")
}

/// Angle rendered for a file name.
pub fn angle_tag(v: f64) -> String {
    format!("{v:.4}")
}

#[derive(Debug, Default, Serialize)]
pub struct Counters {
    pub points: usize,
    pub flagged: usize,
}

/// Collects every file written by one run.
pub struct Output {
    dir: PathBuf,
    format: Format,
    files: Vec<String>,
    warnings: Vec<String>,
    counters: Counters,
}

impl Output {
    pub fn new(dir: &Path, format: Format) -> Result<Output> {
        fs::create_dir_all(dir)?;
        Ok(Output {
            dir: dir.to_path_buf(),
            format,
            files: Vec::new(),
            warnings: Vec::new(),
            counters: Counters::default(),
        })
    }

    fn write(&mut self, name: String, contents: &str) -> Result<()> {
        fs::write(self.dir.join(&name), contents)?;
        self.files.push(name);
        Ok(())
    }

    pub fn curve(&mut self, stem: &str, curve: &CurveResult) -> Result<()> {
        self.counters.points += curve.samples.len();
        self.counters.flagged += curve.flagged();
        if self.format.csv() {
            self.write(format!("{stem}.csv"), &curve.to_csv_string()?)?;
        }
        if self.format.json() {
            self.write(format!("{stem}.json"), &curve.to_json_string()?)?;
        }
        Ok(())
    }

    /// A table whose flagged cells count toward the no-events tally.
    pub fn table(&mut self, stem: &str, header: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
        for row in rows {
            for cell in row {
                if let Cell::Num(_) | Cell::Flag = cell {
                    self.counters.points += 1;
                }
                if *cell == Cell::Flag {
                    self.counters.flagged += 1;
                }
            }
        }
        if self.format.csv() {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header)?;
            for row in rows {
                w.write_record(row.iter().map(Cell::csv))?;
            }
            let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))?;
            self.write(format!("{stem}.csv"), &String::from_utf8_lossy(&bytes))?;
        }
        if self.format.json() {
            let rows: Vec<Vec<Value>> = rows.iter().map(|r| r.iter().map(Cell::json).collect()).collect();
            let text = serde_json::to_string_pretty(&json!({ "columns": header, "rows": rows }))?;
            self.write(format!("{stem}.json"), &text)?;
        }
        Ok(())
    }

    pub fn warn(&mut self, message: String) {
        eprintln!("warning: {message}");
        self.warnings.push(message);
    }

    pub fn counters(&self) -> &Counters {
        &self.counters
    }

    /// Writes `manifest.json` with the resolved parameters and truncation.
    pub fn finish(mut self, command: &str, parameters: Value, truncation: Value) -> Result<Vec<String>> {
        let manifest = json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "parameters": parameters,
            "truncation": truncation,
            "files": self.files,
            "warnings": self.warnings,
            "points": self.counters.points,
            "flagged_points": self.counters.flagged,
        });
        let text = serde_json::to_string_pretty(&manifest)?;
        self.write("manifest.json".into(), &text)?;
        Ok(self.files)
    }
}
