use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Marker written in place of `y` where no event passed the filter.
pub const NO_EVENTS: &str = "no_events";

/// A labelled `(x, y)` series. `y` is `None` where the conditioning event
/// had zero probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveResult {
    pub x_label: String,
    pub y_label: String,
    pub meta: BTreeMap<String, f64>,
    pub samples: Vec<(f64, Option<f64>)>,
}

/// Fixed 12-significant-digit rendering used for every emitted number.
pub fn format_sig12(v: f64) -> String {
    if v == 0.0 {
        return "0.00000000000e0".to_string();
    }
    format!("{v:.11e}")
}

impl CurveResult {
    pub fn new(x_label: impl Into<String>, y_label: impl Into<String>, samples: Vec<(f64, Option<f64>)>) -> Result<Self> {
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::Structural("curve x values must be strictly increasing".into()));
        }
        Ok(CurveResult {
            x_label: x_label.into(),
            y_label: y_label.into(),
            meta: BTreeMap::new(),
            samples,
        })
    }

    pub fn with_meta(mut self, key: &str, value: f64) -> Self {
        self.meta.insert(key.to_string(), value);
        self
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.0)
    }

    /// Unflagged values in order.
    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().filter_map(|s| s.1)
    }

    pub fn flagged(&self) -> usize {
        self.samples.iter().filter(|s| s.1.is_none()).count()
    }

    /// Columns `x, y` then one column per metadata key.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![self.x_label.clone(), self.y_label.clone()];
        header.extend(self.meta.keys().cloned());
        w.write_record(&header)?;
        let meta: Vec<String> = self.meta.values().map(|v| format_sig12(*v)).collect();
        for (x, y) in &self.samples {
            let mut row = vec![format_sig12(*x), y.map(format_sig12).unwrap_or_else(|| NO_EVENTS.to_string())];
            row.extend(meta.iter().cloned());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Structural(e.to_string()))
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
