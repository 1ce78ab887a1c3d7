//! Run configuration: JSON file merged under command-line flags.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

/// Parses an angle in radians: a plain number or a multiple of `pi` such as
/// `pi/4`, `-3pi/4`, `0.5*pi`. Degrees are rejected.
pub fn parse_angle(text: &str) -> Result<f64> {
    let t = text.trim().to_ascii_lowercase();
    if t.contains("deg") || t.contains('°') {
        return config_err(format!("angle `{text}`: angles are given in radians"));
    }
    let value = match t.find("pi") {
        None => t.parse::<f64>().map_err(|_| Error::Config(format!("angle `{text}` is not a number")))?,
        Some(at) => {
            let coef = t[..at].trim().trim_end_matches('*').trim();
            let coef = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| Error::Config(format!("angle `{text}` has a bad coefficient")))?,
            };
            let rest = t[at + 2..].trim();
            let den = if rest.is_empty() {
                1.0
            } else if let Some(d) = rest.strip_prefix('/') {
                d.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|d| *d > 0.0)
                    .ok_or_else(|| Error::Config(format!("angle `{text}` has a bad denominator")))?
            } else {
                return config_err(format!("angle `{text}` is not of the form [c]pi[/d]"));
            };
            coef * PI / den
        }
    };
    check_angle(value)
}

fn check_angle(value: f64) -> Result<f64> {
    if !value.is_finite() || value.abs() > 2.0 * PI + 1e-12 {
        return config_err(format!("angle {value} outside [-2 pi, 2 pi]; angles are in radians"));
    }
    Ok(value)
}

/// An angle in radians, read from JSON as a number or a `pi` expression.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Angle(pub f64);

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let v = match Raw::deserialize(d)? {
            Raw::Num(x) => check_angle(x),
            Raw::Text(s) => parse_angle(&s),
        };
        v.map(Angle).map_err(serde::de::Error::custom)
    }
}

/// Comma-separated integers, with inclusive ranges `a..b`.
pub fn parse_int_list(text: &str) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let parse = |s: &str| s.trim().trim_start_matches('=').parse::<i64>();
            match (parse(a), parse(b)) {
                (Ok(a), Ok(b)) if a <= b => out.extend(a..=b),
                _ => return config_err(format!("bad integer range `{part}`")),
            }
        } else {
            out.push(part.parse().map_err(|_| Error::Config(format!("`{part}` is not an integer")))?);
        }
    }
    if out.is_empty() {
        return config_err(format!("empty list `{text}`"));
    }
    Ok(out)
}

pub fn parse_real_list(text: &str) -> Result<Vec<f64>> {
    let out: Vec<f64> = text
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().map_err(|_| Error::Config(format!("`{p}` is not a number"))))
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return config_err(format!("empty list `{text}`"));
    }
    Ok(out)
}

pub fn parse_angle_list(text: &str) -> Result<Vec<Angle>> {
    let out: Vec<Angle> = text
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| parse_angle(p).map(Angle))
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return config_err(format!("empty list `{text}`"));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

/// Every tunable of a run. Unset fields take the per-command defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub g: Option<f64>,
    pub tau: Option<f64>,
    pub epsilon_trunc: Option<f64>,
    /// Reflected-arm or pre-selection thresholds `k`.
    pub thresholds: Option<Vec<i64>>,
    /// Intensity thresholds (distill) or transmitted thresholds (double-filter).
    pub h: Option<Vec<i64>>,
    pub bases: Option<Vec<Angle>>,
    pub phi: Option<Vec<Angle>>,
    pub alpha_grid: Option<usize>,
    pub p: Option<Vec<f64>>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            g: self.g.or(base.g),
            tau: self.tau.or(base.tau),
            epsilon_trunc: self.epsilon_trunc.or(base.epsilon_trunc),
            thresholds: self.thresholds.or(base.thresholds),
            h: self.h.or(base.h),
            bases: self.bases.or(base.bases),
            phi: self.phi.or(base.phi),
            alpha_grid: self.alpha_grid.or(base.alpha_grid),
            p: self.p.or(base.p),
            output_dir: self.output_dir.or(base.output_dir),
            format: self.format.or(base.format),
            jobs: self.jobs.or(base.jobs),
        }
    }

    /// Range checks that do not depend on the command.
    pub fn validate(&self) -> Result<()> {
        if let Some(g) = self.g {
            if !g.is_finite() || g < 0.0 {
                return config_err(format!("g = {g} must be finite and non-negative"));
            }
        }
        if let Some(tau) = self.tau {
            if !(tau > 0.0 && tau < 1.0) {
                return config_err(format!("tau = {tau} outside (0, 1)"));
            }
        }
        if let Some(eps) = self.epsilon_trunc {
            if !(eps > 0.0 && eps < 1e-3) {
                return config_err(format!("epsilon_trunc = {eps} outside (0, 1e-3)"));
            }
        }
        if let Some(ps) = &self.p {
            if let Some(p) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return config_err(format!("p = {p} outside [0, 1]"));
            }
        }
        if let Some(ks) = &self.thresholds {
            if let Some(k) = ks.iter().find(|k| **k < 0) {
                return config_err(format!("threshold k = {k} is negative"));
            }
        }
        if let Some(hs) = &self.h {
            if let Some(h) = hs.iter().find(|h| **h < -1) {
                return config_err(format!("threshold h = {h} below -1"));
            }
        }
        if let Some(n) = self.alpha_grid {
            if n < 3 {
                return config_err(format!("alpha_grid = {n} needs at least 3 points"));
            }
        }
        if self.jobs == Some(0) {
            return config_err("jobs must be at least 1");
        }
        Ok(())
    }
}
