//! Command-line surface: one subcommand per figure family, CSV/JSON output
//! and a `manifest.json` describing every run.
//!
//! Exit codes: 0 success, 1 configuration error, 2 nothing passed the
//! filter at any point, 3 oracle deviation above the bound.

mod commands;
pub mod config;
mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{parse_angle, Angle, Format, RunConfig};
pub use output::Cell;

use crate::error::{Error, Result};
use output::Output;

#[derive(Debug, Parser)]
#[command(name = "macroqubit", version, about = "Measurement-induced operations on amplified macro-qubits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Injection probability conditioned on the reflected intensity.
    Distill(RunArgs),
    /// Transmitted visibility against the reflected orthogonality threshold.
    Visibility(RunArgs),
    /// Probability that the reflected orthogonality filter opens the shutter.
    Activation(RunArgs),
    /// Balanced split with orthogonality filters on both halves.
    DoubleFilter(RunArgs),
    /// Two-branch pre-selection: fringes, best visibility and pass rate.
    Preselect(RunArgs),
    /// Micro-macro CHSH sweep under pre-selection.
    Chsh(RunArgs),
    /// Closed forms against dense state-vector evolution.
    OracleCheck(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Distill(_) => "distill",
            Command::Visibility(_) => "visibility",
            Command::Activation(_) => "activation",
            Command::DoubleFilter(_) => "double-filter",
            Command::Preselect(_) => "preselect",
            Command::Chsh(_) => "chsh",
            Command::OracleCheck(_) => "oracle-check",
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Distill(a)
            | Command::Visibility(a)
            | Command::Activation(a)
            | Command::DoubleFilter(a)
            | Command::Preselect(a)
            | Command::Chsh(a)
            | Command::OracleCheck(a) => a,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct IntList(pub Vec<i64>);
#[derive(Debug, Clone, Default)]
pub struct RealList(pub Vec<f64>);
#[derive(Debug, Clone, Default)]
pub struct AngleList(pub Vec<Angle>);

fn int_list(s: &str) -> Result<IntList> {
    config::parse_int_list(s).map(IntList)
}

fn real_list(s: &str) -> Result<RealList> {
    config::parse_real_list(s).map(RealList)
}

fn angle_list(s: &str) -> Result<AngleList> {
    config::parse_angle_list(s).map(AngleList)
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON file with any RunConfig fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Amplifier gain.
    #[arg(long)]
    pub g: Option<f64>,
    /// Transmittivity of the unbalanced splitter.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Injection probabilities, e.g. `0.1,0.5`.
    #[arg(long, value_parser = real_list)]
    pub p: Option<RealList>,
    /// Filter thresholds, e.g. `0..10` or `0,3,5`.
    #[arg(long, value_parser = int_list)]
    pub k: Option<IntList>,
    /// Intensity or transmitted thresholds.
    #[arg(long, value_parser = int_list, allow_hyphen_values = true)]
    pub h: Option<IntList>,
    /// Pre-selection angles (or the reflected basis), radians, e.g. `pi/4`.
    #[arg(long, value_parser = angle_list, allow_hyphen_values = true)]
    pub phi: Option<AngleList>,
    /// Injection, analysis or measurement bases, radians.
    #[arg(long, value_parser = angle_list, allow_hyphen_values = true)]
    pub beta: Option<AngleList>,
    /// Points of the angle grid.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Truncation and pruning budget.
    #[arg(long)]
    pub eps_trunc: Option<f64>,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl RunArgs {
    fn flags(&self) -> RunConfig {
        RunConfig {
            g: self.g,
            tau: self.tau,
            epsilon_trunc: self.eps_trunc,
            thresholds: self.k.clone().map(|l| l.0),
            h: self.h.clone().map(|l| l.0),
            bases: self.beta.clone().map(|l| l.0),
            phi: self.phi.clone().map(|l| l.0),
            alpha_grid: self.grid,
            p: self.p.clone().map(|l| l.0),
            output_dir: self.out.clone(),
            format: self.format,
            jobs: self.jobs,
        }
    }

    /// Flags merged over the config file, validated.
    pub fn resolve(&self) -> Result<RunConfig> {
        let base = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let cfg = self.flags().over(base);
        cfg.validate()?;
        Ok(cfg)
    }
}

/// What a finished run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub files: Vec<String>,
    pub points: usize,
    pub flagged: usize,
    pub oracle_passed: bool,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if !self.oracle_passed {
            3
        } else if self.points > 0 && self.flagged == self.points {
            2
        } else {
            0
        }
    }
}

pub fn exit_code(result: &Result<RunSummary>) -> i32 {
    match result {
        Ok(s) => s.exit_code(),
        Err(Error::NoEventsPass(_)) => 2,
        Err(_) => 1,
    }
}

/// Runs one subcommand with a config that has already been resolved.
pub fn run_with(command: &Command, cfg: &RunConfig) -> Result<RunSummary> {
    let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    let mut out = Output::new(&dir, cfg.format.unwrap_or_default())?;
    let work = |out: &mut Output| -> Result<(serde_json::Value, bool)> {
        match command {
            Command::Distill(_) => commands::distill(cfg, out).map(|v| (v, true)),
            Command::Visibility(_) => commands::visibility(cfg, out).map(|v| (v, true)),
            Command::Activation(_) => commands::activation(cfg, out).map(|v| (v, true)),
            Command::DoubleFilter(_) => commands::double_filter(cfg, out).map(|v| (v, true)),
            Command::Preselect(_) => commands::preselect(cfg, out).map(|v| (v, true)),
            Command::Chsh(_) => commands::chsh(cfg, out).map(|v| (v, true)),
            Command::OracleCheck(_) => commands::oracle_check(cfg, out),
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let (parameters, oracle_passed) = pool.install(|| work(&mut out))?;
    let gain = parameters["g"].as_f64().unwrap_or(1.2);
    let eps = cfg.epsilon_trunc.unwrap_or(crate::amplifier::DEFAULT_EPS_TRUNC);
    let truncation = commands::truncation(gain, eps)?;
    let (points, flagged) = (out.counters().points, out.counters().flagged);
    let files = out.finish(command.name(), parameters, truncation)?;
    Ok(RunSummary {
        files,
        points,
        flagged,
        oracle_passed,
    })
}

pub fn run(command: &Command) -> Result<RunSummary> {
    let cfg = command.args().resolve()?;
    run_with(command, &cfg)
}

/// Parses `args`, runs, reports errors on stderr and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = run(&cli.command);
    match &result {
        Ok(s) => {
            for f in &s.files {
                println!("{f}");
            }
            if s.exit_code() == 2 {
                eprintln!("error: no events pass the selection at any point");
            }
            if s.exit_code() == 3 {
                eprintln!("error: oracle deviation above {:e}", crate::oracle::ORACLE_BOUND);
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    exit_code(&result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_parse_into_config() {
        let cli = Cli::try_parse_from([
            "macroqubit", "preselect", "--g", "1.0", "--k", "0,3", "--phi", "pi/4,pi/8", "--beta", "-pi/4", "--grid", "9",
        ])
        .unwrap();
        let cfg = cli.command.args().resolve().unwrap();
        assert_eq!(cfg.g, Some(1.0));
        assert_eq!(cfg.thresholds, Some(vec![0, 3]));
        assert_eq!(cfg.phi.as_ref().unwrap().len(), 2);
        assert!((cfg.bases.as_ref().unwrap()[0].0 + std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert_eq!(cfg.alpha_grid, Some(9));
        assert_eq!(cli.command.name(), "preselect");
    }

    #[test]
    fn bad_input_exits_with_one() {
        assert_eq!(main_with_args(["macroqubit", "distill", "--phi", "30deg"]), 1);
        assert_eq!(main_with_args(["macroqubit", "distill", "--tau", "1.5"]), 1);
        assert_eq!(main_with_args(["macroqubit", "nonsense"]), 1);
    }

    #[test]
    fn exit_codes() {
        let s = RunSummary { files: vec![], points: 4, flagged: 4, oracle_passed: true };
        assert_eq!(s.exit_code(), 2);
        let s = RunSummary { flagged: 1, ..s };
        assert_eq!(s.exit_code(), 0);
        let s = RunSummary { oracle_passed: false, ..s };
        assert_eq!(s.exit_code(), 3);
        assert_eq!(exit_code(&Err(Error::Config("x".into()))), 1);
    }
}
