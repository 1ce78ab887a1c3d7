//! Closed-form versus dense comparisons used by the acceptance checks and
//! the `oracle-check` command.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{amplify, max_deviation, Cutoff, DenseState, FockSpace, ProbabilityTable};
use crate::amplifier::{macroqubit_state, spontaneous_state};
use crate::error::Result;
use crate::fock::ModePair;
use crate::splitter::{conditional_transmitted, three_way_split_in, ubs_joint_in};

/// Largest tolerated deviation between closed form and dense evolution.
pub const ORACLE_BOUND: f64 = 1e-9;

/// Truncations used by the dense side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Amplifier tables are compared on occupations up to this per mode.
    pub window: u32,
    /// Per-mode cutoff of the dense amplifier evolution.
    pub evolution_cutoff: u32,
    /// Total-photon cutoff of the four-mode split space.
    pub split_total: u32,
    /// Total-photon cutoff of the six-mode three-way space.
    pub three_way_total: u32,
    pub tau: f64,
    pub eps_trunc: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            window: 12,
            evolution_cutoff: 24,
            split_total: 24,
            three_way_total: 16,
            tau: 0.9,
            eps_trunc: 1e-15,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub g: f64,
    pub max_deviation: f64,
    pub compared: usize,
    pub leakage: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.max_deviation < ORACLE_BOUND
    }
}

fn total(key: &[u32]) -> u32 {
    key.iter().sum()
}

/// Dense amplified `pi_beta`, written in basis `beta` on a two-mode total cutoff.
fn dense_macroqubit(beta: f64, g: f64, cfg: &OracleConfig, total_cut: u32) -> Result<DenseState> {
    let space = FockSpace::new(2, Cutoff::PerMode(cfg.evolution_cutoff));
    let seed = DenseState::from_amplitudes(
        &space,
        [
            (vec![1, 0], Complex64::new(FRAC_1_SQRT_2, 0.0)),
            (vec![0, 1], Complex64::from_polar(FRAC_1_SQRT_2, beta)),
        ],
    )?;
    let amplified = amplify(&seed, g)?;
    amplified.embed(&FockSpace::new(2, Cutoff::Total(total_cut)))?.linear_to_equatorial(0, 1, beta)
}

fn report(name: String, g: f64, closed: &ProbabilityTable, dense: &ProbabilityTable, leakage: f64) -> Result<SuiteReport> {
    Ok(SuiteReport {
        name,
        g,
        max_deviation: max_deviation(closed, dense)?,
        compared: closed.len().max(dense.len()),
        leakage,
    })
}

/// Photon-number table of the amplified `pi_beta`, and of the amplified
/// vacuum, on the per-mode window.
pub fn amplifier_suite(g: f64, beta: f64, cfg: &OracleConfig) -> Result<Vec<SuiteReport>> {
    let w = cfg.window;
    let in_window = |k: &[u32]| k.iter().all(|&n| n <= w);
    let dense = dense_macroqubit(beta, g, cfg, 2 * w)?;
    let closed = ProbabilityTable::from_two_mode(&macroqubit_state(beta, g, cfg.eps_trunc)?);
    let mut out = vec![report(
        format!("amplifier beta={beta:.4}"),
        g,
        &closed.restricted(in_window),
        &dense.probabilities().restricted(in_window),
        dense.leakage(),
    )?];
    let space = FockSpace::new(2, Cutoff::PerMode(cfg.evolution_cutoff));
    let vacuum = amplify(&DenseState::vacuum(&space), g)?;
    let closed = ProbabilityTable::from_two_mode(&spontaneous_state(g, cfg.eps_trunc)?);
    out.push(report(
        "spontaneous".into(),
        g,
        &closed.restricted(in_window),
        &vacuum.probabilities().restricted(in_window),
        vacuum.leakage(),
    )?);
    Ok(out)
}

fn dense_split(beta: f64, refl_basis: f64, g: f64, cfg: &OracleConfig) -> Result<DenseState> {
    let t = cfg.split_total;
    let space = FockSpace::new(4, Cutoff::Total(t));
    dense_macroqubit(beta, g, cfg, t)?
        .embed(&space)?
        .apply_bs_unitary(0, 2, cfg.tau)?
        .apply_bs_unitary(1, 3, cfg.tau)?
        .change_equatorial(2, 3, beta, refl_basis)
}

/// Joint transmitted/reflected table of the amplified `pi_beta`.
pub fn splitter_suite(g: f64, beta: f64, refl_basis: f64, cfg: &OracleConfig) -> Result<SuiteReport> {
    let t = cfg.split_total;
    let dense = dense_split(beta, refl_basis, g, cfg)?;
    let state = macroqubit_state(beta, g, cfg.eps_trunc)?;
    let joint = ubs_joint_in(&state, cfg.tau, beta, refl_basis, cfg.eps_trunc)?;
    report(
        format!("ubs_joint beta={beta:.4} refl={refl_basis:.4}"),
        g,
        &ProbabilityTable::from_joint(&joint).restricted(|k| total(k) <= t),
        &dense.probabilities().restricted(|k| total(k) <= t),
        dense.leakage(),
    )
}

/// Transmitted distributions conditioned on each reflected outcome in
/// `detected`, both renormalized on the dense window.
pub fn conditional_suite(
    g: f64,
    beta: f64,
    refl_basis: f64,
    detected: &[ModePair],
    cfg: &OracleConfig,
) -> Result<SuiteReport> {
    let t = cfg.split_total;
    let dense = dense_split(beta, refl_basis, g, cfg)?.probabilities();
    let state = macroqubit_state(beta, g, cfg.eps_trunc)?;
    let joint = ubs_joint_in(&state, cfg.tau, beta, refl_basis, cfg.eps_trunc)?;
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for &d in detected {
        let r = d.total();
        let mut dense_t = ProbabilityTable::new(2);
        for (k, p) in dense.iter() {
            if k[2] == d.n_a && k[3] == d.n_b {
                dense_t.add(vec![k[0], k[1]], p)?;
            }
        }
        let closed = ProbabilityTable::from_two_mode(&conditional_transmitted(&joint, d)?)
            .restricted(|k| total(k) + r <= t)
            .normalized()?;
        let dense_t = dense_t.normalized()?;
        worst = worst.max(max_deviation(&closed, &dense_t)?);
        compared += closed.len();
    }
    Ok(SuiteReport {
        name: format!("conditional beta={beta:.4} refl={refl_basis:.4}"),
        g,
        max_deviation: worst,
        compared,
        leakage: 0.0,
    })
}

/// Transmitted and two-branch table of the amplified `pi_beta`.
pub fn three_way_suite(g: f64, beta: f64, beta1: f64, beta2: f64, cfg: &OracleConfig) -> Result<SuiteReport> {
    let t = cfg.three_way_total;
    let space: Arc<FockSpace> = FockSpace::new(6, Cutoff::Total(t));
    let dense = dense_macroqubit(beta, g, cfg, t)?
        .embed(&space)?
        .apply_bs_unitary(0, 2, cfg.tau)?
        .apply_bs_unitary(1, 3, cfg.tau)?
        .apply_bs_unitary(2, 4, 0.5)?
        .apply_bs_unitary(3, 5, 0.5)?
        .change_equatorial(2, 3, beta, beta1)?
        .change_equatorial(4, 5, beta, beta2)?;
    let state = macroqubit_state(beta, g, cfg.eps_trunc)?;
    let split = three_way_split_in(&state, cfg.tau, beta, beta1, beta2, cfg.eps_trunc)?;
    report(
        format!("three_way beta={beta:.4} branches=({beta1:.4}, {beta2:.4})"),
        g,
        &ProbabilityTable::from_three_way(&split).restricted(|k| total(k) <= t),
        &dense.probabilities().restricted(|k| total(k) <= t),
        dense.leakage(),
    )
}

/// Every comparison at gain `g`: codification and conjugate bases for the
/// amplifier, the split and the conditional states, and one three-way split.
pub fn standard_suites(g: f64, cfg: &OracleConfig) -> Result<Vec<SuiteReport>> {
    let detected = [
        ModePair::new(0, 0),
        ModePair::new(1, 0),
        ModePair::new(0, 1),
        ModePair::new(2, 0),
        ModePair::new(1, 1),
    ];
    let mut out = amplifier_suite(g, 0.0, cfg)?;
    out.extend(amplifier_suite(g, FRAC_PI_2, cfg)?.into_iter().take(1));
    out.push(splitter_suite(g, 0.0, 0.0, cfg)?);
    out.push(splitter_suite(g, FRAC_PI_2, 0.0, cfg)?);
    out.push(conditional_suite(g, 0.0, 0.0, &detected, cfg)?);
    out.push(conditional_suite(g, FRAC_PI_2, 0.0, &detected, cfg)?);
    out.push(three_way_suite(g, 0.0, 0.0, FRAC_PI_4, cfg)?);
    Ok(out)
}
