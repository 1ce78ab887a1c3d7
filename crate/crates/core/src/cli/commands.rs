//! One function per subcommand. Each resolves its defaults, writes its
//! curves and returns the resolved parameters for the manifest.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::RunConfig;
use super::output::{angle_tag, tag, Cell, Output};
use crate::amplifier::{macroqubit_state, DEFAULT_EPS_TRUNC};
use crate::analysis::{
    activation_curve, chsh_sweep, conditional_injection_curve, curve_from_points, double_of_surface,
    preselect_sums, preselect_visibilities, visibility_curve, CurveResult, MicroMacroModel, DEFAULT_ALPHA_GRID,
    DOUBLE_OF_TAU,
};
use crate::error::{Error, Result};
use crate::filters::FilterSpec;
use crate::oracle::{standard_suites, OracleConfig};

fn eps(cfg: &RunConfig) -> f64 {
    cfg.epsilon_trunc.unwrap_or(DEFAULT_EPS_TRUNC)
}

fn sorted<T: PartialOrd + Copy>(mut v: Vec<T>) -> Vec<T> {
    v.sort_by(|a, b| a.partial_cmp(b).expect("validated values are ordered"));
    v.dedup();
    v
}

fn thresholds(cfg: &RunConfig, default: &[u32]) -> Vec<u32> {
    match &cfg.thresholds {
        Some(ks) => sorted(ks.iter().map(|&k| k as u32).collect()),
        None => default.to_vec(),
    }
}

fn angles(list: &Option<Vec<super::config::Angle>>, default: &[f64]) -> Vec<f64> {
    match list {
        Some(a) => a.iter().map(|a| a.0).collect(),
        None => default.to_vec(),
    }
}

/// Truncation actually used for the macro-qubit at gain `g`.
pub fn truncation(g: f64, eps_trunc: f64) -> Result<Value> {
    let state = macroqubit_state(0.0, g, eps_trunc)?;
    Ok(json!({
        "eps_trunc": eps_trunc,
        "prune_budget": eps_trunc,
        "max_total_photons": state.max_total(),
        "truncated_mass": state.trunc_tail(),
    }))
}

pub fn distill(cfg: &RunConfig, out: &mut Output) -> Result<Value> {
    let (g, tau, eps) = (cfg.g.unwrap_or(1.5), cfg.tau.unwrap_or(0.9), eps(cfg));
    let ps = cfg.p.clone().unwrap_or_else(|| (1..=9).map(|i| i as f64 / 10.0).collect());
    let hs = sorted(cfg.h.clone().unwrap_or_else(|| (0..=8).collect()));
    let curves: Vec<CurveResult> = ps
        .par_iter()
        .map(|&p| conditional_injection_curve(p, g, tau, &hs, eps))
        .collect::<Result<_>>()?;
    for (p, c) in ps.iter().zip(&curves) {
        out.curve(&format!("distill_g{}_p{}", tag(g), tag(*p)), c)?;
    }
    let mut header = vec!["h".to_string()];
    header.extend(ps.iter().map(|p| format!("p={}", tag(*p))));
    let rows: Vec<Vec<Cell>> = hs
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            let mut row = vec![Cell::Num(h as f64)];
            row.extend(curves.iter().map(|c| Cell::from(c.samples[i].1)));
            row
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.table(&format!("distill_g{}", tag(g)), &header, &rows)?;
    let flat = curves.iter().all(|c| {
        let (lo, hi) = c.ys().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y), hi.max(y)));
        hi - lo < 1e-3
    });
    if flat {
        out.warn(format!(
            "low-information: every p_cond curve is flat within 1e-3 at tau = {tau}; the reflected intensity barely separates injected from spontaneous events"
        ));
    }
    Ok(json!({ "g": g, "tau": tau, "p": ps, "h": hs, "epsilon_trunc": eps }))
}

pub fn visibility(cfg: &RunConfig, out: &mut Output) -> Result<Value> {
    let (g, tau, eps) = (cfg.g.unwrap_or(1.1), cfg.tau.unwrap_or(0.9), eps(cfg));
    let ks = thresholds(cfg, &(0..=10).collect::<Vec<_>>());
    let bases = angles(&cfg.bases, &[0.0, FRAC_PI_2]);
    let refl = angles(&cfg.phi, &[0.0])[0];
    let jobs: Vec<(f64, &str, f64)> = bases
        .iter()
        .flat_map(|&b| [(b, "codification", b), (b, "conjugate", b + FRAC_PI_2)])
        .collect();
    let curves: Vec<CurveResult> = jobs
        .par_iter()
        .map(|&(b, _, fin)| visibility_curve(b, refl, fin, g, tau, &ks, eps))
        .collect::<Result<_>>()?;
    for ((b, label, _), c) in jobs.iter().zip(&curves) {
        out.curve(&format!("visibility_{label}_beta{}_g{}", angle_tag(*b), tag(g)), c)?;
    }
    Ok(json!({ "g": g, "tau": tau, "thresholds": ks, "bases": bases, "refl_basis": refl, "epsilon_trunc": eps }))
}

pub fn activation(cfg: &RunConfig, out: &mut Output) -> Result<Value> {
    let (g, tau, eps) = (cfg.g.unwrap_or(1.5), cfg.tau.unwrap_or(0.9), eps(cfg));
    let ks = thresholds(cfg, &(0..=10).collect::<Vec<_>>());
    let bases = angles(&cfg.bases, &[0.0, FRAC_PI_2]);
    let refl = angles(&cfg.phi, &[0.0])[0];
    let curves: Vec<CurveResult> = bases
        .par_iter()
        .map(|&b| activation_curve(b, g, tau, refl, &ks, eps))
        .collect::<Result<_>>()?;
    for (b, c) in bases.iter().zip(&curves) {
        out.curve(&format!("activation_beta{}_g{}", angle_tag(*b), tag(g)), c)?;
    }
    Ok(json!({ "g": g, "tau": tau, "thresholds": ks, "bases": bases, "refl_basis": refl, "epsilon_trunc": eps }))
}

pub fn double_filter(cfg: &RunConfig, out: &mut Output) -> Result<Value> {
    if let Some(tau) = cfg.tau {
        if tau != DOUBLE_OF_TAU {
            return Err(Error::Config(format!("double-filter uses a balanced splitter; tau = {tau} is not 0.5")));
        }
    }
    let (g, eps) = (cfg.g.unwrap_or(1.2), eps(cfg));
    let ks = thresholds(cfg, &(0..=8).collect::<Vec<_>>());
    let hs: Vec<u32> = match &cfg.h {
        Some(hs) if hs.iter().any(|&h| h < 0) => {
            return Err(Error::Config("transmitted thresholds must be non-negative".into()))
        }
        Some(hs) => sorted(hs.iter().map(|&h| h as u32).collect()),
        None => (0..=8).collect(),
    };
    let bases = angles(&cfg.bases, &[0.0, FRAC_PI_2]);
    if bases.len() != 2 {
        return Err(Error::Config("double-filter takes exactly two bases: reflected, final".into()));
    }
    let surface = double_of_surface(g, &ks, &hs, bases[0], bases[1], eps)?;
    let value = |v: &Result<crate::analysis::Visibility>| -> Result<Option<f64>> {
        match v {
            Ok(v) => Ok(Some(v.value)),
            Err(Error::NoEventsPass(_)) => Ok(None),
            Err(e) => Err(Error::Structural(e.to_string())),
        }
    };
    for (j, &h) in hs.iter().enumerate() {
        let points = ks
            .iter()
            .enumerate()
            .map(|(i, &k)| Ok((k as f64, value(&surface[i][j])?)))
            .collect::<Result<Vec<_>>>()?;
        let curve = CurveResult::new("k", "visibility", points)?
            .with_meta("h", h as f64)
            .with_meta("g", g)
            .with_meta("tau", DOUBLE_OF_TAU)
            .with_meta("refl_basis", bases[0])
            .with_meta("final_basis", bases[1]);
        out.curve(&format!("double_filter_h{h}_g{}", tag(g)), &curve)?;
    }
    let header: Vec<String> = std::iter::once("k".to_string()).chain(hs.iter().map(|h| format!("h={h}"))).collect();
    let rows = ks
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let mut row = vec![Cell::Num(k as f64)];
            for v in &surface[i] {
                row.push(Cell::from(value(v)?));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.table(&format!("double_filter_g{}", tag(g)), &header, &rows)?;
    Ok(json!({ "g": g, "tau": DOUBLE_OF_TAU, "thresholds": ks, "h": hs, "bases": bases, "epsilon_trunc": eps }))
}

pub fn preselect(cfg: &RunConfig, out: &mut Output) -> Result<Value> {
    let (g, tau, eps) = (cfg.g.unwrap_or(1.2), cfg.tau.unwrap_or(0.9), eps(cfg));
    let ks = thresholds(cfg, &[0, 3, 5]);
    let phis = sorted(angles(&cfg.phi, &[FRAC_PI_4]));
    let metas = angles(&cfg.bases, &[0.0, FRAC_PI_4]);
    let n = cfg.alpha_grid.unwrap_or(DEFAULT_ALPHA_GRID);
    let alphas: Vec<f64> = (0..n).map(|i| i as f64 * PI / n as f64).collect();
    let mut summary = Vec::new();
    for &phi in &phis {
        for &beta_meas in &metas {
            let sums = alphas
                .par_iter()
                .map(|&a| preselect_sums(a, beta_meas, phi, &ks, g, tau, eps))
                .collect::<Result<Vec<_>>>()?;
            for (ki, &k) in ks.iter().enumerate() {
                let points = alphas.iter().zip(&sums).map(|(&a, s)| (a, s[ki].plus_fraction())).collect();
                let curve = curve_from_points("alpha", "p_plus", points)?
                    .with_meta("beta_meas", beta_meas)
                    .with_meta("phi_pre", phi)
                    .with_meta("k", k as f64)
                    .with_meta("g", g)
                    .with_meta("tau", tau);
                out.curve(
                    &format!("fringe_phi{}_beta{}_k{k}_g{}", angle_tag(phi), angle_tag(beta_meas), tag(g)),
                    &curve,
                )?;
            }
        }
        let best = preselect_visibilities(phi, &ks, g, tau, n, eps)?;
        let pass = ks
            .iter()
            .zip(&best)
            .map(|(&k, b)| (k as f64, b.as_ref().map(|b| b.pass_probability).map_err(clone_err)))
            .collect();
        let curve = curve_from_points("k", "pass_probability", pass)?
            .with_meta("phi_pre", phi)
            .with_meta("g", g)
            .with_meta("tau", tau);
        out.curve(&format!("preselect_pass_phi{}_g{}", angle_tag(phi), tag(g)), &curve)?;
        summary.push(best);
    }
    if phis.len() > 1 {
        for (ki, &k) in ks.iter().enumerate() {
            let points = phis
                .iter()
                .zip(&summary)
                .map(|(&phi, best)| (phi, best[ki].as_ref().map(|b| b.visibility).map_err(clone_err)))
                .collect();
            let curve = curve_from_points("phi", "visibility", points)?
                .with_meta("k", k as f64)
                .with_meta("g", g)
                .with_meta("tau", tau);
            out.curve(&format!("preselect_visibility_k{k}_g{}", tag(g)), &curve)?;
        }
    }
    let mut rows = Vec::new();
    for (&phi, best) in phis.iter().zip(&summary) {
        for (&k, b) in ks.iter().zip(best) {
            let b = match b {
                Ok(b) => Some(b),
                Err(Error::NoEventsPass(_)) => None,
                Err(e) => return Err(clone_err(e)),
            };
            rows.push(vec![
                Cell::Num(phi),
                Cell::Num(k as f64),
                Cell::from(b.map(|b| b.visibility)),
                Cell::from(b.map(|b| b.alpha_bar)),
                Cell::from(b.map(|b| b.pass_probability)),
            ]);
        }
    }
    out.table(
        &format!("preselect_g{}", tag(g)),
        &["phi", "k", "visibility", "alpha_bar", "pass_probability"],
        &rows,
    )?;
    Ok(json!({
        "g": g, "tau": tau, "thresholds": ks, "phi": phis, "bases": metas,
        "alpha_grid": n, "epsilon_trunc": eps
    }))
}

fn clone_err(e: &Error) -> Error {
    match e {
        Error::NoEventsPass(m) => Error::NoEventsPass(m.clone()),
        other => Error::Structural(other.to_string()),
    }
}

pub fn chsh(cfg: &RunConfig, out: &mut Output) -> Result<Value> {
    let (g, tau, eps) = (cfg.g.unwrap_or(1.2), cfg.tau.unwrap_or(0.9), eps(cfg));
    let ks = thresholds(cfg, &[0, 3, 5]);
    let phi = angles(&cfg.phi, &[FRAC_PI_4])[0];
    let steps = cfg.alpha_grid.unwrap_or(16);
    if !steps.is_multiple_of(2) {
        return Err(Error::Config(format!("chsh needs an even angle grid, got {steps}")));
    }
    let mut rows = Vec::new();
    for &k in &ks {
        let spec = FilterSpec::DoubleOf { k, basis1: 0.0, basis2: phi };
        let model = MicroMacroModel::new(g, tau, Some(spec), 0)?.with_eps_trunc(eps);
        let row = match chsh_sweep(&model, steps) {
            Ok(s) => {
                let mut row = vec![Cell::Num(k as f64), Cell::Num(s.max_abs_s)];
                row.extend(s.angles.iter().map(|&a| Cell::Num(a)));
                row.push(Cell::Num(s.grid_step));
                row
            }
            Err(Error::NoEventsPass(_)) => {
                let mut row = vec![Cell::Num(k as f64)];
                row.extend(std::iter::repeat_n(Cell::Flag, 5));
                row.push(Cell::Num(2.0 * PI / steps as f64));
                row
            }
            Err(e) => return Err(e),
        };
        rows.push(row);
    }
    out.table(
        &format!("chsh_g{}", tag(g)),
        &["k", "max_abs_s", "a", "a_prime", "b", "b_prime", "grid_step"],
        &rows,
    )?;
    Ok(json!({
        "g": g, "tau": tau, "thresholds": ks, "phi": phi, "alpha_grid": steps,
        "final_k": 0, "epsilon_trunc": eps
    }))
}

/// Returns the parameters and whether every suite stayed within the bound.
pub fn oracle_check(cfg: &RunConfig, out: &mut Output) -> Result<(Value, bool)> {
    let gains = cfg.g.map_or_else(|| vec![0.3, 0.6], |g| vec![g]);
    let oc = OracleConfig {
        tau: cfg.tau.unwrap_or(0.9),
        ..OracleConfig::default()
    };
    let mut rows = Vec::new();
    let mut ok = true;
    for &g in &gains {
        for r in standard_suites(g, &oc)? {
            ok &= r.passed();
            rows.push(vec![
                Cell::Text(r.name.clone()),
                Cell::Num(r.g),
                Cell::Num(r.max_deviation),
                Cell::Num(r.compared as f64),
                Cell::Num(r.leakage),
                Cell::Text(if r.passed() { "pass" } else { "fail" }.into()),
            ]);
        }
    }
    out.table("oracle_report", &["suite", "g", "max_deviation", "compared", "leakage", "status"], &rows)?;
    Ok((json!({ "g": gains, "oracle": oc, "bound": crate::oracle::ORACLE_BOUND }), ok))
}
