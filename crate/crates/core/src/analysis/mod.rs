//! Figures of merit: conditional injection, shutter activation, filtered
//! visibilities, pre-selected fringes and CHSH correlations.
//!
//! Every quantity is a ratio of linear functionals of the outcome
//! distribution, summed exactly over the truncated space. Denominators are
//! returned next to ratios so mixtures can be recombined.

pub mod curve;
mod engine;

use serde::{Deserialize, Serialize};

use crate::amplifier::{macroqubit_state, spontaneous_state, DEFAULT_EPS_TRUNC};
use crate::error::{domain, Error, Result};
use crate::filters::{dichotomic_from_imbalance, preselect_level, DichotomicOutcome, FilterSpec};
use crate::state::TwoModeState;
pub use curve::{format_sig12, CurveResult, NO_EVENTS};
use engine::{double_branch_histogram, level_histogram, refl_level_distribution, refl_total_distribution, Histogram, ReflLevel};

/// Transmittivity of the balanced splitter in the two-sided filtering scheme.
pub const DOUBLE_OF_TAU: f64 = 0.5;

/// Points on `[0, pi)` scanned before refining the best injection angle.
pub const DEFAULT_ALPHA_GRID: usize = 181;

/// A visibility with the sums it was formed from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Visibility {
    pub value: f64,
    /// `P(+) - P(-)` jointly with the filter event.
    pub numerator: f64,
    /// `P(+) + P(-)` jointly with the filter event.
    pub denominator: f64,
    /// Probability that the filter event occurs.
    pub acceptance: f64,
}

/// Joint probabilities of the final dichotomic read-out and the filter
/// event. `tie` holds balanced counts at zero final threshold, which are
/// assigned to either outcome with probability one half.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DichotomicSums {
    pub plus: f64,
    pub minus: f64,
    pub tie: f64,
    pub inconclusive: f64,
}

impl DichotomicSums {
    pub(crate) fn from_imbalance(dist: &[f64], offset: usize, final_k: u32) -> Self {
        let mut sums = DichotomicSums::default();
        for (i, &p) in dist.iter().enumerate() {
            let d = i as i64 - offset as i64;
            match dichotomic_from_imbalance(d, final_k) {
                DichotomicOutcome::Plus => sums.plus += p,
                DichotomicOutcome::Minus => sums.minus += p,
                DichotomicOutcome::Coin => sums.tie += p,
                DichotomicOutcome::Inconclusive => sums.inconclusive += p,
            }
        }
        sums
    }

    /// Probability of the filter event.
    pub fn pass(&self) -> f64 {
        self.plus + self.minus + self.tie + self.inconclusive
    }

    /// Visibility with ties counted half to each outcome.
    pub fn visibility(&self) -> Result<Visibility> {
        self.ratio(self.plus + self.minus + self.tie)
    }

    /// Visibility over conclusive events only; ties are discarded.
    pub fn conclusive_visibility(&self) -> Result<Visibility> {
        self.ratio(self.plus + self.minus)
    }

    fn ratio(&self, denominator: f64) -> Result<Visibility> {
        if !(denominator > 0.0) {
            return Err(Error::NoEventsPass("no conclusive event passes the filter".into()));
        }
        let numerator = self.plus - self.minus;
        Ok(Visibility {
            value: numerator / denominator,
            numerator,
            denominator,
            acceptance: self.pass(),
        })
    }

    /// `P(+1 | filter event)`.
    pub fn plus_fraction(&self) -> Result<f64> {
        let pass = self.pass();
        if !(pass > 0.0) {
            return Err(Error::NoEventsPass("no event passes the filter".into()));
        }
        Ok((self.plus + 0.5 * self.tie) / pass)
    }

    pub fn scaled(self, w: f64) -> Self {
        DichotomicSums {
            plus: w * self.plus,
            minus: w * self.minus,
            tie: w * self.tie,
            inconclusive: w * self.inconclusive,
        }
    }

    pub fn add(self, other: Self) -> Self {
        DichotomicSums {
            plus: self.plus + other.plus,
            minus: self.minus + other.minus,
            tie: self.tie + other.tie,
            inconclusive: self.inconclusive + other.inconclusive,
        }
    }
}

fn check_open_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau < 1.0) {
        return domain(format!("transmittivity {tau} outside (0, 1)"));
    }
    Ok(())
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("probability {p} outside [0, 1]"));
    }
    Ok(())
}

fn pure(state: TwoModeState) -> Vec<(f64, TwoModeState)> {
    vec![(1.0, state)]
}

/// Turns per-point results into a curve, flagging points where nothing passed.
pub fn curve_from_points(
    x_label: &str,
    y_label: &str,
    points: Vec<(f64, Result<f64>)>,
) -> Result<CurveResult> {
    let mut samples = Vec::with_capacity(points.len());
    for (x, y) in points {
        match y {
            Ok(v) => samples.push((x, Some(v))),
            Err(Error::NoEventsPass(_)) => samples.push((x, None)),
            Err(e) => return Err(e),
        }
    }
    CurveResult::new(x_label, y_label, samples)
}

// ---------------------------------------------------------------- injection

/// Probability that the photon was injected, given the reflected total
/// exceeds `h`, for prior injection probability `p`.
pub fn conditional_injection_probability(p: f64, g: f64, tau: f64, h: i64) -> Result<f64> {
    let curve = conditional_injection_values(p, g, tau, &[h], DEFAULT_EPS_TRUNC)?;
    curve.into_iter().next().expect("one threshold")
}

/// [`conditional_injection_probability`] over several thresholds.
pub fn conditional_injection_values(p: f64, g: f64, tau: f64, hs: &[i64], eps_trunc: f64) -> Result<Vec<Result<f64>>> {
    check_probability(p)?;
    check_open_tau(tau)?;
    let injected = refl_total_distribution(&macroqubit_state(0.0, g, eps_trunc)?, tau)?;
    let spont = refl_total_distribution(&spontaneous_state(g, eps_trunc)?, tau)?;
    let tail = |dist: &[f64], h: i64| -> f64 {
        let start = (h + 1).max(0) as usize;
        dist.iter().skip(start).sum()
    };
    Ok(hs
        .iter()
        .map(|&h| {
            if h < -1 {
                return domain(format!("intensity threshold {h} below -1"));
            }
            let a_inj = p * tail(&injected, h);
            let a_sp = (1.0 - p) * tail(&spont, h);
            // below one part in 1e300 of the prior, nothing meaningful passes
            if !(a_inj + a_sp > 0.0) {
                return Err(Error::NoEventsPass(format!("no event exceeds intensity threshold {h}")));
            }
            Ok(if h == -1 { p } else { a_inj / (a_inj + a_sp) })
        })
        .collect())
}

/// `p_cond(h)` as a curve over `hs`.
pub fn conditional_injection_curve(p: f64, g: f64, tau: f64, hs: &[i64], eps_trunc: f64) -> Result<CurveResult> {
    let values = conditional_injection_values(p, g, tau, hs, eps_trunc)?;
    let points = hs.iter().map(|&h| h as f64).zip(values).collect();
    Ok(curve_from_points("h", "p_cond", points)?
        .with_meta("p", p)
        .with_meta("g", g)
        .with_meta("tau", tau))
}

// --------------------------------------------------------------- activation

/// Probability that the orthogonality filter on the reflected arm fires.
pub fn shutter_activation_probability(beta_inj: f64, g: f64, tau: f64, k: u32, refl_basis: f64) -> Result<f64> {
    Ok(activation_values(beta_inj, g, tau, refl_basis, &[k], DEFAULT_EPS_TRUNC)?[0])
}

pub fn activation_values(beta_inj: f64, g: f64, tau: f64, refl_basis: f64, ks: &[u32], eps_trunc: f64) -> Result<Vec<f64>> {
    check_open_tau(tau)?;
    let parts = pure(macroqubit_state(beta_inj, g, eps_trunc)?);
    let (levels, _) = refl_level_distribution(&parts, tau, refl_basis, eps_trunc)?;
    Ok(ks.iter().map(|&k| levels.iter().skip(k as usize + 1).sum()).collect())
}

pub fn activation_curve(beta_inj: f64, g: f64, tau: f64, refl_basis: f64, ks: &[u32], eps_trunc: f64) -> Result<CurveResult> {
    let values = activation_values(beta_inj, g, tau, refl_basis, ks, eps_trunc)?;
    let samples = ks.iter().zip(values).map(|(&k, v)| (k as f64, Some(v))).collect();
    Ok(CurveResult::new("k", "p_activation", samples)?
        .with_meta("beta_inj", beta_inj)
        .with_meta("g", g)
        .with_meta("tau", tau)
        .with_meta("refl_basis", refl_basis))
}

// ------------------------------------------------------ single-filter visibility

/// Visibility of the transmitted macro-state in `final_basis` conditioned on
/// the reflected imbalance in `refl_basis` exceeding `k`.
pub fn visibility_single_of(beta_inj: f64, refl_basis: f64, k: u32, final_basis: f64, g: f64, tau: f64) -> Result<Visibility> {
    let state = macroqubit_state(beta_inj, g, DEFAULT_EPS_TRUNC)?;
    let mut v = single_of_visibilities(&pure(state), refl_basis, final_basis, tau, &[k], DEFAULT_EPS_TRUNC)?;
    v.remove(0)
}

/// Read-out sums of a weighted mixture for several single-filter
/// thresholds, from one pass over the outcome space.
pub fn single_of_sums(
    parts: &[(f64, TwoModeState)],
    refl_basis: f64,
    final_basis: f64,
    tau: f64,
    ks: &[u32],
    eps_trunc: f64,
) -> Result<Vec<DichotomicSums>> {
    check_open_tau(tau)?;
    let hist = level_histogram(parts, tau, final_basis, ReflLevel::Imbalance { basis: refl_basis }, eps_trunc)?;
    Ok(ks.iter().map(|&k| sums_above(&hist, k as usize, 0)).collect())
}

pub fn single_of_visibilities(
    parts: &[(f64, TwoModeState)],
    refl_basis: f64,
    final_basis: f64,
    tau: f64,
    ks: &[u32],
    eps_trunc: f64,
) -> Result<Vec<Result<Visibility>>> {
    let sums = single_of_sums(parts, refl_basis, final_basis, tau, ks, eps_trunc)?;
    Ok(sums.iter().map(DichotomicSums::visibility).collect())
}

fn sums_above(hist: &Histogram, k: usize, final_k: u32) -> DichotomicSums {
    let dist = hist.collapse(|row| row > k);
    DichotomicSums::from_imbalance(&dist, hist.offset, final_k)
}

pub fn visibility_curve(
    beta_inj: f64,
    refl_basis: f64,
    final_basis: f64,
    g: f64,
    tau: f64,
    ks: &[u32],
    eps_trunc: f64,
) -> Result<CurveResult> {
    let state = macroqubit_state(beta_inj, g, eps_trunc)?;
    let values = single_of_visibilities(&pure(state), refl_basis, final_basis, tau, ks, eps_trunc)?;
    let points = ks.iter().map(|&k| k as f64).zip(values.into_iter().map(|v| v.map(|v| v.value))).collect();
    Ok(curve_from_points("k", "visibility", points)?
        .with_meta("beta_inj", beta_inj)
        .with_meta("refl_basis", refl_basis)
        .with_meta("final_basis", final_basis)
        .with_meta("g", g)
        .with_meta("tau", tau))
}

// ------------------------------------------------------ two-sided filtering

/// Visibility when a balanced splitter feeds an orthogonality filter with
/// threshold `k_refl` in `refl_basis`, and the other half is read in the
/// codification basis `final_basis` with threshold `h_trans`.
pub fn visibility_double_of(g: f64, k_refl: u32, h_trans: u32, refl_basis: f64, final_basis: f64) -> Result<Visibility> {
    let surface = double_of_surface(g, &[k_refl], &[h_trans], refl_basis, final_basis, DEFAULT_EPS_TRUNC)?;
    surface.into_iter().next().and_then(|row| row.into_iter().next()).expect("one point")
}

/// Two-sided filtering visibilities indexed `[k][h]`. Only events
/// conclusive at both stages count, so `h = 0` discards balanced counts.
pub fn double_of_surface(
    g: f64,
    ks: &[u32],
    hs: &[u32],
    refl_basis: f64,
    final_basis: f64,
    eps_trunc: f64,
) -> Result<Vec<Vec<Result<Visibility>>>> {
    let parts = pure(macroqubit_state(final_basis, g, eps_trunc)?);
    let hist = level_histogram(&parts, DOUBLE_OF_TAU, final_basis, ReflLevel::Imbalance { basis: refl_basis }, eps_trunc)?;
    Ok(ks.iter()
        .map(|&k| {
            let dist = hist.collapse(|row| row > k as usize);
            hs.iter()
                .map(|&h| DichotomicSums::from_imbalance(&dist, hist.offset, h).conclusive_visibility())
                .collect()
        })
        .collect())
}

// ------------------------------------------------------ pre-selection

/// Joint read-out sums for the amplified `pi_alpha` measured in
/// `meas_basis`, for each double-branch threshold in `ks`. The branches are
/// read in `0` and `phi_pre`.
pub fn preselect_sums(
    alpha: f64,
    meas_basis: f64,
    phi_pre: f64,
    ks: &[u32],
    g: f64,
    tau: f64,
    eps_trunc: f64,
) -> Result<Vec<DichotomicSums>> {
    check_open_tau(tau)?;
    let parts = pure(macroqubit_state(alpha, g, eps_trunc)?);
    let ks: Vec<i64> = ks.iter().map(|&k| preselect_level(k)).collect();
    let hist = double_branch_histogram(&parts, tau, meas_basis, 0.0, phi_pre, &ks, eps_trunc)?;
    Ok((0..ks.len())
        .map(|i| DichotomicSums::from_imbalance(&hist.rows[i], hist.offset, 0))
        .collect())
}

/// `P(+1 | pass)` against the injected polarization angle.
pub fn fringe_pattern(alpha_grid: &[f64], beta_meas: f64, phi_pre: f64, k: u32, g: f64, tau: f64) -> Result<CurveResult> {
    fringe_pattern_with(alpha_grid, beta_meas, phi_pre, k, g, tau, DEFAULT_EPS_TRUNC)
}

pub fn fringe_pattern_with(
    alpha_grid: &[f64],
    beta_meas: f64,
    phi_pre: f64,
    k: u32,
    g: f64,
    tau: f64,
    eps_trunc: f64,
) -> Result<CurveResult> {
    use rayon::prelude::*;
    let points: Vec<(f64, Result<f64>)> = alpha_grid
        .par_iter()
        .map(|&alpha| {
            let y = preselect_sums(alpha, beta_meas, phi_pre, &[k], g, tau, eps_trunc)
                .and_then(|s| s[0].plus_fraction());
            (alpha, y)
        })
        .collect();
    Ok(curve_from_points("alpha", "p_plus", points)?
        .with_meta("beta_meas", beta_meas)
        .with_meta("phi_pre", phi_pre)
        .with_meta("k", k as f64)
        .with_meta("g", g)
        .with_meta("tau", tau))
}

/// Golden-section maximization of `f` on `[lo, hi]`.
pub fn golden_max(mut f: impl FnMut(f64) -> Result<f64>, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)> {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 > f2 { (x1, f1) } else { (x2, f2) })
}

/// Location and height of the largest sample of a curve, refined by golden
/// section between its grid neighbours.
pub fn refine_peak(curve: &CurveResult, f: impl FnMut(f64) -> Result<f64>, tol: f64) -> Result<(f64, f64)> {
    let (idx, _) = curve
        .samples
        .iter()
        .enumerate()
        .filter_map(|(i, (_, y))| y.map(|y| (i, y)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::NoEventsPass("every point of the curve is flagged".into()))?;
    let xs: Vec<f64> = curve.xs().collect();
    let step = if xs.len() > 1 { xs[1] - xs[0] } else { 0.1 };
    let lo = if idx > 0 { xs[idx - 1] } else { xs[idx] - step };
    let hi = if idx + 1 < xs.len() { xs[idx + 1] } else { xs[idx] + step };
    golden_max(f, lo, hi, tol)
}

/// Best visibility reachable by choosing the injected polarization, with
/// the final read-out on the bisector of the two pre-selection bases.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreselectVisibility {
    pub k: u32,
    pub visibility: f64,
    pub alpha_bar: f64,
    pub pass_probability: f64,
}

pub fn preselect_visibility(phi_pre: f64, k: u32, g: f64, tau: f64) -> Result<PreselectVisibility> {
    let mut v = preselect_visibilities(phi_pre, &[k], g, tau, DEFAULT_ALPHA_GRID, DEFAULT_EPS_TRUNC)?;
    v.remove(0)
}

/// [`preselect_visibility`] for several thresholds sharing one angle scan.
pub fn preselect_visibilities(
    phi_pre: f64,
    ks: &[u32],
    g: f64,
    tau: f64,
    grid: usize,
    eps_trunc: f64,
) -> Result<Vec<Result<PreselectVisibility>>> {
    use rayon::prelude::*;
    if grid < 3 {
        return domain(format!("angle grid needs at least 3 points, got {grid}"));
    }
    let beta_meas = phi_pre / 2.0;
    let step = std::f64::consts::PI / grid as f64;
    let scan: Vec<Vec<DichotomicSums>> = (0..grid)
        .into_par_iter()
        .map(|i| preselect_sums(i as f64 * step, beta_meas, phi_pre, ks, g, tau, eps_trunc))
        .collect::<Result<_>>()?;
    let abs_vis = |s: &DichotomicSums| s.visibility().map(|v| v.value.abs());
    ks.par_iter()
        .enumerate()
        .map(|(ki, &k)| {
            let samples: Vec<(f64, Result<f64>)> =
                scan.iter().enumerate().map(|(i, row)| (i as f64 * step, abs_vis(&row[ki]))).collect();
            let curve = match curve_from_points("alpha", "abs_visibility", samples) {
                Ok(c) => c,
                Err(e) => return Ok(Err(e)),
            };
            let eval = |alpha: f64| {
                preselect_sums(alpha, beta_meas, phi_pre, &[k], g, tau, eps_trunc).and_then(|s| abs_vis(&s[0]))
            };
            let (alpha, vis) = match refine_peak(&curve, eval, 1e-4) {
                Ok(v) => v,
                Err(e) => return Ok(Err(e)),
            };
            let sums = preselect_sums(alpha, beta_meas, phi_pre, &[k], g, tau, eps_trunc)?[0];
            let signed = sums.visibility()?.value;
            let two_pi = 2.0 * std::f64::consts::PI;
            let alpha_bar = if signed >= 0.0 { alpha } else { alpha + std::f64::consts::PI }.rem_euclid(two_pi);
            Ok(Ok(PreselectVisibility {
                k,
                visibility: vis,
                alpha_bar,
                pass_probability: sums.pass(),
            }))
        })
        .collect()
}

// ------------------------------------------------------ micro-macro CHSH

/// Micro-macro configuration: one photon of a singlet is measured directly,
/// the other seeds the amplifier whose output is pre-selected and read out.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MicroMacroModel {
    pub g: f64,
    pub tau: f64,
    pub preselect: Option<FilterSpec>,
    pub final_k: u32,
    pub eps_trunc: f64,
}

impl MicroMacroModel {
    pub fn new(g: f64, tau: f64, preselect: Option<FilterSpec>, final_k: u32) -> Result<Self> {
        if !(tau > 0.0 && tau <= 1.0) {
            return domain(format!("transmittivity {tau} outside (0, 1]"));
        }
        if let Some(spec) = &preselect {
            spec.validate()?;
        }
        crate::amplifier::gain_params(g)?;
        Ok(MicroMacroModel {
            g,
            tau,
            preselect,
            final_k,
            eps_trunc: DEFAULT_EPS_TRUNC,
        })
    }

    pub fn with_eps_trunc(mut self, eps_trunc: f64) -> Self {
        self.eps_trunc = eps_trunc;
        self
    }

    /// Read-out sums of the macro arm for injected `pi_alpha`, measured in
    /// `meas_basis`.
    pub fn macro_sums(&self, alpha: f64, meas_basis: f64) -> Result<DichotomicSums> {
        let parts = pure(macroqubit_state(alpha, self.g, self.eps_trunc)?);
        let (hist, keep): (Histogram, Box<dyn Fn(usize) -> bool>) = match self.preselect {
            None => (
                level_histogram(&parts, self.tau, meas_basis, ReflLevel::Total, self.eps_trunc)?,
                Box::new(|_| true),
            ),
            Some(FilterSpec::Id { h }) => (
                level_histogram(&parts, self.tau, meas_basis, ReflLevel::Total, self.eps_trunc)?,
                Box::new(move |row| row as i64 > h),
            ),
            Some(FilterSpec::Of { k, basis }) => (
                level_histogram(&parts, self.tau, meas_basis, ReflLevel::Imbalance { basis }, self.eps_trunc)?,
                Box::new(move |row| row > k as usize),
            ),
            Some(FilterSpec::DoubleOf { k, basis1, basis2 }) => (
                double_branch_histogram(&parts, self.tau, meas_basis, basis1, basis2, &[preselect_level(k)], self.eps_trunc)?,
                Box::new(|_| true),
            ),
        };
        let dist = hist.collapse(keep);
        Ok(DichotomicSums::from_imbalance(&dist, hist.offset, self.final_k))
    }
}

/// Correlation of the micro and macro read-outs and the probability that
/// the shutter opens.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub value: f64,
    pub pass_probability: f64,
}

/// Micro outcome `+1` (`pi_a`) leaves the amplifier seeded with `pi_(a+pi)`
/// and outcome `-1` with `pi_a`, each with probability one half.
fn correlation_from(plus_branch: &DichotomicSums, minus_branch: &DichotomicSums) -> Result<Correlation> {
    let pass = 0.5 * (plus_branch.pass() + minus_branch.pass());
    if !(pass > 0.0) {
        return Err(Error::NoEventsPass("the pre-selection never opens the shutter".into()));
    }
    let joint = 0.5 * (plus_branch.plus - plus_branch.minus) - 0.5 * (minus_branch.plus - minus_branch.minus);
    Ok(Correlation {
        value: joint / pass,
        pass_probability: pass,
    })
}

pub fn correlation(a: f64, b: f64, model: &MicroMacroModel) -> Result<Correlation> {
    let plus_branch = model.macro_sums(a + std::f64::consts::PI, b)?;
    let minus_branch = model.macro_sums(a, b)?;
    correlation_from(&plus_branch, &minus_branch)
}

/// `E(a,b) + E(a,b') + E(a',b) - E(a',b')`.
pub fn chsh_value(a: f64, a_prime: f64, b: f64, b_prime: f64, model: &MicroMacroModel) -> Result<f64> {
    let e = |x: f64, y: f64| correlation(x, y, model).map(|c| c.value);
    Ok(e(a, b)? + e(a, b_prime)? + e(a_prime, b)? - e(a_prime, b_prime)?)
}

/// Largest `|S|` over an equatorial grid of micro and macro angles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshSweep {
    pub max_abs_s: f64,
    /// `(a, a', b, b')` attaining the maximum.
    pub angles: [f64; 4],
    pub grid_step: f64,
}

/// Sweeps every angle over `steps` equally spaced points of `[0, 2 pi)`.
/// `steps` must be even so that `a + pi` stays on the grid.
pub fn chsh_sweep(model: &MicroMacroModel, steps: usize) -> Result<ChshSweep> {
    use rayon::prelude::*;
    if steps < 2 || !steps.is_multiple_of(2) {
        return domain(format!("angle grid must have an even number of points, got {steps}"));
    }
    let step = 2.0 * std::f64::consts::PI / steps as f64;
    // sums[alpha][b]
    let sums: Vec<Vec<DichotomicSums>> = (0..steps)
        .into_par_iter()
        .map(|i| (0..steps).map(|j| model.macro_sums(i as f64 * step, j as f64 * step)).collect())
        .collect::<Result<_>>()?;
    let half = steps / 2;
    let mut e = vec![vec![0.0; steps]; steps];
    for (i, row) in e.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = correlation_from(&sums[(i + half) % steps][j], &sums[i][j])?.value;
        }
    }
    let mut best = ChshSweep {
        max_abs_s: f64::NEG_INFINITY,
        angles: [0.0; 4],
        grid_step: step,
    };
    for a in 0..steps {
        for ap in 0..steps {
            for b in 0..steps {
                for bp in 0..steps {
                    let s = (e[a][b] + e[a][bp] + e[ap][b] - e[ap][bp]).abs();
                    if s > best.max_abs_s {
                        best.max_abs_s = s;
                        best.angles = [a as f64 * step, ap as f64 * step, b as f64 * step, bp as f64 * step];
                    }
                }
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplifier::{injected_mixture, InjectionModel};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    const EPS: f64 = 1e-12;

    #[test]
    fn sums_split_by_threshold() {
        // d = -2..=2
        let dist = [0.1, 0.2, 0.3, 0.25, 0.15];
        let s = DichotomicSums::from_imbalance(&dist, 2, 0);
        assert_eq!((s.plus, s.minus, s.tie, s.inconclusive), (0.4, 0.30000000000000004, 0.3, 0.0));
        let v = s.visibility().unwrap();
        assert!((v.value - 0.1).abs() < 1e-15);
        assert!((s.conclusive_visibility().unwrap().value - 0.1 / 0.7).abs() < 1e-15);
        assert!((s.plus_fraction().unwrap() - 0.55).abs() < 1e-15);
        let s1 = DichotomicSums::from_imbalance(&dist, 2, 1);
        assert!((s1.inconclusive - 0.75).abs() < 1e-15);
        assert!(matches!(DichotomicSums::default().visibility(), Err(Error::NoEventsPass(_))));
    }

    #[test]
    fn no_conditioning_returns_the_prior() {
        let v = conditional_injection_values(0.37, 0.8, 0.9, &[-1], 1e-12).unwrap();
        assert_eq!(*v[0].as_ref().unwrap(), 0.37);
        let v = conditional_injection_values(1.0, 0.8, 0.9, &[0, 3, 6], 1e-12).unwrap();
        for x in v {
            assert!((x.unwrap() - 1.0).abs() < EPS);
        }
        assert!(conditional_injection_probability(1.3, 0.8, 0.9, 0).is_err());
    }

    #[test]
    fn injection_conditioning_sharpens_with_threshold() {
        let hs: Vec<i64> = (0..=8).collect();
        let v = conditional_injection_values(0.3, 1.5, 0.9, &hs, 1e-12).unwrap();
        let v: Vec<f64> = v.into_iter().map(|x| x.unwrap()).collect();
        assert!(v[0] > 0.3);
        assert!(v.windows(2).all(|w| w[1] > w[0]), "{v:?}");
    }

    #[test]
    fn single_photon_shutter() {
        let ks: Vec<u32> = (0..4).collect();
        let v = activation_values(0.0, 1e-7, 0.9, 0.0, &ks, 1e-14).unwrap();
        assert!((v[0] - 0.1).abs() < 1e-9);
        assert!(v[1..].iter().all(|&x| x < 1e-9));
    }

    #[test]
    fn activation_is_blind_to_conjugate_injection() {
        let ks: Vec<u32> = (0..=6).collect();
        let a = activation_values(0.0, 0.9, 0.9, 0.0, &ks, 1e-12).unwrap();
        let b = activation_values(FRAC_PI_2, 0.9, 0.9, 0.0, &ks, 1e-12).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(a.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn impossible_filter_is_an_error() {
        let r = visibility_single_of(0.0, 0.0, 500, 0.0, 0.4, 0.9);
        assert!(matches!(r, Err(Error::NoEventsPass(_))));
    }

    #[test]
    fn codification_filter_helps_conjugate_filter_hurts() {
        let ks: Vec<u32> = (0..=6).collect();
        let state = |b| pure(macroqubit_state(b, 0.8, 1e-12).unwrap());
        let same = single_of_visibilities(&state(0.0), 0.0, 0.0, 0.9, &ks, 1e-12).unwrap();
        let conj = single_of_visibilities(&state(FRAC_PI_2), 0.0, FRAC_PI_2, 0.9, &ks, 1e-12).unwrap();
        let same: Vec<f64> = same.into_iter().map(|v| v.unwrap().value).collect();
        let conj: Vec<f64> = conj.into_iter().map(|v| v.unwrap().value).collect();
        assert!(same.windows(2).all(|w| w[1] >= w[0]), "{same:?}");
        assert!(conj[6] < conj[0], "{conj:?}");
    }

    #[test]
    fn balanced_double_filter_matches_single_filter_paths() {
        let g = 0.7;
        let d = double_of_surface(g, &[0, 2], &[0], 0.0, FRAC_PI_2, 1e-12).unwrap();
        let parts = pure(macroqubit_state(FRAC_PI_2, g, 1e-12).unwrap());
        let s = single_of_sums(&parts, 0.0, FRAC_PI_2, DOUBLE_OF_TAU, &[0, 2], 1e-12).unwrap();
        for (row, sums) in d.iter().zip(&s) {
            let a = row[0].as_ref().unwrap().value;
            let b = sums.conclusive_visibility().unwrap().value;
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn mixture_sums_are_linear() {
        let model = InjectionModel::new(0.6, 0.7).unwrap();
        let parts = injected_mixture(&model, 0.0, 1e-12).unwrap();
        let ks = [0, 2, 4];
        let whole = single_of_sums(&parts, 0.0, 0.0, 0.9, &ks, 1e-12).unwrap();
        let mut combined = vec![DichotomicSums::default(); ks.len()];
        for (w, state) in &parts {
            let s = single_of_sums(&[(1.0, state.clone())], 0.0, 0.0, 0.9, &ks, 1e-12).unwrap();
            for (c, x) in combined.iter_mut().zip(s) {
                *c = c.add(x.scaled(*w));
            }
        }
        for (a, b) in whole.iter().zip(&combined) {
            assert!((a.plus - b.plus).abs() < EPS);
            assert!((a.minus - b.minus).abs() < EPS);
            assert!((a.tie - b.tie).abs() < EPS);
            assert!((a.inconclusive - b.inconclusive).abs() < EPS);
        }
    }

    #[test]
    fn open_shutter_fringe_is_the_bare_macro_fringe() {
        let g = 0.6;
        let alphas = [0.0, 0.4, 1.1, 2.0];
        let curve = fringe_pattern_with(&alphas, 0.3, FRAC_PI_4, 0, g, 1.0 - 1e-9, 1e-12).unwrap();
        for (alpha, y) in curve.samples {
            let state = macroqubit_state(alpha, g, 1e-12).unwrap().expressed_in(0.3);
            let mut plus = 0.0;
            for (pair, w) in state.amplitudes() {
                let d = pair.imbalance();
                plus += w.probability() * if d > 0 { 1.0 } else if d == 0 { 0.5 } else { 0.0 };
            }
            assert!((y.unwrap() - plus / state.norm_sqr()).abs() < 1e-8);
        }
    }

    #[test]
    fn golden_section_finds_a_cosine_peak() {
        let (x, y) = golden_max(|x| Ok((x - 0.7).cos()), 0.0, 1.5, 1e-9).unwrap();
        assert!((x - 0.7).abs() < 1e-6);
        assert!((y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ideal_singlet_reaches_tsirelson() {
        let model = MicroMacroModel::new(0.0, 1.0, None, 0).unwrap();
        let s = chsh_value(0.0, FRAC_PI_2, FRAC_PI_4, -FRAC_PI_4, &model).unwrap();
        assert!((s.abs() - 2.0 * SQRT_2).abs() < 1e-9, "{s}");
        let e = correlation(0.3, 0.3, &model).unwrap();
        assert!((e.value + 1.0).abs() < 1e-12);
        assert!((e.pass_probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shutter_opening_ignores_the_micro_setting() {
        let spec = FilterSpec::DoubleOf { k: 2, basis1: 0.0, basis2: FRAC_PI_4 };
        let model = MicroMacroModel::new(0.5, 0.9, Some(spec), 0).unwrap().with_eps_trunc(1e-12);
        let p0 = correlation(0.0, 0.2, &model).unwrap().pass_probability;
        for a in [0.4, 1.3, 2.9] {
            let p = correlation(a, 0.2, &model).unwrap().pass_probability;
            assert!((p - p0).abs() < 1e-12, "{p} vs {p0}");
        }
    }

    #[test]
    fn chsh_is_phase_covariant() {
        let delta = 0.37;
        let angles = [0.1, 1.2, 0.5, 2.6];
        let check = |spec: Option<FilterSpec>, rotated: Option<FilterSpec>| {
            let m = MicroMacroModel::new(0.5, 0.9, spec, 0).unwrap().with_eps_trunc(1e-12);
            let r = MicroMacroModel::new(0.5, 0.9, rotated, 0).unwrap().with_eps_trunc(1e-12);
            let s = chsh_value(angles[0], angles[1], angles[2], angles[3], &m).unwrap();
            let [a, ap, b, bp] = angles.map(|x| x + delta);
            let t = chsh_value(a, ap, b, bp, &r).unwrap();
            assert!((s - t).abs() < 1e-8, "{s} vs {t}");
        };
        check(None, None);
        check(Some(FilterSpec::Id { h: 1 }), Some(FilterSpec::Id { h: 1 }));
        check(
            Some(FilterSpec::DoubleOf { k: 1, basis1: 0.0, basis2: FRAC_PI_4 }),
            Some(FilterSpec::DoubleOf { k: 1, basis1: delta, basis2: FRAC_PI_4 + delta }),
        );
    }

    #[test]
    fn sweep_needs_an_even_grid() {
        let model = MicroMacroModel::new(0.0, 1.0, None, 0).unwrap();
        assert!(chsh_sweep(&model, 5).is_err());
        let s = chsh_sweep(&model, 8).unwrap();
        assert!((s.max_abs_s - 2.0 * SQRT_2).abs() < 1e-9);
        assert!(MicroMacroModel::new(0.5, 0.0, None, 0).is_err());
    }
}
