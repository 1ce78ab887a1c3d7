//! Closed-form output of the phase-covariant amplifier.
//!
//! With gain `g` the amplifier acts on the equatorial modes of any basis as a
//! pair of opposite single-mode squeezers, so an injected photon `pi_beta`
//! becomes, in its own basis,
//!
//! `(1/C^2) sum_ij (Gamma/2)^i (-Gamma/2)^j sqrt((2i+1)! (2j)!)/(i! j!) |2i+1, 2j>`
//!
//! with `Gamma = tanh g` and `C = cosh g`. Representations of the same state in
//! other bases differ by a phase that depends only on the total photon number,
//! which no photon-counting observable downstream can see; tables are therefore
//! labelled with the basis of the injected photon and rotated on demand.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fock::{ln_factorial, LogWeight, ModePair};
use crate::state::{Basis, TwoModeState};

/// Default truncation mass.
pub const DEFAULT_EPS_TRUNC: f64 = 1e-10;

/// Hard ceiling on the series length, reached only for absurd gains.
const MAX_TOTAL_PHOTONS: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainParams {
    pub g: f64,
    /// `tanh g`
    pub gamma: f64,
    /// `cosh g`
    pub c: f64,
    /// Mean spontaneous photons per mode, `sinh^2 g`.
    pub mean_photons: f64,
}

pub fn gain_params(g: f64) -> Result<GainParams> {
    if !(g >= 0.0) || !g.is_finite() {
        return domain(format!("gain must be finite and non-negative, got {g}"));
    }
    Ok(GainParams {
        g,
        gamma: g.tanh(),
        c: g.cosh(),
        mean_photons: g.sinh().powi(2),
    })
}

fn check_eps(eps_trunc: f64) -> Result<()> {
    if !(eps_trunc > 0.0) {
        return domain(format!("truncation mass must be positive, got {eps_trunc}"));
    }
    Ok(())
}

/// Amplified single photon `pi_beta`, expressed in the basis `beta`.
pub fn macroqubit_state(beta: f64, g: f64, eps_trunc: f64) -> Result<TwoModeState> {
    let params = gain_params(g)?;
    check_eps(eps_trunc)?;
    let basis = Basis::Equatorial(beta);
    if params.gamma == 0.0 {
        return Ok(TwoModeState::fock(basis, ModePair::new(1, 0)));
    }
    let log_norm = -2.0 * params.c.ln();
    let log_half_gamma = (params.gamma / 2.0).ln();
    let x = params.gamma * params.gamma;
    let mut sectors: Vec<Vec<LogWeight>> = Vec::new();
    let mut n = 0usize;
    loop {
        // sector 2n (empty) then sector 2n + 1 holding all i + j = n terms
        sectors.push(vec![LogWeight::NULL; 2 * n + 1]);
        let mut odd = vec![LogWeight::NULL; 2 * n + 2];
        for j in 0..=n {
            let i = n - j;
            let log = log_norm
                + n as f64 * log_half_gamma
                + 0.5 * (ln_factorial(2 * j as u64) + ln_factorial(2 * i as u64 + 1))
                - ln_factorial(j as u64)
                - ln_factorial(i as u64);
            odd[2 * i + 1] = LogWeight::new(log, 0.0) * LogWeight::i_power(2 * j as i64);
        }
        sectors.push(odd);
        // sector 2m + 1 holds (m + 1) x^m / C^4, x = Gamma^2
        let tail = x.powi(n as i32 + 1) * ((n + 2) as f64 - (n + 1) as f64 * x);
        if tail < eps_trunc {
            return Ok(TwoModeState::from_sectors(basis, sectors, tail));
        }
        n += 1;
        if 2 * n + 1 > MAX_TOTAL_PHOTONS {
            return domain(format!("gain {g} needs more than {MAX_TOTAL_PHOTONS} photons"));
        }
    }
}

/// Amplified vacuum in the H/V representation: `(1/C) sum_n Gamma^n |n, n>`.
pub fn spontaneous_state(g: f64, eps_trunc: f64) -> Result<TwoModeState> {
    let params = gain_params(g)?;
    check_eps(eps_trunc)?;
    if params.gamma == 0.0 {
        return Ok(TwoModeState::fock(Basis::Linear, ModePair::VACUUM));
    }
    let log_norm = -params.c.ln();
    let log_gamma = params.gamma.ln();
    let mut sectors: Vec<Vec<LogWeight>> = Vec::new();
    let mut n = 0usize;
    loop {
        let mut diag = vec![LogWeight::NULL; 2 * n + 1];
        diag[n] = LogWeight::new(log_norm + n as f64 * log_gamma, 0.0);
        sectors.push(diag);
        // geometric tail: sum_{m > n} Gamma^{2m} / C^2 = Gamma^{2(n+1)}
        let tail = (2.0 * (n as f64 + 1.0) * log_gamma).exp();
        if tail < eps_trunc {
            return Ok(TwoModeState::from_sectors(Basis::Linear, sectors, tail));
        }
        sectors.push(vec![LogWeight::NULL; 2 * n + 2]);
        n += 1;
        if 2 * n > MAX_TOTAL_PHOTONS {
            return domain(format!("gain {g} needs more than {MAX_TOTAL_PHOTONS} photons"));
        }
    }
}

/// Spontaneous emission expressed in the equatorial basis `beta`.
pub fn spontaneous_state_in(beta: f64, g: f64, eps_trunc: f64) -> Result<TwoModeState> {
    Ok(spontaneous_state(g, eps_trunc)?.expressed_in(beta))
}

/// Mean photon numbers `(N_+, N_-)` in the basis of an injected equatorial
/// photon at relative phase `phi`, for injection probability `p`.
pub fn mean_photons(phi: f64, p: f64, g: f64) -> Result<(f64, f64)> {
    check_probability(p)?;
    let m = gain_params(g)?.mean_photons;
    let stimulated = 0.5 * (2.0 * m + 1.0);
    let plus = p * (m + stimulated * (1.0 + phi.cos())) + (1.0 - p) * m;
    let minus = p * (m + stimulated * (1.0 - phi.cos())) + (1.0 - p) * m;
    Ok((plus, minus))
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("probability {p} outside [0, 1]"));
    }
    Ok(())
}

/// Partially mode-matched injection: with probability `p` the photon enters
/// the amplifier, otherwise only vacuum is amplified.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InjectionModel {
    pub p: f64,
    pub g: f64,
}

impl InjectionModel {
    pub fn new(p: f64, g: f64) -> Result<Self> {
        check_probability(p)?;
        gain_params(g)?;
        Ok(InjectionModel { p, g })
    }
}

/// Weighted pure-state components of the amplified mixture, in basis `beta`.
pub fn injected_mixture(
    model: &InjectionModel,
    beta: f64,
    eps_trunc: f64,
) -> Result<Vec<(f64, TwoModeState)>> {
    check_probability(model.p)?;
    let mut parts = Vec::with_capacity(2);
    if model.p > 0.0 {
        parts.push((model.p, macroqubit_state(beta, model.g, eps_trunc)?));
    }
    if model.p < 1.0 {
        parts.push((1.0 - model.p, spontaneous_state_in(beta, model.g, eps_trunc)?));
    }
    Ok(parts)
}
