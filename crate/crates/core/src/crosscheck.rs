//! Independent closed-form evaluations used to audit the split engine.
//!
//! These follow the transcribed series term by term instead of composing
//! beam-splitter and rotation kernels, so agreement with [`crate::splitter`]
//! checks both paths at once.

use std::collections::BTreeMap;

use crate::amplifier::{gain_params, macroqubit_state};
use crate::error::{domain, Result};
use crate::fock::{check_transmittivity, ln_factorial, pow_log, LogWeight, ModePair};
use crate::state::{Basis, TwoModeState};

/// Distribution of the transmitted `{+,-}` counts of the amplified `+` photon
/// after `(p, q)` is detected on the reflected arm in the same basis, from
/// the direct series
/// `(1/C^2) (Gamma/2)^i (-Gamma/2)^j (2i+1)!(2j)! / (i! j! sqrt(m! n! p! q!))
///  tau^((m+n)/2) (i sqrt(1-tau))^(p+q)` with `2i + 1 = m + p`, `2j = n + q`.
pub fn same_basis_conditional(g: f64, tau: f64, detected: ModePair, eps_trunc: f64) -> Result<BTreeMap<ModePair, f64>> {
    check_transmittivity(tau)?;
    let params = gain_params(g)?;
    let max_total = macroqubit_state(0.0, g, eps_trunc)?.max_total() as u64;
    let (p, q) = (detected.n_a as u64, detected.n_b as u64);
    let mut out = BTreeMap::new();
    let mut mass = 0.0;
    for m in 0..=max_total {
        if (m + p) % 2 == 0 {
            continue;
        }
        let i = (m + p - 1) / 2;
        let mut n = q % 2;
        while m + n + p + q <= max_total {
            let j = (n + q) / 2;
            let log = (i + j) as f64 * (params.gamma / 2.0).ln() - 2.0 * params.c.ln()
                + ln_factorial(2 * i + 1)
                + ln_factorial(2 * j)
                - ln_factorial(i)
                - ln_factorial(j)
                - 0.5 * (ln_factorial(m) + ln_factorial(n) + ln_factorial(p) + ln_factorial(q))
                + pow_log(tau, (m + n) as f64 / 2.0)
                + pow_log(1.0 - tau, (p + q) as f64 / 2.0);
            let prob = (2.0 * log).exp();
            mass += prob;
            out.insert(ModePair::new(m as u32, n as u32), prob);
            n += 2;
        }
    }
    normalize(out, mass, detected)
}

fn normalize(mut table: BTreeMap<ModePair, f64>, mass: f64, detected: ModePair) -> Result<BTreeMap<ModePair, f64>> {
    if !(mass > 0.0) {
        return domain(format!("reflected outcome {detected} has zero probability"));
    }
    for v in table.values_mut() {
        *v /= mass;
    }
    Ok(table)
}

/// One `(j, s)` term of the printed conditional-probability series for the
/// circular macro-qubit measured in `{+,-}` on the reflected arm, before
/// squaring; `None` where a factorial argument would be negative.
fn printed_term(m: i64, n: i64, p: i64, q: i64, j: i64, s: i64, log_half_gamma: f64) -> Option<LogWeight> {
    let total = m + n + p + q;
    let i = (total - 2 * j - 1) / 2;
    let args = [i, j, total - 2 * j, n + q + s - 2 * j, s, 2 * j - n - s, p - s];
    if args.iter().any(|&a| a < 0) {
        return None;
    }
    let lf = |x: i64| ln_factorial(x as u64);
    let log = 0.5 * (total - 1) as f64 * log_half_gamma - lf(i) - lf(j) + lf(total - 2 * j) + lf(2 * j)
        - lf(n + q + s - 2 * j)
        - lf(s)
        - lf(2 * j - n - s)
        - lf(p - s);
    let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
    Some(LogWeight::from_real(sign).scale_log(log))
}

/// The printed conditional distribution `P(m, n | p, q)` of the transmitted
/// `{R, L}` counts, renormalized over `(m, n)` for the fixed detection.
///
/// The printed double sum over `(j, s)` and its copy `(i, r)` with sign
/// `(-1)^(r - s)` is the square of a single signed sum, which is what is
/// evaluated here; the constant prefactors drop out on renormalization.
pub fn printed_conditional(g: f64, tau: f64, detected: ModePair, max_total: u32) -> Result<BTreeMap<ModePair, f64>> {
    check_transmittivity(tau)?;
    let params = gain_params(g)?;
    if params.gamma == 0.0 {
        return domain("the printed series needs non-zero gain");
    }
    let log_half_gamma = (params.gamma / 2.0).ln();
    let (p, q) = (detected.n_a as i64, detected.n_b as i64);
    let mut out = BTreeMap::new();
    let mut mass = 0.0;
    for m in 0..=max_total as i64 {
        for n in 0..=(max_total as i64 - m) {
            let total = m + n + p + q;
            if total % 2 == 0 || total > max_total as i64 {
                continue;
            }
            let mut sum = 0.0;
            for j in 0..=(total - 1) / 2 {
                for s in 0..=(2 * j - n).max(0) {
                    if let Some(w) = printed_term(m, n, p, q, j, s, log_half_gamma) {
                        sum += w.to_complex().re;
                    }
                }
            }
            let log_rest = pow_log(tau, (m + n) as f64) + pow_log(1.0 - tau, (p + q) as f64)
                - ln_factorial(m as u64)
                - ln_factorial(n as u64);
            let prob = sum * sum * log_rest.exp();
            if prob > 0.0 {
                mass += prob;
                out.insert(ModePair::new(m as u32, n as u32), prob);
            }
        }
    }
    normalize(out, mass, detected)
}

/// The circular macro-qubit table exactly as transcribed, with factors
/// `(i Gamma/2)^i (i Gamma/2)^j` on `|2i+1 R, 2j L>`.
///
/// This differs from the amplified `R` photon by a sign `(-1)^j` that no
/// photon-number phase can absorb. The printed conditional series belongs to
/// the amplified photon, not to this table.
pub fn printed_circular_state(g: f64, eps_trunc: f64) -> Result<TwoModeState> {
    let physical = macroqubit_state(std::f64::consts::FRAC_PI_2, g, eps_trunc)?;
    let amps: Vec<_> = physical
        .amplitudes()
        .map(|(pair, w)| {
            let i = (pair.n_a - 1) / 2;
            let j = pair.n_b / 2;
            let z = LogWeight::new(w.log_magnitude(), 0.0) * LogWeight::i_power((i + j) as i64);
            (pair, z.to_complex())
        })
        .collect();
    Ok(TwoModeState::from_amplitudes(Basis::Equatorial(std::f64::consts::FRAC_PI_2), amps))
}
