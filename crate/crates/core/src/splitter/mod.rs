//! Unbalanced beam splitter and the reflected-arm basis changes.
//!
//! Transmitted photons pick up `sqrt(tau)` and reflected ones
//! `i sqrt(1 - tau)`. For the two-branch scheme the reflected light is split
//! again on a balanced splitter, the second branch picking up an extra `i`.

pub(crate) mod blocks;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{check_transmittivity, LogWeight, ModePair};
use crate::state::{Basis, TwoModeState};
use blocks::{plan_three_way, plan_two_way, rotate_branches, rotate_columns, three_way_block, two_way_block};

/// Pruning budget used when none is given: far below every tolerance in use.
pub const DEFAULT_PRUNE_BUDGET: f64 = 1e-14;

/// Rotation angle re-expressing amplitudes of basis `from` in basis `to`.
pub(crate) fn basis_shift(from: f64, to: f64) -> f64 {
    from - to
}

/// Working-basis angle for a state: its own label, or `fallback` for H/V.
pub(crate) fn working_angle(state: &TwoModeState, fallback: f64) -> f64 {
    state.basis().angle().unwrap_or(fallback)
}

#[derive(Clone, Debug)]
struct JointBlock {
    total: usize,
    refl: usize,
    /// row-major `[t_a][r_a]`
    amps: Vec<Complex64>,
}

/// Joint amplitudes over transmitted and reflected occupations.
#[derive(Clone, Debug)]
pub struct JointSplitState {
    tau: f64,
    trans_basis: f64,
    refl_basis: f64,
    blocks: Vec<JointBlock>,
    trunc_tail: f64,
}

impl JointSplitState {
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn trans_basis(&self) -> f64 {
        self.trans_basis
    }

    pub fn refl_basis(&self) -> f64 {
        self.refl_basis
    }

    /// Input truncation tail plus pruned block mass.
    pub fn trunc_tail(&self) -> f64 {
        self.trunc_tail
    }

    fn find(&self, total: usize, refl: usize) -> Option<&JointBlock> {
        self.blocks
            .binary_search_by(|b| (b.total, b.refl).cmp(&(total, refl)))
            .ok()
            .map(|i| &self.blocks[i])
    }

    pub fn amplitude(&self, trans: ModePair, refl: ModePair) -> LogWeight {
        let r = refl.total() as usize;
        let n = trans.total() as usize + r;
        match self.find(n, r) {
            Some(b) => LogWeight::from_complex(b.amps[trans.n_a as usize * (r + 1) + refl.n_a as usize]),
            None => LogWeight::NULL,
        }
    }

    /// Non-zero `(trans, refl, amplitude)` triples in block order.
    pub fn amplitudes(&self) -> impl Iterator<Item = (ModePair, ModePair, Complex64)> + '_ {
        self.blocks.iter().flat_map(|b| {
            let cols = b.refl + 1;
            let t = b.total - b.refl;
            b.amps.iter().enumerate().filter(|(_, z)| z.norm_sqr() > 0.0).map(move |(i, z)| {
                let (t_a, r_a) = (i / cols, i % cols);
                (
                    ModePair::new(t_a as u32, (t - t_a) as u32),
                    ModePair::new(r_a as u32, (b.refl - r_a) as u32),
                    *z,
                )
            })
        })
    }

    pub fn probabilities(&self) -> BTreeMap<(ModePair, ModePair), f64> {
        self.amplitudes().map(|(t, r, z)| ((t, r), z.norm_sqr())).collect()
    }

    pub fn total_probability(&self) -> f64 {
        self.blocks.iter().flat_map(|b| b.amps.iter()).map(|z| z.norm_sqr()).sum()
    }

    /// Distribution of reflected counts in the reflected basis.
    pub fn refl_marginal(&self) -> BTreeMap<ModePair, f64> {
        let mut out = BTreeMap::new();
        for (_, r, z) in self.amplitudes() {
            *out.entry(r).or_insert(0.0) += z.norm_sqr();
        }
        out
    }

    /// Distribution of transmitted counts in the transmitted basis.
    pub fn trans_marginal(&self) -> BTreeMap<ModePair, f64> {
        let mut out = BTreeMap::new();
        for (t, _, z) in self.amplitudes() {
            *out.entry(t).or_insert(0.0) += z.norm_sqr();
        }
        out
    }
}

/// Splits `state` with the transmitted arm kept in the state's own basis (or
/// `refl_basis` for an H/V state) and the reflected arm read in `refl_basis`.
pub fn ubs_joint(state: &TwoModeState, tau: f64, refl_basis: f64) -> Result<JointSplitState> {
    let trans = working_angle(state, refl_basis);
    ubs_joint_in(state, tau, trans, refl_basis, DEFAULT_PRUNE_BUDGET)
}

/// General form of [`ubs_joint`] with explicit arm bases and pruning budget.
pub fn ubs_joint_in(
    state: &TwoModeState,
    tau: f64,
    trans_basis: f64,
    refl_basis: f64,
    prune_budget: f64,
) -> Result<JointSplitState> {
    check_transmittivity(tau)?;
    let work = state.expressed_in(trans_basis);
    let plan = plan_two_way(&work.sector_masses(), tau, prune_budget);
    let shift = basis_shift(trans_basis, refl_basis);
    let blocks = plan
        .keys
        .iter()
        .map(|&(n, r)| JointBlock {
            total: n,
            refl: r,
            amps: rotate_columns(&two_way_block(work.sector(n), n, r, tau), r, shift),
        })
        .collect();
    Ok(JointSplitState {
        tau,
        trans_basis,
        refl_basis,
        blocks,
        trunc_tail: state.trunc_tail() + plan.pruned,
    })
}

/// Normalized transmitted state given the reflected outcome `detected`.
pub fn conditional_transmitted(joint: &JointSplitState, detected: ModePair) -> Result<TwoModeState> {
    let r = detected.total() as usize;
    let mut amps = Vec::new();
    for b in joint.blocks.iter().filter(|b| b.refl == r) {
        let t = b.total - r;
        for t_a in 0..=t {
            let z = b.amps[t_a * (r + 1) + detected.n_a as usize];
            if z.norm_sqr() > 0.0 {
                amps.push((ModePair::new(t_a as u32, (t - t_a) as u32), z));
            }
        }
    }
    let mass: f64 = amps.iter().map(|(_, z)| z.norm_sqr()).sum();
    if mass <= 0.0 {
        return Err(Error::UnreachableOutcome(format!(
            "reflected outcome {detected} has zero probability"
        )));
    }
    TwoModeState::from_amplitudes(Basis::Equatorial(joint.trans_basis), amps).normalized()
}

/// One joint outcome of the transmitted arm and the two reflected branches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreeWaySplitOutcome {
    pub trans: ModePair,
    pub branch1: ModePair,
    pub branch2: ModePair,
    pub probability: f64,
}

/// Splits `state` on the unbalanced splitter, then the reflected light on a
/// balanced one, reading the branches in `beta` and `beta_prime`. The
/// transmitted arm stays in the state's own basis (`beta` for H/V input).
pub fn three_way_split(state: &TwoModeState, tau: f64, beta: f64, beta_prime: f64) -> Result<Vec<ThreeWaySplitOutcome>> {
    let trans = working_angle(state, beta);
    three_way_split_in(state, tau, trans, beta, beta_prime, DEFAULT_PRUNE_BUDGET)
}

/// General form of [`three_way_split`] with explicit transmitted basis and
/// pruning budget. Outcomes are ordered by `(trans, branch1, branch2)`.
pub fn three_way_split_in(
    state: &TwoModeState,
    tau: f64,
    trans_basis: f64,
    beta: f64,
    beta_prime: f64,
    prune_budget: f64,
) -> Result<Vec<ThreeWaySplitOutcome>> {
    check_transmittivity(tau)?;
    let work = state.expressed_in(trans_basis);
    let plan = plan_three_way(&work.sector_masses(), tau, prune_budget);
    let (phi_1, phi_2) = (basis_shift(trans_basis, beta), basis_shift(trans_basis, beta_prime));
    let mut out = Vec::new();
    for &(n, x, y) in &plan.keys {
        let tensor = rotate_branches(&three_way_block(work.sector(n), n, x, y, tau), x, y, phi_1, phi_2);
        let t = n - x - y;
        let (dx, dy) = (x + 1, y + 1);
        for (i, z) in tensor.iter().enumerate() {
            let p = z.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let (t_a, rest) = (i / (dx * dy), i % (dx * dy));
            let (x_a, y_a) = (rest / dy, rest % dy);
            out.push(ThreeWaySplitOutcome {
                trans: ModePair::new(t_a as u32, (t - t_a) as u32),
                branch1: ModePair::new(x_a as u32, (x - x_a) as u32),
                branch2: ModePair::new(y_a as u32, (y - y_a) as u32),
                probability: p,
            });
        }
    }
    out.sort_by_key(|a| (a.trans, a.branch1, a.branch2));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplifier::macroqubit_state;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn single_photon(beta: f64) -> TwoModeState {
        TwoModeState::fock(Basis::Equatorial(beta), ModePair::new(1, 0))
    }

    #[test]
    fn single_photon_split() {
        let joint = ubs_joint(&single_photon(0.0), 0.9, 0.0).unwrap();
        let t = joint.trans_marginal();
        let r = joint.refl_marginal();
        assert!((t[&ModePair::new(1, 0)] - 0.9).abs() < 1e-15);
        assert!((r[&ModePair::new(1, 0)] - 0.1).abs() < 1e-15);
        let a = joint.amplitude(ModePair::VACUUM, ModePair::new(1, 0)).to_complex();
        assert!((a - Complex64::new(0.0, 0.1f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn unit_transmittivity_leaves_state_untouched() {
        let s = macroqubit_state(0.0, 0.5, 1e-12).unwrap();
        let joint = ubs_joint(&s, 1.0, 0.7).unwrap();
        assert_eq!(joint.refl_marginal().keys().copied().collect::<Vec<_>>(), vec![ModePair::VACUUM]);
        let back = conditional_transmitted(&joint, ModePair::VACUUM).unwrap();
        for (pair, w) in s.amplitudes() {
            assert!((back.amplitude(pair).to_complex() - w.to_complex()).norm() < 1e-10);
        }
    }

    #[test]
    fn joint_is_normalized_with_odd_totals() {
        let s = macroqubit_state(0.0, 0.8, 1e-12).unwrap();
        let joint = ubs_joint(&s, 0.9, FRAC_PI_2).unwrap();
        assert!((joint.total_probability() + joint.trunc_tail() - 1.0).abs() < 1e-10);
        for (t, r, _) in joint.amplitudes() {
            assert_eq!((t.total() + r.total()) % 2, 1);
        }
    }

    #[test]
    fn reflected_totals_independent_of_basis() {
        let s = macroqubit_state(0.0, 0.9, 1e-12).unwrap();
        let totals = |basis: f64| {
            let mut v = vec![0.0; 64];
            for (r, p) in ubs_joint(&s, 0.8, basis).unwrap().refl_marginal() {
                v[r.total() as usize] += p;
            }
            v
        };
        let (a, b) = (totals(0.0), totals(1.1));
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn conditioning_reassembles_transmitted_marginal() {
        let s = macroqubit_state(0.0, 0.6, 1e-12).unwrap();
        let joint = ubs_joint(&s, 0.85, FRAC_PI_4).unwrap();
        let marginal = joint.trans_marginal();
        let mut rebuilt: BTreeMap<ModePair, f64> = BTreeMap::new();
        for (detected, pd) in joint.refl_marginal() {
            let cond = conditional_transmitted(&joint, detected).unwrap();
            for (pair, p) in cond.probabilities() {
                *rebuilt.entry(pair).or_insert(0.0) += pd * p;
            }
        }
        for (pair, p) in &marginal {
            assert!((rebuilt.get(pair).copied().unwrap_or(0.0) - p).abs() < 1e-10);
        }
    }

    #[test]
    fn unreachable_outcome_is_an_error() {
        let joint = ubs_joint(&single_photon(0.0), 0.9, 0.0).unwrap();
        assert!(matches!(
            conditional_transmitted(&joint, ModePair::new(2, 0)),
            Err(Error::UnreachableOutcome(_))
        ));
    }

    #[test]
    fn three_way_single_photon_weights() {
        let out = three_way_split(&single_photon(0.3), 0.9, 0.0, 1.0).unwrap();
        let mut weights = [0.0; 3];
        for o in &out {
            assert_eq!(o.trans.total() + o.branch1.total() + o.branch2.total(), 1);
            if o.trans.total() == 1 {
                weights[0] += o.probability;
            } else if o.branch1.total() == 1 {
                weights[1] += o.probability;
            } else {
                weights[2] += o.probability;
            }
        }
        assert!((weights[0] - 0.9).abs() < 1e-15);
        assert!((weights[1] - 0.05).abs() < 1e-15 && (weights[2] - 0.05).abs() < 1e-15);
    }

    #[test]
    fn equal_branch_bases_merge_to_two_way_marginal() {
        let s = macroqubit_state(0.0, 0.5, 1e-12).unwrap();
        let beta = 0.6;
        let joint = ubs_joint(&s, 0.9, beta).unwrap().refl_marginal();
        let out = three_way_split(&s, 0.9, beta, beta).unwrap();
        let mut merged: BTreeMap<ModePair, f64> = BTreeMap::new();
        for o in &out {
            let r = ModePair::new(o.branch1.n_a + o.branch2.n_a, o.branch1.n_b + o.branch2.n_b);
            *merged.entry(r).or_insert(0.0) += o.probability;
        }
        for (r, p) in &joint {
            assert!((merged.get(r).copied().unwrap_or(0.0) - p).abs() < 1e-10, "{r}");
        }
    }

    #[test]
    fn three_way_normalized() {
        let s = macroqubit_state(0.0, 0.5, 1e-12).unwrap();
        let total: f64 = three_way_split(&s, 0.9, 0.0, FRAC_PI_4).unwrap().iter().map(|o| o.probability).sum();
        assert!((total - 1.0).abs() < 1e-8);
    }
}
