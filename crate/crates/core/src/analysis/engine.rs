//! Block-streaming tallies of transmitted imbalance against a reflected-arm
//! filter level. Nothing larger than one `(N, R)` block is ever held.

use num_complex::Complex64;

use crate::error::Result;
use crate::fock::check_transmittivity;
use crate::splitter::basis_shift;
use crate::splitter::blocks::{branch_pass_operators, plan_two_way, quadratic_form, rotate_columns, two_way_block};
use crate::state::TwoModeState;

/// How the reflected arm is scored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum ReflLevel {
    /// Total reflected photons.
    Total,
    /// `|r_a - r_b|` read in the given basis.
    Imbalance { basis: f64 },
}

/// Joint probability over a reflected-arm row and the transmitted imbalance
/// `d = t_a - t_b` (stored at `d + offset`).
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Histogram {
    pub offset: usize,
    pub rows: Vec<Vec<f64>>,
    pub pruned: f64,
}

impl Histogram {
    fn new(rows: usize, offset: usize) -> Self {
        Histogram {
            offset,
            rows: vec![vec![0.0; 2 * offset + 1]; rows],
            pruned: 0.0,
        }
    }

    fn add(&mut self, row: usize, d: i64, p: f64) {
        let idx = (d + self.offset as i64) as usize;
        self.rows[row][idx] += p;
    }

    /// Transmitted imbalance distribution summed over the selected rows.
    pub fn collapse(&self, mut keep: impl FnMut(usize) -> bool) -> Vec<f64> {
        let mut out = vec![0.0; 2 * self.offset + 1];
        for (i, row) in self.rows.iter().enumerate() {
            if keep(i) {
                for (o, v) in out.iter_mut().zip(row) {
                    *o += v;
                }
            }
        }
        out
    }
}

fn max_total(parts: &[(f64, TwoModeState)]) -> usize {
    parts.iter().map(|(_, s)| s.max_total()).max().unwrap_or(0)
}

/// Rows indexed by reflected level (`Total` or imbalance), columns by
/// transmitted imbalance in `final_basis`.
pub(crate) fn level_histogram(
    parts: &[(f64, TwoModeState)],
    tau: f64,
    final_basis: f64,
    level: ReflLevel,
    budget: f64,
) -> Result<Histogram> {
    check_transmittivity(tau)?;
    let n_max = max_total(parts);
    let mut hist = Histogram::new(n_max + 1, n_max);
    for (weight, state) in parts {
        let work = state.expressed_in(final_basis);
        let plan = plan_two_way(&work.sector_masses(), tau, budget);
        hist.pruned += weight * plan.pruned;
        for &(n, r) in &plan.keys {
            let t = n - r;
            let mut block = two_way_block(work.sector(n), n, r, tau);
            if let ReflLevel::Imbalance { basis } = level {
                block = rotate_columns(&block, r, basis_shift(final_basis, basis));
            }
            let cols = r + 1;
            for t_a in 0..=t {
                let d = 2 * t_a as i64 - t as i64;
                for r_a in 0..=r {
                    let p = block[t_a * cols + r_a].norm_sqr();
                    if p == 0.0 {
                        continue;
                    }
                    let row = match level {
                        ReflLevel::Total => r,
                        ReflLevel::Imbalance { .. } => (2 * r_a as i64 - r as i64).unsigned_abs() as usize,
                    };
                    hist.add(row, d, weight * p);
                }
            }
        }
    }
    Ok(hist)
}

/// Rows indexed by position in `ks`: probability that both reflected
/// branches, read in `beta1` and `beta2`, show imbalance above `ks[i]`,
/// jointly with the transmitted imbalance in `final_basis`.
pub(crate) fn double_branch_histogram(
    parts: &[(f64, TwoModeState)],
    tau: f64,
    final_basis: f64,
    beta1: f64,
    beta2: f64,
    ks: &[i64],
    budget: f64,
) -> Result<Histogram> {
    check_transmittivity(tau)?;
    let n_max = max_total(parts);
    let mut hist = Histogram::new(ks.len(), n_max);
    let mut plans = Vec::with_capacity(parts.len());
    let mut r_max = 0;
    for (_, state) in parts {
        let work = state.expressed_in(final_basis);
        let plan = plan_two_way(&work.sector_masses(), tau, budget);
        r_max = plan.keys.iter().map(|&(_, r)| r).max().unwrap_or(0).max(r_max);
        plans.push((work, plan));
    }
    let ops = branch_pass_operators(
        r_max,
        basis_shift(final_basis, beta1),
        basis_shift(final_basis, beta2),
        ks,
    );
    let nonzero: Vec<Vec<bool>> = ops
        .iter()
        .map(|per_r| per_r.iter().map(|op| op.iter().any(|z| *z != Complex64::new(0.0, 0.0))).collect())
        .collect();
    for ((weight, _), (work, plan)) in parts.iter().zip(&plans) {
        hist.pruned += weight * plan.pruned;
        for &(n, r) in &plan.keys {
            let t = n - r;
            let block = two_way_block(work.sector(n), n, r, tau);
            let cols = r + 1;
            for t_a in 0..=t {
                let row = &block[t_a * cols..(t_a + 1) * cols];
                if row.iter().all(|z| z.norm_sqr() == 0.0) {
                    continue;
                }
                let d = 2 * t_a as i64 - t as i64;
                for (ki, per_r) in ops.iter().enumerate() {
                    if !nonzero[ki][r] {
                        continue;
                    }
                    let p = quadratic_form(&per_r[r], row);
                    hist.add(ki, d, weight * p.max(0.0));
                }
            }
        }
    }
    Ok(hist)
}

/// Probability of each reflected imbalance level in `refl_basis`.
pub(crate) fn refl_level_distribution(
    parts: &[(f64, TwoModeState)],
    tau: f64,
    refl_basis: f64,
    budget: f64,
) -> Result<(Vec<f64>, f64)> {
    check_transmittivity(tau)?;
    let n_max = max_total(parts);
    let mut levels = vec![0.0; n_max + 1];
    let mut pruned = 0.0;
    for (weight, state) in parts {
        let work = state.expressed_in(refl_basis);
        let plan = plan_two_way(&work.sector_masses(), tau, budget);
        pruned += weight * plan.pruned;
        for &(n, r) in &plan.keys {
            let block = two_way_block(work.sector(n), n, r, tau);
            let cols = r + 1;
            for (i, z) in block.iter().enumerate() {
                let r_a = i % cols;
                levels[(2 * r_a as i64 - r as i64).unsigned_abs() as usize] += weight * z.norm_sqr();
            }
        }
    }
    Ok((levels, pruned))
}

/// Probability of each reflected total, from sector masses alone.
pub(crate) fn refl_total_distribution(state: &TwoModeState, tau: f64) -> Result<Vec<f64>> {
    check_transmittivity(tau)?;
    let masses = state.sector_masses();
    let mut out = vec![0.0; masses.len()];
    for (n, &pn) in masses.iter().enumerate() {
        if pn == 0.0 {
            continue;
        }
        for (r, slot) in out.iter_mut().enumerate().take(n + 1) {
            *slot += pn * crate::fock::binomial_pmf(n as u64, r as u64, 1.0 - tau);
        }
    }
    Ok(out)
}
