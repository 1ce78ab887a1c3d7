//! Block decomposition of a split state by total and reflected photon number.
//!
//! A two-mode state with `N` photons sent through a beam splitter produces,
//! for every reflected total `R`, a `(T + 1) x (R + 1)` amplitude matrix over
//! `(t_a, r_a)` with `T = N - R`. Each block carries probability
//! `P(N) * Binom(R; N, 1 - tau)` whatever the polarization content, which is
//! what makes mass-based pruning cheap.

use num_complex::Complex64;

use crate::fock::{binomial_pmf, ln_factorial, multinomial_pmf, pow_log, rotation_table, LogWeight};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Kept block keys in ascending order and the total probability dropped.
#[derive(Clone, Debug)]
pub(crate) struct Plan<K> {
    pub keys: Vec<K>,
    pub pruned: f64,
}

/// Drops the lightest candidates while their summed mass stays within `budget`.
fn prune<K: Ord + Copy>(mut candidates: Vec<(f64, K)>, budget: f64) -> Plan<K> {
    candidates.retain(|(m, _)| *m > 0.0);
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut pruned = 0.0;
    let mut first_kept = candidates.len();
    for (i, (m, _)) in candidates.iter().enumerate() {
        if pruned + m > budget {
            first_kept = i;
            break;
        }
        pruned += m;
    }
    let mut keys: Vec<K> = candidates[first_kept..].iter().map(|(_, k)| *k).collect();
    keys.sort();
    Plan { keys, pruned }
}

/// `(N, R)` blocks carrying the sector masses `masses[N]`.
pub(crate) fn plan_two_way(masses: &[f64], tau: f64, budget: f64) -> Plan<(usize, usize)> {
    let mut candidates = Vec::new();
    for (n, &pn) in masses.iter().enumerate() {
        if pn <= 0.0 {
            continue;
        }
        for r in 0..=n {
            candidates.push((pn * binomial_pmf(n as u64, r as u64, 1.0 - tau), (n, r)));
        }
    }
    prune(candidates, budget)
}

/// `(N, X, Y)` blocks for a transmitted arm and two equal reflected branches.
pub(crate) fn plan_three_way(masses: &[f64], tau: f64, budget: f64) -> Plan<(usize, usize, usize)> {
    let half = (1.0 - tau) / 2.0;
    let mut candidates = Vec::new();
    for (n, &pn) in masses.iter().enumerate() {
        if pn <= 0.0 {
            continue;
        }
        for x in 0..=n {
            for y in 0..=(n - x) {
                let counts = [(n - x - y) as u64, x as u64, y as u64];
                let m = pn * multinomial_pmf(&counts, &[tau, half, half]);
                candidates.push((m, (n, x, y)));
            }
        }
    }
    prune(candidates, budget)
}

/// `ln sqrt(n! / (parts...)!)`.
fn half_log_multinomial(n: usize, parts: &[usize]) -> f64 {
    let mut v = ln_factorial(n as u64);
    for &p in parts {
        v -= ln_factorial(p as u64);
    }
    0.5 * v
}

/// Row-major `[t_a][r_a]` block of the `N`-photon sector `sector` for `R`
/// reflected photons, with both arms in the basis of `sector`.
pub(crate) fn two_way_block(sector: &[LogWeight], n: usize, r: usize, tau: f64) -> Vec<Complex64> {
    let t = n - r;
    let cols = r + 1;
    let prefactor = LogWeight::new(pow_log(tau, t as f64 / 2.0) + pow_log(1.0 - tau, r as f64 / 2.0), 0.0)
        * LogWeight::i_power(r as i64);
    let mut block = vec![ZERO; (t + 1) * cols];
    for t_a in 0..=t {
        let t_b = t - t_a;
        for r_a in 0..=r {
            let n_a = t_a + r_a;
            let w = sector[n_a];
            if w.is_null() {
                continue;
            }
            let n_b = n - n_a;
            let r_b = r - r_a;
            let log = half_log_multinomial(n_a, &[t_a, r_a]) + half_log_multinomial(n_b, &[t_b, r_b]);
            block[t_a * cols + r_a] = (w * prefactor).scale_log(log).to_complex();
        }
    }
    block
}

/// Right-multiplies the row-major `rows x (m + 1)` matrix by `U^T`, where `U`
/// is the `m`-photon block of the rotation `phi` (`[out][in]`).
pub(crate) fn rotate_columns(block: &[Complex64], m: usize, phi: f64) -> Vec<Complex64> {
    if phi == 0.0 {
        return block.to_vec();
    }
    let dim = m + 1;
    let table = rotation_table(phi, m);
    let u = table.block(m);
    let mut out = vec![ZERO; block.len()];
    for (row_in, row_out) in block.chunks_exact(dim).zip(out.chunks_exact_mut(dim)) {
        for (o, cell) in row_out.iter_mut().enumerate() {
            let urow = &u[o * dim..(o + 1) * dim];
            *cell = urow.iter().zip(row_in).map(|(a, b)| a * b).sum();
        }
    }
    out
}

/// Amplitude tensor `[t_a][x_a][y_a]` for the `(N, X, Y)` block, all three
/// arms still in the basis of `sector`.
pub(crate) fn three_way_block(sector: &[LogWeight], n: usize, x: usize, y: usize, tau: f64) -> Vec<Complex64> {
    let t = n - x - y;
    let half = (1.0 - tau) / 2.0;
    let prefactor = LogWeight::new(
        pow_log(tau, t as f64 / 2.0) + pow_log(half, (x + y) as f64 / 2.0),
        0.0,
    ) * LogWeight::i_power(x as i64 + 2 * y as i64);
    let (dx, dy) = (x + 1, y + 1);
    let mut tensor = vec![ZERO; (t + 1) * dx * dy];
    for t_a in 0..=t {
        for x_a in 0..=x {
            for y_a in 0..=y {
                let n_a = t_a + x_a + y_a;
                let w = sector[n_a];
                if w.is_null() {
                    continue;
                }
                let log = half_log_multinomial(n_a, &[t_a, x_a, y_a])
                    + half_log_multinomial(n - n_a, &[t - t_a, x - x_a, y - y_a]);
                tensor[(t_a * dx + x_a) * dy + y_a] = (w * prefactor).scale_log(log).to_complex();
            }
        }
    }
    tensor
}

/// Rotates the `x` index of a `[t][x][y]` tensor by `phi_x` and the `y`
/// index by `phi_y`.
pub(crate) fn rotate_branches(
    tensor: &[Complex64],
    x: usize,
    y: usize,
    phi_x: f64,
    phi_y: f64,
) -> Vec<Complex64> {
    let (dx, dy) = (x + 1, y + 1);
    // y index is contiguous
    let mut out = rotate_columns(tensor, y, phi_y);
    if phi_x != 0.0 {
        let table = rotation_table(phi_x, x);
        let u = table.block(x);
        let slab = dx * dy;
        let mut rotated = vec![ZERO; out.len()];
        for (src, dst) in out.chunks_exact(slab).zip(rotated.chunks_exact_mut(slab)) {
            for xo in 0..dx {
                for xi in 0..dx {
                    let c = u[xo * dx + xi];
                    if c == ZERO {
                        continue;
                    }
                    for yy in 0..dy {
                        dst[xo * dy + yy] += c * src[xi * dy + yy];
                    }
                }
            }
        }
        out = rotated;
    }
    out
}

/// Pass operators on the `R`-photon reflected space for the two-branch
/// filter: `R` photons split 50/50, branch one read in a basis rotated by
/// `phi_1` from the working basis and branch two by `phi_2`. Entry `[k][R]` is
/// the row-major `(R + 1)^2` matrix summing `K^dag K` over outcomes whose
/// smaller branch imbalance exceeds `ks[k]`.
pub(crate) fn branch_pass_operators(r_max: usize, phi_1: f64, phi_2: f64, ks: &[i64]) -> Vec<Vec<Vec<Complex64>>> {
    let mut out = vec![Vec::with_capacity(r_max + 1); ks.len()];
    for r in 0..=r_max {
        let dim = r + 1;
        let mut ops = vec![vec![ZERO; dim * dim]; ks.len()];
        for x in 0..=r {
            let y = r - x;
            // K[x_a][y_a] per r_a, stored as tensor [r_a][x_a][y_a]
            let mut tensor = vec![ZERO; dim * (x + 1) * (y + 1)];
            let phase = LogWeight::i_power(y as i64);
            for r_a in 0..=r {
                let r_b = r - r_a;
                for x_a in r_a.saturating_sub(y)..=r_a.min(x) {
                    let y_a = r_a - x_a;
                    let x_b = x - x_a;
                    if x_b > r_b {
                        continue;
                    }
                    let y_b = y - y_a;
                    let log = half_log_multinomial(r_a, &[x_a, y_a])
                        + half_log_multinomial(r_b, &[x_b, y_b])
                        - 0.5 * r as f64 * std::f64::consts::LN_2;
                    tensor[(r_a * (x + 1) + x_a) * (y + 1) + y_a] = phase.scale_log(log).to_complex();
                }
            }
            let rotated = rotate_branches(&tensor, x, y, phi_1, phi_2);
            let slab = (x + 1) * (y + 1);
            for xo in 0..=x {
                let lx = (2 * xo as i64 - x as i64).unsigned_abs();
                for yo in 0..=y {
                    let ly = (2 * yo as i64 - y as i64).unsigned_abs();
                    let level = lx.min(ly);
                    let o = xo * (y + 1) + yo;
                    let col: Vec<Complex64> = (0..dim).map(|r_a| rotated[r_a * slab + o]).collect();
                    if col.iter().all(|z| *z == ZERO) {
                        continue;
                    }
                    for (ki, &k) in ks.iter().enumerate() {
                        if level as i64 <= k {
                            continue;
                        }
                        let op = &mut ops[ki];
                        for i in 0..dim {
                            let ci = col[i].conj();
                            for j in 0..dim {
                                op[i * dim + j] += ci * col[j];
                            }
                        }
                    }
                }
            }
        }
        for (ki, op) in ops.into_iter().enumerate() {
            out[ki].push(op);
        }
    }
    out
}

/// `sum_ij conj(v_i) A_ij v_j` for a Hermitian `A`.
pub(crate) fn quadratic_form(a: &[Complex64], v: &[Complex64]) -> f64 {
    let dim = v.len();
    let mut acc = 0.0;
    for i in 0..dim {
        let row = &a[i * dim..(i + 1) * dim];
        let av: Complex64 = row.iter().zip(v).map(|(x, y)| x * y).sum();
        acc += (v[i].conj() * av).re;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pruning_respects_budget() {
        let masses = vec![0.0, 0.5, 0.0, 0.3, 0.2];
        let plan = plan_two_way(&masses, 0.9, 1e-3);
        assert!(plan.pruned <= 1e-3);
        let full = plan_two_way(&masses, 0.9, 0.0);
        assert_eq!(full.pruned, 0.0);
        assert!(full.keys.len() > plan.keys.len());
        assert!(full.keys.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn pass_operators_at_zero_threshold_cover_unequal_branches() {
        // one reflected photon always leaves one branch at (1,0) or (0,1)
        // and the other empty, so min imbalance is zero: nothing passes
        let ops = branch_pass_operators(3, 0.3, -0.2, &[0]);
        assert!(ops[0][1].iter().all(|z| z.norm() < 1e-15));
        let ops = branch_pass_operators(4, 0.3, 0.9, &[i64::MAX, -1]);
        assert!(ops[0][4].iter().all(|z| z.norm() == 0.0));
        // no filter: the branch map is an isometry
        for r in 0..=4 {
            let dim = r + 1;
            for i in 0..dim {
                for j in 0..dim {
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((ops[1][r][i * dim + j] - Complex64::new(target, 0.0)).norm() < 1e-13);
                }
            }
        }
    }
}
