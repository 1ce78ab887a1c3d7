//! Two-mode linear transforms over fixed total photon number.
//!
//! A [`ModeMap`] says how each input creation operator expands in the output
//! modes. The induced Fock-space matrix for `N` photons is built from the
//! `N - 1` block by adding one photon to either input mode and averaging the
//! two routes with weights `sqrt(n_a)`, `sqrt(n_b)`. Every step is a
//! norm-non-increasing combination of columns, so the recursion stays accurate
//! for hundreds of photons, where the closed binomial double sum loses all
//! digits to cancellation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use super::combinatorics::{ln_factorial, log_binomial};
use super::LogWeight;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Single-photon map: input mode `j` creation operator equals
/// `rows[j][0] * out_a^dag + rows[j][1] * out_b^dag`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeMap {
    rows: [[Complex64; 2]; 2],
}

impl ModeMap {
    pub fn new(rows: [[Complex64; 2]; 2]) -> Self {
        ModeMap { rows }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        ModeMap::new([[one, ZERO], [ZERO, one]])
    }

    /// Active equatorial rotation taking `pi_beta` to `pi_(beta + phi)`:
    /// `pi_beta' = e^{i phi/2} [cos(phi/2) pi_beta - i sin(phi/2) pi_beta_perp]`,
    /// written in the fixed basis `beta`.
    pub fn rotation(phi: f64) -> Self {
        let global = Complex64::from_polar(1.0, phi / 2.0);
        let c = Complex64::new((phi / 2.0).cos(), 0.0) * global;
        let s = Complex64::new(0.0, -(phi / 2.0).sin()) * global;
        ModeMap::new([[c, s], [s, c]])
    }

    /// Re-expresses modes of the equatorial basis `from` in the basis `to`.
    pub fn change_of_basis(from: f64, to: f64) -> Self {
        ModeMap::rotation(-(to - from))
    }

    /// Expresses the H/V modes in the equatorial basis `beta`, where
    /// `pi_beta = (pi_H + e^{i beta} pi_V)/sqrt 2` and
    /// `pi_beta_perp = (pi_H - e^{i beta} pi_V)/sqrt 2`.
    pub fn linear_to_equatorial(beta: f64) -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let v = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, -beta);
        ModeMap::new([[h, h], [v, -v]])
    }

    pub fn rows(&self) -> [[Complex64; 2]; 2] {
        self.rows
    }

    /// `self` followed by `then`.
    pub fn then(&self, then: &ModeMap) -> ModeMap {
        let mut rows = [[ZERO; 2]; 2];
        for (j, row) in rows.iter_mut().enumerate() {
            for (l, cell) in row.iter_mut().enumerate() {
                *cell = self.rows[j][0] * then.rows[0][l] + self.rows[j][1] * then.rows[1][l];
            }
        }
        ModeMap::new(rows)
    }
}

/// One recursion step: block for `n + 1` photons from the block for `n`.
/// Blocks are row-major `[out_a * (n + 1) + in_a]`.
///
/// Uses `N |in_a, in_b> = sqrt(in_a) a^dag |in_a - 1, in_b> + sqrt(in_b) b^dag |in_a, in_b - 1>`,
/// so each new column is a convex-weighted combination and errors never grow.
fn next_block(map: &ModeMap, n: usize, prev: &[Complex64]) -> Vec<Complex64> {
    let m = n + 1;
    let dim = m + 1;
    let [[u00, u01], [u10, u11]] = map.rows;
    let mut block = vec![ZERO; dim * dim];
    let sqrt: Vec<f64> = (0..=m).map(|k| (k as f64).sqrt()).collect();
    let inv = 1.0 / m as f64;
    let prev_at = |out: usize, inp: usize| prev[out * (n + 1) + inp];
    for out_a in 0..=m {
        let out_b = m - out_a;
        for in_a in 0..=m {
            let in_b = m - in_a;
            let mut acc = ZERO;
            if in_a > 0 {
                let mut t = ZERO;
                if out_a > 0 {
                    t += u00 * sqrt[out_a] * prev_at(out_a - 1, in_a - 1);
                }
                if out_b > 0 {
                    t += u01 * sqrt[out_b] * prev_at(out_a, in_a - 1);
                }
                acc += t * sqrt[in_a];
            }
            if in_b > 0 {
                let mut t = ZERO;
                if out_a > 0 {
                    t += u10 * sqrt[out_a] * prev_at(out_a - 1, in_a);
                }
                if out_b > 0 {
                    t += u11 * sqrt[out_b] * prev_at(out_a, in_a);
                }
                acc += t * sqrt[in_b];
            }
            block[out_a * dim + in_a] = acc * inv;
        }
    }
    block
}

/// Memoizable Fock-space matrices of a [`ModeMap`] for `0..=n_max` photons.
#[derive(Clone, Debug)]
pub struct TransformTable {
    map: ModeMap,
    blocks: Vec<Vec<Complex64>>,
}

impl TransformTable {
    pub fn new(map: ModeMap, n_max: usize) -> Self {
        let mut table = TransformTable {
            map,
            blocks: vec![vec![Complex64::new(1.0, 0.0)]],
        };
        table.extend_to(n_max);
        table
    }

    pub fn extend_to(&mut self, n_max: usize) {
        while self.blocks.len() <= n_max {
            let n = self.blocks.len() - 1;
            let next = next_block(&self.map, n, &self.blocks[n]);
            self.blocks.push(next);
        }
    }

    pub fn map(&self) -> &ModeMap {
        &self.map
    }

    pub fn n_max(&self) -> usize {
        self.blocks.len() - 1
    }

    /// Row-major `(n + 1) x (n + 1)` matrix `[out_a][in_a]` for `n` photons.
    pub fn block(&self, n: usize) -> &[Complex64] {
        &self.blocks[n]
    }

    /// `<out_a, out_b| U |in_a, in_b>`; zero unless photon number matches.
    pub fn element(&self, in_a: usize, in_b: usize, out_a: usize, out_b: usize) -> Complex64 {
        let n = in_a + in_b;
        if out_a + out_b != n || n > self.n_max() {
            return ZERO;
        }
        self.blocks[n][out_a * (n + 1) + in_a]
    }

    /// `out = U_n * input` for one photon-number sector.
    pub fn apply(&self, n: usize, input: &[Complex64], out: &mut [Complex64]) {
        let dim = n + 1;
        let block = &self.blocks[n];
        for (row, o) in block.chunks_exact(dim).zip(out.iter_mut()) {
            *o = row.iter().zip(input).map(|(u, x)| u * x).sum();
        }
    }
}

/// Applies `map` to a state given as per-sector amplitude vectors
/// (`sectors[n][n_a]`), building each block once and discarding it.
pub(crate) fn transform_sectors(map: &ModeMap, sectors: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(sectors.len());
    let mut block = vec![Complex64::new(1.0, 0.0)];
    for (n, sector) in sectors.iter().enumerate() {
        if n > 0 {
            block = next_block(map, n - 1, &block);
        }
        let dim = n + 1;
        let mut v = vec![ZERO; dim];
        if sector.iter().any(|z| z.re != 0.0 || z.im != 0.0) {
            for (row, o) in block.chunks_exact(dim).zip(v.iter_mut()) {
                *o = row.iter().zip(sector).map(|(u, x)| u * x).sum();
            }
        }
        out.push(v);
    }
    out
}

type RotationCache = Mutex<HashMap<u64, Arc<TransformTable>>>;

fn cache() -> &'static RotationCache {
    static CACHE: OnceLock<RotationCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

const CACHE_CAPACITY: usize = 512;

/// Shared, read-only rotation table for angle `phi` covering at least `n_max` photons.
pub fn rotation_table(phi: f64, n_max: usize) -> Arc<TransformTable> {
    let key = (phi + 0.0).to_bits();
    let mut guard = cache().lock().expect("rotation cache poisoned");
    if let Some(t) = guard.get(&key) {
        if t.n_max() >= n_max {
            return Arc::clone(t);
        }
    }
    let table = match guard.get(&key) {
        Some(t) => {
            let mut grown = (**t).clone();
            grown.extend_to(n_max);
            grown
        }
        None => TransformTable::new(ModeMap::rotation(phi), n_max),
    };
    if guard.len() >= CACHE_CAPACITY {
        guard.clear();
    }
    let table = Arc::new(table);
    guard.insert(key, Arc::clone(&table));
    table
}

/// `<r, s| R(phi) |n, m>` for the active equatorial rotation; null when
/// `r + s != n + m`.
pub fn rotation_kernel(n: u32, m: u32, phi: f64, r: u32, s: u32) -> LogWeight {
    if r + s != n + m {
        return LogWeight::NULL;
    }
    let total = (n + m) as usize;
    let table = rotation_table(phi, total);
    LogWeight::from_complex(table.element(n as usize, m as usize, r as usize, s as usize))
}

/// The same matrix element from the closed double sum over binomial
/// expansions of both transformed creation operators. Well conditioned only
/// for small photon numbers (roughly `n + m < 30`).
pub fn expand_by_binomial_sum(map: &ModeMap, n: u32, m: u32, r: u32, s: u32) -> Complex64 {
    if r + s != n + m {
        return ZERO;
    }
    let [[u00, u01], [u10, u11]] = map.rows;
    let norm = 0.5
        * (ln_factorial(r as u64) + ln_factorial(s as u64)
            - ln_factorial(n as u64)
            - ln_factorial(m as u64));
    let mut acc = ZERO;
    for k in 0..=n.min(r) {
        let l = r - k;
        if l > m {
            continue;
        }
        let coeff = (log_binomial(n as u64, k as u64).unwrap()
            + log_binomial(m as u64, l as u64).unwrap()
            + norm)
            .exp();
        acc += coeff
            * u00.powu(k)
            * u01.powu(n - k)
            * u10.powu(l)
            * u11.powu(m - l);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn max_unitarity_defect(table: &TransformTable, n: usize) -> f64 {
        let dim = n + 1;
        let b = table.block(n);
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = ZERO;
                for k in 0..dim {
                    acc += b[k * dim + i].conj() * b[k * dim + j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    #[test]
    fn zero_angle_is_identity() {
        for (n, m) in [(0, 0), (3, 1), (2, 5)] {
            for r in 0..=(n + m) {
                let s = n + m - r;
                let w = rotation_kernel(n, m, 0.0, r, s);
                let expected = if r == n { 1.0 } else { 0.0 };
                assert!((w.to_complex() - Complex64::new(expected, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn single_photon_rotation() {
        for phi in [0.3, 1.1, -2.0, PI] {
            let g = Complex64::from_polar(1.0, phi / 2.0);
            let a = rotation_kernel(1, 0, phi, 1, 0).to_complex();
            let b = rotation_kernel(1, 0, phi, 0, 1).to_complex();
            assert!((a - g * (phi / 2.0).cos()).norm() < 1e-14);
            assert!((b - g * Complex64::new(0.0, -(phi / 2.0).sin())).norm() < 1e-14);
        }
    }

    #[test]
    fn mismatched_photon_number_is_null() {
        assert!(rotation_kernel(2, 1, 0.4, 2, 2).is_null());
    }

    #[test]
    fn unitary_on_angle_grid_up_to_twelve_photons() {
        for step in 0..8 {
            let phi = step as f64 * PI / 4.0 - 0.37;
            let table = TransformTable::new(ModeMap::rotation(phi), 12);
            for n in 0..=12 {
                assert!(max_unitarity_defect(&table, n) < 1e-10, "phi {phi}, n {n}");
            }
        }
    }

    #[test]
    fn unitary_at_hundreds_of_photons() {
        let table = TransformTable::new(ModeMap::rotation(FRAC_PI_2), 240);
        assert!(max_unitarity_defect(&table, 240) < 1e-10);
        let lin = TransformTable::new(ModeMap::linear_to_equatorial(0.7), 200);
        assert!(max_unitarity_defect(&lin, 200) < 1e-10);
    }

    #[test]
    fn inverse_rotation_composes_to_identity() {
        let fwd = TransformTable::new(ModeMap::rotation(0.9), 12);
        let back = TransformTable::new(ModeMap::rotation(-0.9), 12);
        for n in 0..=12 {
            let dim = n + 1;
            for i in 0..dim {
                let col: Vec<Complex64> = (0..dim).map(|k| fwd.block(n)[k * dim + i]).collect();
                let mut out = vec![ZERO; dim];
                back.apply(n, &col, &mut out);
                for (k, z) in out.iter().enumerate() {
                    let target = if k == i { 1.0 } else { 0.0 };
                    assert!((z - Complex64::new(target, 0.0)).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn recursion_matches_binomial_double_sum_for_small_n() {
        for map in [
            ModeMap::rotation(FRAC_PI_2),
            ModeMap::rotation(-1.3),
            ModeMap::linear_to_equatorial(0.4),
        ] {
            let table = TransformTable::new(map, 10);
            for n in 0..=6u32 {
                for m in 0..=(10 - n).min(4) {
                    for r in 0..=(n + m) {
                        let s = n + m - r;
                        let a = table.element(n as usize, m as usize, r as usize, s as usize);
                        let b = expand_by_binomial_sum(&map, n, m, r, s);
                        assert!((a - b).norm() < 1e-12, "{n},{m}->{r},{s}");
                    }
                }
            }
        }
    }

    #[test]
    fn streaming_transform_equals_table_apply() {
        let map = ModeMap::rotation(0.6);
        let table = TransformTable::new(map, 9);
        let sectors: Vec<Vec<Complex64>> = (0..=9)
            .map(|n| (0..=n).map(|k| Complex64::new(k as f64 * 0.1, 0.05 * n as f64)).collect())
            .collect();
        let streamed = transform_sectors(&map, &sectors);
        for n in 0..=9 {
            let mut out = vec![ZERO; n + 1];
            table.apply(n, &sectors[n], &mut out);
            for (a, b) in out.iter().zip(&streamed[n]) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    proptest! {
        #[test]
        fn rotation_composition_adds_angles(a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let composed = ModeMap::rotation(a).then(&ModeMap::rotation(b));
            let direct = ModeMap::rotation(a + b);
            for j in 0..2 {
                for k in 0..2 {
                    prop_assert!((composed.rows()[j][k] - direct.rows()[j][k]).norm() < 1e-12);
                }
            }
        }
    }
}
