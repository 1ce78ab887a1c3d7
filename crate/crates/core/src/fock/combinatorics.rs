//! Log-domain factorials and binomials.
//!
//! Small arguments come from exact integer factorials; larger ones from the
//! Stirling series, which is accurate to a few ulps from n = 21 upward.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{domain, Result};

const TABLE_LEN: usize = 4096;

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| (0..TABLE_LEN as u64).map(ln_factorial_uncached).collect())
}

fn ln_factorial_uncached(n: u64) -> f64 {
    if n <= 20 {
        let exact: u64 = (1..=n).product();
        return (exact as f64).ln();
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // 1/(12n) - 1/(360n^3) + 1/(1260n^5) - 1/(1680n^7) + 1/(1188n^9)
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    x * x.ln() - x + 0.5 * (2.0 * PI * x).ln() + series
}

/// `ln(n!)`.
pub fn ln_factorial(n: u64) -> f64 {
    match table().get(n as usize) {
        Some(&v) => v,
        None => ln_factorial_uncached(n),
    }
}

/// `ln C(n, k)`; errors when `k > n`.
pub fn log_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return domain(format!("log_binomial: k = {k} exceeds n = {n}"));
    }
    Ok(ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k))
}

/// `n * ln(x)` with the convention `0 * ln(0) = 0`.
pub(crate) fn pow_log(x: f64, n: f64) -> f64 {
    if n == 0.0 {
        0.0
    } else {
        n * x.ln()
    }
}

/// Binomial probability `C(n, k) p^k (1-p)^(n-k)`; zero when `k > n`.
pub fn binomial_pmf(n: u64, k: u64, p: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    let log = ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
        + pow_log(p, k as f64)
        + pow_log(1.0 - p, (n - k) as f64);
    log.exp()
}

/// Multinomial probability of `counts` with cell probabilities `probs`.
pub fn multinomial_pmf(counts: &[u64], probs: &[f64]) -> f64 {
    debug_assert_eq!(counts.len(), probs.len());
    let n: u64 = counts.iter().sum();
    let mut log = ln_factorial(n);
    for (&c, &p) in counts.iter().zip(probs) {
        log += pow_log(p, c as f64) - ln_factorial(c);
    }
    log.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal(n_max: usize) -> Vec<Vec<u128>> {
        let mut rows: Vec<Vec<u128>> = vec![vec![1]];
        for n in 1..=n_max {
            let prev = &rows[n - 1];
            let mut row = vec![1u128; n + 1];
            for k in 1..n {
                row[k] = prev[k - 1] + prev[k];
            }
            rows.push(row);
        }
        rows
    }

    #[test]
    fn small_values() {
        assert_eq!(log_binomial(0, 0).unwrap(), 0.0);
        assert!((log_binomial(4, 2).unwrap() - 6f64.ln()).abs() < 1e-15);
        assert!(log_binomial(3, 4).is_err());
    }

    #[test]
    fn matches_exact_integers_up_to_sixty() {
        let rows = pascal(60);
        for (n, row) in rows.iter().enumerate() {
            for (k, &exact) in row.iter().enumerate() {
                let approx = log_binomial(n as u64, k as u64).unwrap().exp();
                let rel = (approx - exact as f64).abs() / exact as f64;
                assert!(rel < 1e-12, "C({n},{k}): rel err {rel:e}");
            }
        }
        // C(60,30) explicitly
        let exact = rows[60][30] as f64;
        assert_eq!(rows[60][30], 118_264_581_564_861_424);
        assert!((log_binomial(60, 30).unwrap().exp() / exact - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stirling_branch_is_continuous_with_the_table() {
        // ln(n!) - ln((n-1)!) = ln(n) across the exact/Stirling boundary and beyond the table
        for n in [21u64, 22, 100, 4095, 4096, 4097, 1_000_000] {
            let diff = ln_factorial_uncached(n) - ln_factorial_uncached(n - 1);
            assert!((diff - (n as f64).ln()).abs() < 1e-9 * (n as f64).ln().max(1.0), "n = {n}");
        }
    }

    #[test]
    fn pmfs_normalize() {
        let total: f64 = (0..=40).map(|k| binomial_pmf(40, k, 0.1)).sum();
        assert!((total - 1.0).abs() < 1e-13);
        assert_eq!(binomial_pmf(5, 0, 0.0), 1.0);
        assert_eq!(binomial_pmf(5, 1, 0.0), 0.0);
        let mut m = 0.0;
        for a in 0..=6u64 {
            for b in 0..=(6 - a) {
                m += multinomial_pmf(&[a, b, 6 - a - b], &[0.9, 0.05, 0.05]);
            }
        }
        assert!((m - 1.0).abs() < 1e-13);
    }
}
