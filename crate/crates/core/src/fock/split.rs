use super::combinatorics::{log_binomial, pow_log};
use super::LogWeight;
use crate::error::{domain, Result};

/// One term of a single-mode beam-splitter expansion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitTerm {
    pub transmitted: u32,
    pub reflected: u32,
    pub amplitude: LogWeight,
}

pub(crate) fn check_transmittivity(tau: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&tau) || tau.is_nan() {
        return domain(format!("transmittivity {tau} outside [0, 1]"));
    }
    Ok(())
}

/// Splits `n` photons of one mode on a beam splitter with creation-operator
/// map `b -> sqrt(tau) c + i sqrt(1 - tau) d` (c transmitted, d reflected).
///
/// Returns the `n + 1` terms ordered by transmitted count.
pub fn split_single_mode(n: u32, tau: f64) -> Result<Vec<SplitTerm>> {
    check_transmittivity(tau)?;
    let mut terms = Vec::with_capacity(n as usize + 1);
    for transmitted in 0..=n {
        let reflected = n - transmitted;
        let log = 0.5 * log_binomial(n as u64, transmitted as u64)?
            + pow_log(tau, transmitted as f64 / 2.0)
            + pow_log(1.0 - tau, reflected as f64 / 2.0);
        let amplitude = LogWeight::new(log, 0.0) * LogWeight::i_power(reflected as i64);
        terms.push(SplitTerm {
            transmitted,
            reflected,
            amplitude,
        });
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    #[test]
    fn single_photon() {
        let terms = split_single_mode(1, 0.9).unwrap();
        let r = terms.iter().find(|t| t.transmitted == 0).unwrap();
        let t = terms.iter().find(|t| t.transmitted == 1).unwrap();
        assert!((t.amplitude.to_complex() - Complex64::new(0.9f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!((r.amplitude.to_complex() - Complex64::new(0.0, 0.1f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn vacuum_and_balanced_pair() {
        let v = split_single_mode(0, 0.37).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].amplitude, LogWeight::ONE);

        let two = split_single_mode(2, 0.5).unwrap();
        let probs: Vec<f64> = two.iter().map(|t| t.amplitude.probability()).collect();
        // ordered by transmitted count 0, 1, 2
        assert!((probs[0] - 0.25).abs() < 1e-15);
        assert!((probs[1] - 0.5).abs() < 1e-15);
        assert!((probs[2] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn degenerate_transmittivities() {
        let all = split_single_mode(3, 1.0).unwrap();
        assert_eq!(all[3].amplitude.probability(), 1.0);
        assert!(all[..3].iter().all(|t| t.amplitude.is_null()));
        let none = split_single_mode(3, 0.0).unwrap();
        assert!((none[0].amplitude.probability() - 1.0).abs() < 1e-15);
        assert!(split_single_mode(1, 1.2).is_err());
        assert!(split_single_mode(1, -0.1).is_err());
    }

    proptest! {
        #[test]
        fn probabilities_sum_to_one(n in 0u32..300, tau in 0.0f64..=1.0) {
            let total: f64 = split_single_mode(n, tau).unwrap().iter().map(|t| t.amplitude.probability()).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
