//! Shutter-activation predicates on measured photon counts.
//!
//! Thresholds are strict throughout: an OF with threshold `k` accepts
//! `|n_a - n_b| > k`. A non-strict `>= k` reading is the same filter at `k - 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::ModePair;
use crate::splitter::ThreeWaySplitOutcome;

/// The event that opens the shutter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FilterSpec {
    /// Intensity threshold on the total count, `n_a + n_b > h`. `h = -1`
    /// accepts everything.
    Id { h: i64 },
    /// Orthogonality filter in one equatorial basis.
    Of { k: u32, basis: f64 },
    /// Orthogonality filters on two halves of the probe, both required.
    DoubleOf { k: u32, basis1: f64, basis2: f64 },
}

impl FilterSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FilterSpec::Id { h } if h < -1 => Err(Error::Domain(format!("intensity threshold {h} below -1"))),
            FilterSpec::Of { basis, .. } if !basis.is_finite() => Err(Error::Domain("non-finite basis angle".into())),
            FilterSpec::DoubleOf { basis1, basis2, .. } if !(basis1.is_finite() && basis2.is_finite()) => {
                Err(Error::Domain("non-finite basis angle".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Result of a dichotomic read-out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DichotomicOutcome {
    Plus,
    Minus,
    Inconclusive,
    /// Balanced counts at zero threshold: assigned to either sign with equal
    /// weight.
    Coin,
}

impl DichotomicOutcome {
    /// Weights `(plus, minus)` this outcome contributes to probability sums.
    pub fn weights(self) -> (f64, f64) {
        match self {
            DichotomicOutcome::Plus => (1.0, 0.0),
            DichotomicOutcome::Minus => (0.0, 1.0),
            DichotomicOutcome::Coin => (0.5, 0.5),
            DichotomicOutcome::Inconclusive => (0.0, 0.0),
        }
    }

    pub fn is_conclusive(self) -> bool {
        self != DichotomicOutcome::Inconclusive
    }
}

pub fn id_predicate(counts: ModePair, h: i64) -> bool {
    counts.total() as i64 > h
}

pub fn of_predicate(counts: ModePair, k: u32) -> bool {
    counts.imbalance().unsigned_abs() > k as u64
}

/// Imbalance-threshold read-out on an already filtered beam.
pub fn of_dichotomic(counts: ModePair, k: u32) -> DichotomicOutcome {
    dichotomic_from_imbalance(counts.imbalance(), k)
}

pub(crate) fn dichotomic_from_imbalance(d: i64, k: u32) -> DichotomicOutcome {
    if d > k as i64 {
        DichotomicOutcome::Plus
    } else if d < -(k as i64) {
        DichotomicOutcome::Minus
    } else if k == 0 {
        DichotomicOutcome::Coin
    } else {
        DichotomicOutcome::Inconclusive
    }
}

/// Shutter trigger of the two-branch pre-selection. `k = 0` leaves the
/// shutter permanently open; otherwise both branches must exceed `k`.
pub fn double_of_pass(outcome: &ThreeWaySplitOutcome, k: u32) -> bool {
    k == 0 || (of_predicate(outcome.branch1, k) && of_predicate(outcome.branch2, k))
}

/// Strict branch threshold implementing [`double_of_pass`]; `-1` accepts all.
pub(crate) fn preselect_level(k: u32) -> i64 {
    if k == 0 {
        -1
    } else {
        k as i64
    }
}
