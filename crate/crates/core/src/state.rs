//! Two-mode polarization states over a truncated photon-number space.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fock::{kernel_transform_sectors, LogWeight, ModeMap, ModePair};

/// Polarization basis labelling the two modes of a [`TwoModeState`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Basis {
    /// `{pi_beta, pi_beta_perp}` with `pi_beta = (pi_H + e^{i beta} pi_V)/sqrt 2`.
    /// `beta = 0` is `{+, -}`, `beta = pi/2` is `{R, L}`.
    Equatorial(f64),
    /// `{H, V}`.
    Linear,
}

impl Basis {
    pub fn angle(self) -> Option<f64> {
        match self {
            Basis::Equatorial(b) => Some(b),
            Basis::Linear => None,
        }
    }
}

/// Sparse amplitude table over `(n_a, n_b)` occupations, stored by total
/// photon number: `sectors[n][n_a]` with `n_b = n - n_a`.
#[derive(Clone, Debug)]
pub struct TwoModeState {
    basis: Basis,
    sectors: Vec<Vec<LogWeight>>,
    trunc_tail: f64,
}

impl TwoModeState {
    pub(crate) fn from_sectors(basis: Basis, sectors: Vec<Vec<LogWeight>>, trunc_tail: f64) -> Self {
        debug_assert!(sectors.iter().enumerate().all(|(n, s)| s.len() == n + 1));
        TwoModeState {
            basis,
            sectors,
            trunc_tail,
        }
    }

    /// Builds a state from explicit amplitudes; later duplicates overwrite earlier ones.
    pub fn from_amplitudes(basis: Basis, amps: impl IntoIterator<Item = (ModePair, Complex64)>) -> Self {
        let mut sectors: Vec<Vec<LogWeight>> = Vec::new();
        for (pair, z) in amps {
            let n = pair.total() as usize;
            while sectors.len() <= n {
                let len = sectors.len() + 1;
                sectors.push(vec![LogWeight::NULL; len]);
            }
            sectors[n][pair.n_a as usize] = LogWeight::from_complex(z);
        }
        if sectors.is_empty() {
            sectors.push(vec![LogWeight::NULL]);
        }
        TwoModeState::from_sectors(basis, sectors, 0.0)
    }

    /// `|n_a, n_b>` in `basis`.
    pub fn fock(basis: Basis, pair: ModePair) -> Self {
        TwoModeState::from_amplitudes(basis, [(pair, Complex64::new(1.0, 0.0))])
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// Probability mass excluded by truncation.
    pub fn trunc_tail(&self) -> f64 {
        self.trunc_tail
    }

    /// Largest total photon number represented.
    pub fn max_total(&self) -> usize {
        self.sectors.len() - 1
    }

    pub fn amplitude(&self, pair: ModePair) -> LogWeight {
        self.sectors
            .get(pair.total() as usize)
            .map(|s| s[pair.n_a as usize])
            .unwrap_or(LogWeight::NULL)
    }

    pub(crate) fn sector(&self, n: usize) -> &[LogWeight] {
        &self.sectors[n]
    }

    pub(crate) fn sector_complex(&self, n: usize) -> Vec<Complex64> {
        self.sectors[n].iter().map(|w| w.to_complex()).collect()
    }

    /// Non-null amplitudes in `(n_a, n_b)` order of increasing total.
    pub fn amplitudes(&self) -> impl Iterator<Item = (ModePair, LogWeight)> + '_ {
        self.sectors.iter().enumerate().flat_map(|(n, sector)| {
            sector.iter().enumerate().filter(|(_, w)| !w.is_null()).map(move |(a, w)| {
                (ModePair::new(a as u32, (n - a) as u32), *w)
            })
        })
    }

    pub fn probabilities(&self) -> BTreeMap<ModePair, f64> {
        self.amplitudes().map(|(p, w)| (p, w.probability())).collect()
    }

    /// Probability of each total photon number.
    pub fn sector_masses(&self) -> Vec<f64> {
        self.sectors
            .iter()
            .map(|s| s.iter().map(|w| w.probability()).sum())
            .collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.sector_masses().iter().sum()
    }

    /// Mean photon numbers `(<n_a>, <n_b>)`.
    pub fn mean_counts(&self) -> (f64, f64) {
        self.amplitudes().fold((0.0, 0.0), |(a, b), (p, w)| {
            let prob = w.probability();
            (a + p.n_a as f64 * prob, b + p.n_b as f64 * prob)
        })
    }

    /// Drops every sector above `max_total`, adding the dropped mass to the tail.
    pub fn truncated(&self, max_total: usize) -> TwoModeState {
        if max_total >= self.max_total() {
            return self.clone();
        }
        let dropped: f64 = self.sector_masses()[max_total + 1..].iter().sum();
        TwoModeState::from_sectors(
            self.basis,
            self.sectors[..=max_total].to_vec(),
            self.trunc_tail + dropped,
        )
    }

    /// The same state re-expressed in the equatorial basis `beta`.
    pub fn expressed_in(&self, beta: f64) -> TwoModeState {
        let map = match self.basis {
            Basis::Equatorial(b0) if b0 == beta => return self.clone(),
            Basis::Equatorial(b0) => ModeMap::change_of_basis(b0, beta),
            Basis::Linear => ModeMap::linear_to_equatorial(beta),
        };
        self.transformed(&map, Basis::Equatorial(beta))
    }

    /// Applies a two-mode linear map and relabels the result with `basis`.
    pub fn transformed(&self, map: &ModeMap, basis: Basis) -> TwoModeState {
        let complex: Vec<Vec<Complex64>> = (0..self.sectors.len()).map(|n| self.sector_complex(n)).collect();
        let out = kernel_transform_sectors(map, &complex);
        let sectors = out
            .into_iter()
            .map(|v| v.into_iter().map(LogWeight::from_complex).collect())
            .collect();
        TwoModeState::from_sectors(basis, sectors, self.trunc_tail)
    }

    /// Scales all amplitudes so the represented mass is one.
    pub fn normalized(&self) -> Result<TwoModeState> {
        let norm = self.norm_sqr();
        if norm <= 0.0 {
            return domain("cannot normalize a zero state");
        }
        let shift = -0.5 * norm.ln();
        let sectors = self
            .sectors
            .iter()
            .map(|s| s.iter().map(|w| w.scale_log(shift)).collect())
            .collect();
        Ok(TwoModeState::from_sectors(self.basis, sectors, 0.0))
    }
}
