//! Numeric foundations shared by every other module: log-domain weights,
//! factorial combinatorics, single-mode beam-splitter amplitudes and the
//! two-mode polarization transforms over fixed total photon number.

mod combinatorics;
mod kernel;
mod logweight;
mod split;

pub use combinatorics::{binomial_pmf, ln_factorial, log_binomial, multinomial_pmf};
pub(crate) use combinatorics::pow_log;
pub(crate) use split::check_transmittivity;
pub(crate) use kernel::transform_sectors as kernel_transform_sectors;
pub use kernel::{
    expand_by_binomial_sum, rotation_kernel, rotation_table, ModeMap, TransformTable,
};
pub use logweight::LogWeight;
pub use split::{split_single_mode, SplitTerm};

use serde::{Deserialize, Serialize};

/// Photon counts in the two orthogonal polarization modes of one spatial mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModePair {
    pub n_a: u32,
    pub n_b: u32,
}

impl ModePair {
    pub const VACUUM: ModePair = ModePair { n_a: 0, n_b: 0 };

    pub const fn new(n_a: u32, n_b: u32) -> Self {
        ModePair { n_a, n_b }
    }

    pub fn total(self) -> u32 {
        self.n_a + self.n_b
    }

    /// Signed count imbalance `n_a - n_b`.
    pub fn imbalance(self) -> i64 {
        self.n_a as i64 - self.n_b as i64
    }
}

impl std::fmt::Display for ModePair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.n_a, self.n_b)
    }
}
