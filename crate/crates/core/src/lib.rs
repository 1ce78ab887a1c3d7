//! Simulation of measurement-induced operations on amplified multiphoton
//! polarization states.
//!
//! A single equatorial photon seeds a phase-covariant optical parametric
//! amplifier; the output macro-qubit is split on an unbalanced beam splitter
//! and the small reflected portion is measured to gate the transmitted one.
//! Everything is computed as exact sums over the truncated photon-number
//! outcome space, and every closed-form path is checked against dense
//! state-vector evolution in [`oracle`].

pub mod error;
pub mod fock;

pub use error::{Error, Result};
pub mod amplifier;
pub mod analysis;
pub mod cli;
pub mod crosscheck;
pub mod filters;
pub mod oracle;
pub mod splitter;
pub mod state;

pub use state::{Basis, TwoModeState};
