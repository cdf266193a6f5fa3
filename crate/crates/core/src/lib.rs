//! Cellular-automaton model of a closed telephone subscriber network.
//!
//! Every cell of a toroidal grid is a subscriber that alternates between a
//! free (standby) state and a busy (in conversation) state. Standby and
//! holding times are exponentially distributed, calls go to a random Moore
//! neighbour, and a call to a busy line is denied and retried next cycle.
//! The observable is the busy-cell count per cycle; the `analysis` module
//! estimates its Hurst exponent via rescaled-range analysis and the
//! `experiments` module sweeps (lambda, mu) over many seeded realizations.

pub mod analysis;
pub mod automaton;
pub mod cli;
pub mod error;
pub mod experiments;

pub use error::{Error, Result};

/// Concrete scalar used by the simulator and the CLI.
pub type Real = f64;

/// R/S curve over `Real` samples.
pub type RsCurve = analysis::RsCurve<Real>;
/// Hurst regression result over `Real` samples.
pub type HurstEstimate = analysis::HurstEstimate<Real>;
