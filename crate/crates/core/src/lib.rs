//! Simulation and verification of two single-qubit teleportation protocols:
//! the standard Bell-measurement scheme and the chained-XOR variant that sends
//! one classical bit instead of two.
//!
//! - [`statevector`]: dense pure-state simulation of small registers.
//! - [`protocol`]: both protocols as two-party state machines with traces.
//! - [`ledger`]: classical bit accounting by purpose.
//! - [`noise`]: Werner-noise channels, recurrence distillation, and what
//!   distillation adds to the classical cost.
//! - [`report`]: the verification, comparison and sweep commands behind the
//!   `teleport-sim` binary.

pub mod bits;
pub mod error;
pub mod ledger;
pub mod noise;
pub mod protocol;
pub mod report;
pub mod rng;
pub mod statevector;

pub use bits::BitString;
pub use error::{Error, Result};
pub use statevector::{fidelity_pure, BranchOutcome, StateVector};
