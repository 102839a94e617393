//! Simulation library for a two-level trapped ion coupled to a single
//! quantized cavity mode on the carrier resonance, in the Lamb-Dicke regime.
//!
//! The lossless dynamics produces entangled superpositions of motional
//! coherent states (cat states) that a measurement of the ionic internal
//! level disentangles. With a leaky cavity monitored by a perfect detector,
//! the no-detection evolution is the closed-form non-Hermitian flow of
//! [`conditional`], and the detection of one photon collapses the motion
//! onto a pure state whose phonon statistics [`stats`] quantifies.
//!
//! Conventions used throughout:
//!
//! * ħ = 1 and time is measured in units of 1/g (the ion-field coupling
//!   sets the clock), so all rates are dimensionless: `Gamma = kappa / g`,
//!   `tau = g t`.
//! * The cavity is truncated to {0, 1} photons. Starting from
//!   |alpha>_v |0>_c |e> the excitation-conserving carrier interaction can
//!   only populate |m,0,e> and |m,1,g>, and the jump operator only removes
//!   photons, so the truncation is exact rather than an approximation.
//! * Basis ordering is m-major, then photon number, then internal level
//!   (g = 0, e = 1); see [`hilbert::CompositeState`].
//!
//! Every closed-form result can be cross-checked against the independent
//! fixed-step RK4 integrator in [`oracle`], and the analytic detection
//! probability against the Monte Carlo engine in [`trajectories`].

pub mod carrier;
pub mod cli;
pub mod conditional;
mod error;
pub mod hilbert;
pub mod lamb_dicke;
mod numerics;
pub mod oracle;
pub mod stats;
pub mod trajectories;

pub use error::{Error, Result};

/// Library version string stamped into output-file headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
