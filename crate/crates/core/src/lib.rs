//! Link-level Monte-Carlo simulation of uplink soft handover in a LEO constellation.
//!
//! A ground user transmits to two adjacent satellites of one circular orbit.
//! During the pass the lower-elevation satellite relays what it received to the
//! higher-elevation one over the inter-satellite link (ISL), either amplifying
//! the raw observation (AF) or decoding and regenerating it (DF). The
//! destination combines both copies with maximum ratio combining. Block errors
//! are decided with a mutual-information threshold model, and the result is
//! compared against hard handover, where only the higher satellite is used.
//!
//! Module map:
//!
//! * [`orbital`]: pass geometry, elevations, slant ranges, role assignment.
//! * [`channel_g2s`]: two-state Loo land-mobile-satellite channel.
//! * [`channel_isl`]: ISL SNR with Gaussian pointing error.
//! * [`phy`]: modulation, realized mutual information, block error model.
//! * [`relay`]: AF/DF forwarding and MRC at the destination.
//! * [`sim`]: Monte-Carlo engine, BLER curves, misalignment sweeps.
//! * [`cli`]: configuration files and CSV/manifest output.

pub mod channel_g2s;
pub mod channel_isl;
pub mod cli;
pub mod error;
pub mod math;
pub mod orbital;
pub mod phy;
pub mod relay;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Converts a power ratio in dB to linear scale.
#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to dB.
#[inline]
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
