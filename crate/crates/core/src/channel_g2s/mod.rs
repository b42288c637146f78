//! Ground-to-satellite channel: two-state semi-Markov chain with Loo fading.
//!
//! States G and B alternate with lognormal dwell times. Each occurrence draws
//! its own Loo triple `(M_A, Sigma_A, MP)`; within it the coefficient is a
//! lognormal line-of-sight phasor plus complex Gaussian scatter. The LoS
//! level in dB follows a first-order (Ornstein-Uhlenbeck) low-pass process and
//! the scatter has a Jakes Doppler spectrum.

mod fading;
mod loo;
mod table;
mod trace;

pub use fading::{JakesProcess, ShadowingProcess};
pub use loo::{loo_pdf, rice_pdf};
pub use table::{
    ChannelParamTable, ChannelState, ChannelTableFile, DwellDistribution, DwellUnit, ElevationEntry,
    LooTriple, StateParams, TripleDistribution,
};
pub use trace::{
    generate_trace, initial_state, sample_state_sequence, ChannelGenerator, ChannelTrace, FadingConfig,
    OccurrenceRecord, StateOccurrence,
};
