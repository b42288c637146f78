//! Monte-Carlo engine: pass simulation, BLER estimation and sweeps.

mod budget;
mod curve;
mod engine;
mod experiment;

pub use budget::LinkBudget;
pub use curve::{BlerCurve, BlerPoint, CurveMeta};
pub use engine::{BlockDraws, BlockSignals, PassSimulator, Scenario, Variant};
pub use experiment::{
    count_errors, estimate_bler, estimate_curves, find_thresholds, misalignment_threshold_sweep, run_experiment, with_threads,
    ExperimentPlan, IslBand, SweepResult, SweepSpec, Threshold, ThresholdCurve,
};
