//! Configuration files, experiment invocation and result files.

mod config;
mod output;
mod run;

pub use config::{
    load_config, ExperimentSection, G2sSection, GeometrySection, GroundUserSection, IslSection, LoadedConfig, Mode, OneOrMany, RunConfig,
    SweepSection, SAMPLE_TABLE,
};
pub use output::{
    config_hash, curve_csv, emit_csv, parse_csv, sha256_hex, threshold_csv, Manifest, ARTIFACT_VERSION, BLER_HEADER, THRESHOLD_HEADER,
};
pub use run::{apply_overrides, run, Overrides};

/// Process exit status for configuration problems.
pub const EXIT_CONFIG: i32 = 1;
/// Process exit status for failures while running.
pub const EXIT_RUNTIME: i32 = 2;
