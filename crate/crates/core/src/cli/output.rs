use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{LoadedConfig, RunConfig};
use crate::error::{Error, Result};
use crate::sim::{BlerCurve, BlerPoint, Threshold, ThresholdCurve};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const BLER_HEADER: &str = "ref_snr_db,bler,blocks,stderr";
pub const THRESHOLD_HEADER: &str = "misalignment_variance_rad2,required_ref_snr_db,status";

/// CSV text of a curve. Floats use the shortest representation that parses
/// back to the same value.
pub fn curve_csv(curve: &BlerCurve) -> Result<String> {
    if curve.points.is_empty() {
        return Err(Error::EmptyCurve);
    }
    let mut s = String::from(BLER_HEADER);
    s.push('\n');
    for p in &curve.points {
        writeln!(s, "{},{},{},{}", p.ref_snr_db, p.bler, p.blocks, p.stderr).expect("write to string");
    }
    Ok(s)
}

pub fn emit_csv(curve: &BlerCurve, path: &Path) -> Result<()> {
    let text = curve_csv(curve)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Parses a BLER CSV back into points.
pub fn parse_csv(text: &str) -> Result<Vec<BlerPoint>> {
    let bad = |line: usize, m: String| Error::Parse {
        path: "<csv>".into(),
        message: format!("line {line}: {m}"),
    };
    let mut lines = text.lines();
    if lines.next() != Some(BLER_HEADER) {
        return Err(bad(1, format!("expected header `{BLER_HEADER}`")));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(bad(i + 2, "expected 4 fields".into()));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| bad(i + 2, e.to_string()));
            Ok(BlerPoint {
                ref_snr_db: num(f[0])?,
                bler: num(f[1])?,
                blocks: f[2].parse().map_err(|e: std::num::ParseIntError| bad(i + 2, e.to_string()))?,
                stderr: num(f[3])?,
            })
        })
        .collect()
}

pub fn threshold_csv(curve: &ThresholdCurve) -> String {
    let mut s = String::from(THRESHOLD_HEADER);
    s.push('\n');
    for (var, th) in &curve.points {
        match th {
            Threshold::Achieved(db) => writeln!(s, "{var},{db},ok"),
            Threshold::Unachievable => writeln!(s, "{var},NaN,unachievable"),
        }
        .expect("write to string");
    }
    s
}

/// Reproduction record written next to the CSVs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub artifact_version: String,
    pub master_seed: u64,
    pub config_sha256: String,
    pub channel_table_sha256: String,
    pub config: RunConfig,
    pub channel_table: String,
    pub outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the resolved configuration (thread count excluded, since it
/// does not affect results).
pub fn config_hash(config: &RunConfig) -> String {
    let mut c = config.clone();
    c.threads = None;
    sha256_hex(serde_json::to_string(&c).expect("serializable config").as_bytes())
}

impl Manifest {
    pub fn new(loaded: &LoadedConfig, outputs: Vec<String>, notes: Vec<String>) -> Self {
        let mut config = loaded.config.clone();
        config.threads = None;
        Self {
            artifact_version: ARTIFACT_VERSION.to_string(),
            master_seed: config.seed,
            config_sha256: config_hash(&config),
            channel_table_sha256: sha256_hex(loaded.table_text.as_bytes()),
            config,
            channel_table: loaded.table_text.clone(),
            outputs,
            notes,
        }
    }
}

pub(crate) fn config_from_manifest(text: &str, path: &Path) -> Result<LoadedConfig> {
    let m: Manifest = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut config = m.config;
    config.g2s.channel_table = None;
    config.validate()?;
    LoadedConfig::new(config, m.channel_table, path)
}
