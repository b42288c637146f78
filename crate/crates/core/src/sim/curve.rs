use serde::{Deserialize, Serialize};

use crate::relay::RelayStrategy;

/// One BLER estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlerPoint {
    pub ref_snr_db: f64,
    pub bler: f64,
    pub blocks: u64,
    /// Binomial standard error `sqrt(p (1 - p) / n)`.
    pub stderr: f64,
}

impl BlerPoint {
    pub fn from_counts(ref_snr_db: f64, errors: u64, blocks: u64) -> Self {
        let p = if blocks == 0 { 0.0 } else { errors as f64 / blocks as f64 };
        Self {
            ref_snr_db,
            bler: p,
            blocks,
            stderr: if blocks == 0 { 0.0 } else { (p * (1.0 - p) / blocks as f64).sqrt() },
        }
    }

    pub fn errors(&self) -> u64 {
        (self.bler * self.blocks as f64).round() as u64
    }

    /// One-sided 95 % upper bound; the rule of three when no error was seen.
    pub fn upper_bound_95(&self) -> f64 {
        if self.errors() == 0 {
            (3.0 / self.blocks as f64).min(1.0)
        } else {
            (self.bler + 1.645 * self.stderr).min(1.0)
        }
    }
}

/// What a curve was computed for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub strategy: RelayStrategy,
    pub num_satellites: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tx_power_dbw: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isl_freq_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub misalignment_variance_rad2: Option<f64>,
}

impl CurveMeta {
    /// File-name stem, e.g. `af_M42_PT10dBW_f193THz_var0`.
    pub fn label(&self) -> String {
        let mut s = format!("{}_M{}", self.strategy, self.num_satellites);
        if let Some(p) = self.tx_power_dbw {
            s.push_str(&format!("_PT{p}dBW"));
        }
        if let Some(f) = self.isl_freq_hz {
            s.push_str(&format!("_f{}THz", f / 1e12));
        }
        if let Some(v) = self.misalignment_variance_rad2 {
            s.push_str(&format!("_var{v}"));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlerCurve {
    pub meta: CurveMeta,
    pub points: Vec<BlerPoint>,
}

impl BlerCurve {
    /// Reference SNR where the curve crosses `target`, interpolating
    /// linearly in log BLER between grid points. `None` if never reached.
    pub fn required_snr_db(&self, target: f64) -> Option<f64> {
        let pts = &self.points;
        let first = pts.iter().position(|p| p.bler <= target)?;
        if first == 0 {
            return Some(pts[0].ref_snr_db);
        }
        let (a, b) = (pts[first - 1], pts[first]);
        if b.bler <= 0.0 {
            return Some(b.ref_snr_db);
        }
        let (la, lb, lt) = (a.bler.log10(), b.bler.log10(), target.log10());
        Some(a.ref_snr_db + (la - lt) / (la - lb) * (b.ref_snr_db - a.ref_snr_db))
    }
}
