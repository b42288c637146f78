use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, LogNormal, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbital::TABLE_ELEVATIONS_DEG;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelState {
    Good,
    Bad,
}

impl ChannelState {
    pub fn other(self) -> Self {
        match self {
            ChannelState::Good => ChannelState::Bad,
            ChannelState::Bad => ChannelState::Good,
        }
    }
}

/// Loo distribution parameters, all in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LooTriple {
    /// Mean of the LoS amplitude, `20 log10(a)`.
    pub ma_db: f64,
    /// Standard deviation of the LoS amplitude in dB.
    pub sigma_a_db: f64,
    /// Multipath power `10 log10(sigma^2)`.
    pub mp_db: f64,
}

impl LooTriple {
    pub fn new(ma_db: f64, sigma_a_db: f64, mp_db: f64) -> Result<Self> {
        if !(sigma_a_db > 0.0) {
            return Err(Error::invalid("sigma_a_db", "must be positive"));
        }
        if !ma_db.is_finite() || mp_db.is_nan() || mp_db == f64::INFINITY {
            return Err(Error::invalid("loo triple", "M_A must be finite and MP below +inf"));
        }
        Ok(Self {
            ma_db,
            sigma_a_db,
            mp_db,
        })
    }

    /// Per-component scatter variance `sigma^2 = 10^(MP/10)`.
    pub fn sigma2(&self) -> f64 {
        10f64.powf(self.mp_db / 10.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DwellUnit {
    /// Durations in seconds.
    #[serde(rename = "s")]
    Seconds,
    /// Durations in metres travelled by the terminal.
    #[serde(rename = "m")]
    Meters,
}

/// Lognormal state duration: `ln(D) ~ N(ln_mean, ln_std^2)`, floored at `min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DwellDistribution {
    pub ln_mean: f64,
    pub ln_std: f64,
    #[serde(default)]
    pub min: f64,
}

impl DwellDistribution {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let d = LogNormal::new(self.ln_mean, self.ln_std)
            .expect("validated dwell distribution")
            .sample(rng);
        d.max(self.min)
    }

    pub fn median(&self) -> f64 {
        self.ln_mean.exp()
    }

    pub fn mean(&self) -> f64 {
        (self.ln_mean + 0.5 * self.ln_std * self.ln_std).exp()
    }
}

/// How a state occurrence draws its Loo triple: `M_A` is normal (optionally
/// clipped), `Sigma_A` and `MP` are affine in `M_A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleDistribution {
    pub ma_mean_db: f64,
    pub ma_std_db: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ma_min_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ma_max_db: Option<f64>,
    /// `[slope, intercept_db]`.
    pub sigma_a: [f64; 2],
    /// `[slope, intercept_db]`.
    pub mp: [f64; 2],
    #[serde(default = "default_sigma_a_floor")]
    pub sigma_a_floor_db: f64,
}

fn default_sigma_a_floor() -> f64 {
    0.1
}

impl TripleDistribution {
    pub fn triple_for_ma(&self, ma_db: f64) -> LooTriple {
        let ma = ma_db
            .max(self.ma_min_db.unwrap_or(f64::NEG_INFINITY))
            .min(self.ma_max_db.unwrap_or(f64::INFINITY));
        LooTriple {
            ma_db: ma,
            sigma_a_db: (self.sigma_a[0] * ma + self.sigma_a[1]).max(self.sigma_a_floor_db),
            mp_db: self.mp[0] * ma + self.mp[1],
        }
    }

    /// Triple at the mean and at both clip limits (when set).
    pub fn representative_triples(&self) -> Vec<LooTriple> {
        let mut ma = vec![self.ma_mean_db];
        ma.extend(self.ma_min_db);
        ma.extend(self.ma_max_db);
        ma.into_iter().map(|m| self.triple_for_ma(m)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateParams {
    pub dwell: DwellDistribution,
    pub triple: TripleDistribution,
}

impl StateParams {
    /// Draws the Loo triple of one state occurrence.
    pub fn sample_triple<R: Rng + ?Sized>(&self, rng: &mut R) -> LooTriple {
        let t = &self.triple;
        let ma = if t.ma_std_db > 0.0 {
            Normal::new(t.ma_mean_db, t.ma_std_db)
                .expect("validated triple distribution")
                .sample(rng)
        } else {
            t.ma_mean_db
        };
        t.triple_for_ma(ma)
    }

    fn validate(&self, at: &str) -> Result<()> {
        let d = &self.dwell;
        if !(d.ln_std > 0.0) || !d.ln_mean.is_finite() || !(d.min >= 0.0) {
            return Err(Error::ChannelTable(format!("{at}.dwell: need ln_std > 0 and min >= 0")));
        }
        let t = &self.triple;
        if !(t.ma_std_db >= 0.0) || !t.ma_mean_db.is_finite() {
            return Err(Error::ChannelTable(format!("{at}.triple: need ma_std_db >= 0")));
        }
        if let (Some(lo), Some(hi)) = (t.ma_min_db, t.ma_max_db) {
            if lo > hi {
                return Err(Error::ChannelTable(format!("{at}.triple: ma_min_db > ma_max_db")));
            }
        }
        if !(t.sigma_a_floor_db > 0.0) {
            return Err(Error::ChannelTable(format!("{at}.triple: sigma_a_floor_db must be positive")));
        }
        if t.sigma_a.iter().chain(t.mp.iter()).any(|v| !v.is_finite()) {
            return Err(Error::ChannelTable(format!("{at}.triple: coefficients must be finite")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElevationEntry {
    pub environment: String,
    pub elevation_deg: u32,
    pub good: StateParams,
    pub bad: StateParams,
}

impl ElevationEntry {
    pub fn state(&self, state: ChannelState) -> &StateParams {
        match state {
            ChannelState::Good => &self.good,
            ChannelState::Bad => &self.bad,
        }
    }
}

/// On-disk layout of a channel parameter file (TOML).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelTableFile {
    pub format_version: u32,
    #[serde(default)]
    pub description: String,
    pub dwell_unit: DwellUnit,
    /// Correlation length of the LoS low-pass process, in `dwell_unit`.
    pub los_correlation: f64,
    #[serde(rename = "entry")]
    pub entries: Vec<ElevationEntry>,
}

pub const TABLE_FORMAT_VERSION: u32 = 1;

/// Validated parameters for one environment, complete over the tabulated elevations.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParamTable {
    pub environment: String,
    pub description: String,
    pub dwell_unit: DwellUnit,
    pub los_correlation: f64,
    entries: BTreeMap<u32, ElevationEntry>,
}

impl ChannelParamTable {
    pub fn from_file(file: &ChannelTableFile, environment: &str) -> Result<Self> {
        if file.format_version != TABLE_FORMAT_VERSION {
            return Err(Error::ChannelTable(format!(
                "unsupported format_version {} (expected {TABLE_FORMAT_VERSION})",
                file.format_version
            )));
        }
        if !(file.los_correlation >= 0.0) {
            return Err(Error::ChannelTable("los_correlation must be >= 0".into()));
        }
        let mut entries = BTreeMap::new();
        for e in file.entries.iter().filter(|e| e.environment == environment) {
            if !TABLE_ELEVATIONS_DEG.contains(&e.elevation_deg) {
                return Err(Error::ChannelTable(format!(
                    "{environment}: elevation {} is not one of {TABLE_ELEVATIONS_DEG:?}",
                    e.elevation_deg
                )));
            }
            let at = format!("{environment}@{}", e.elevation_deg);
            e.good.validate(&format!("{at}.good"))?;
            e.bad.validate(&format!("{at}.bad"))?;
            if entries.insert(e.elevation_deg, e.clone()).is_some() {
                return Err(Error::ChannelTable(format!("{at}: duplicate entry")));
            }
        }
        let missing: Vec<u32> = TABLE_ELEVATIONS_DEG
            .iter()
            .copied()
            .filter(|el| !entries.contains_key(el))
            .collect();
        if !missing.is_empty() {
            return Err(Error::ChannelTable(format!(
                "environment `{environment}` is missing elevations {missing:?}"
            )));
        }
        Ok(Self {
            environment: environment.to_string(),
            description: file.description.clone(),
            dwell_unit: file.dwell_unit,
            los_correlation: file.los_correlation,
            entries,
        })
    }

    pub fn parse(text: &str, environment: &str) -> Result<Self> {
        let file: ChannelTableFile =
            toml::from_str(text).map_err(|e| Error::ChannelTable(e.to_string()))?;
        Self::from_file(&file, environment)
    }

    pub fn load(path: &Path, environment: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: ChannelTableFile = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::from_file(&file, environment)
    }

    /// Entry for a quantized elevation (one of the tabulated values).
    pub fn entry(&self, elevation_deg: u32) -> &ElevationEntry {
        self.entries
            .get(&elevation_deg)
            .unwrap_or_else(|| panic!("no channel entry for elevation {elevation_deg}"))
    }

    pub fn entries(&self) -> impl Iterator<Item = &ElevationEntry> {
        self.entries.values()
    }

    /// Seconds per table duration unit for a terminal moving at `speed_m_s`.
    pub fn seconds_per_unit(&self, speed_m_s: f64) -> f64 {
        match self.dwell_unit {
            DwellUnit::Seconds => 1.0,
            DwellUnit::Meters => 1.0 / speed_m_s,
        }
    }
}
