use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel_g2s::{ChannelParamTable, FadingConfig};
use crate::error::{Error, Result};
use crate::orbital::{ConstellationGeometry, GroundUser, SearchInterval};
use crate::phy::CodeModel;
use crate::relay::RelayStrategy;
use crate::sim::{ExperimentPlan, IslBand, LinkBudget, Scenario, SweepSpec};

/// Sample channel table compiled into the binary.
pub const SAMPLE_TABLE: &str = include_str!("../../../../data/lms_suburban_sample.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    pub orbit_height_km: f64,
    pub inclination_deg: f64,
    pub num_satellites: OneOrMany<u32>,
    pub search_start_s: f64,
    pub search_end_s: f64,
    pub search_step_s: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            orbit_height_km: 550.0,
            inclination_deg: 45.0,
            num_satellites: OneOrMany::One(42),
            search_start_s: 18_000.0,
            search_end_s: 19_000.0,
            search_step_s: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GroundUserSection {
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    pub min_elevation_deg: f64,
}

impl Default for GroundUserSection {
    fn default() -> Self {
        Self {
            latitude_deg: 45.0,
            longitude_deg: 7.0,
            min_elevation_deg: 25.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct G2sSection {
    pub carrier_freq_hz: f64,
    pub bandwidth_hz: f64,
    pub gu_antenna_gain_dbi: f64,
    pub satellite_antenna_gain_dbi: f64,
    pub noise_psd_dbm_hz: f64,
    pub environment: String,
    /// Channel parameter file, relative to the config file. The built-in
    /// sample table is used when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel_table: Option<PathBuf>,
    pub fading_interval_symbols: usize,
    pub sinusoids: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub doppler_hz: Option<f64>,
    pub terminal_speed_mps: f64,
}

impl Default for G2sSection {
    fn default() -> Self {
        let b = LinkBudget::default();
        let f = FadingConfig::default();
        Self {
            carrier_freq_hz: b.carrier_freq_hz,
            bandwidth_hz: b.bandwidth_hz,
            gu_antenna_gain_dbi: b.gu_antenna_gain_dbi,
            satellite_antenna_gain_dbi: b.satellite_antenna_gain_dbi,
            noise_psd_dbm_hz: b.noise_psd_dbm_hz,
            environment: "suburban".into(),
            channel_table: None,
            fading_interval_symbols: f.fading_interval_symbols,
            sinusoids: f.sinusoids,
            doppler_hz: None,
            terminal_speed_mps: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IslSection {
    #[serde(rename = "band")]
    pub bands: Vec<IslBand>,
    pub tx_power_dbw: Vec<f64>,
    pub misalignment_variances: Vec<f64>,
}

impl Default for IslSection {
    fn default() -> Self {
        Self {
            bands: vec![IslBand::optical()],
            tx_power_dbw: vec![5.0, 10.0, 20.0],
            misalignment_variances: vec![0.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// BLER versus reference SNR.
    Bler,
    /// Required reference SNR versus misalignment variance.
    Misalignment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub mode: Mode,
    pub strategies: Vec<RelayStrategy>,
    pub ref_snr_min_db: f64,
    pub ref_snr_max_db: f64,
    pub ref_snr_step_db: f64,
    pub trials: u32,
    pub blocks_per_pass: usize,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            mode: Mode::Bler,
            strategies: RelayStrategy::ALL.to_vec(),
            ref_snr_min_db: 0.0,
            ref_snr_max_db: 45.0,
            ref_snr_step_db: 1.0,
            trials: 200,
            blocks_per_pass: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub target_bler: f64,
    pub tx_power_dbw: f64,
    pub variances: Vec<f64>,
    pub step_db: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            target_bler: 1e-5,
            tx_power_dbw: 25.0,
            variances: (0..=10).map(|k| 10f64.powi(-12 + k)).collect(),
            step_db: 0.25,
        }
    }
}

/// Complete run description; every field has a reference default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub geometry: GeometrySection,
    pub ground_user: GroundUserSection,
    pub g2s: G2sSection,
    pub code: CodeModel,
    pub isl: IslSection,
    pub experiment: ExperimentSection,
    pub sweep: SweepSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            threads: None,
            geometry: GeometrySection::default(),
            ground_user: GroundUserSection::default(),
            g2s: G2sSection::default(),
            code: CodeModel::default(),
            isl: IslSection::default(),
            experiment: ExperimentSection::default(),
            sweep: SweepSection::default(),
        }
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be positive, got {v}")))
    }
}

impl RunConfig {
    /// Parses TOML text; `origin` is only used in messages.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let parse_err = |message: String| Error::Parse {
            path: origin.to_path_buf(),
            message,
        };
        let doc: toml::Table = toml::from_str(text).map_err(|e| parse_err(e.to_string()))?;
        if doc.is_empty() {
            return Err(parse_err("configuration contains no settings".into()));
        }
        let cfg: RunConfig = toml::from_str(text).map_err(|e| parse_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        positive("geometry.orbit_height_km", g.orbit_height_km)?;
        if !(0.0..=180.0).contains(&g.inclination_deg) {
            return Err(Error::invalid("geometry.inclination_deg", "must lie in [0, 180]"));
        }
        let ms = g.num_satellites.to_vec();
        if ms.is_empty() || ms.iter().any(|&m| m < 2) {
            return Err(Error::invalid("geometry.num_satellites", "must be >= 2"));
        }
        SearchInterval::new(g.search_start_s, g.search_end_s, g.search_step_s)
            .map_err(|e| Error::invalid("geometry.search_*", e.to_string()))?;
        let u = &self.ground_user;
        if !(u.latitude_deg.abs() <= 90.0) {
            return Err(Error::invalid("ground_user.latitude_deg", "must lie in [-90, 90]"));
        }
        if !(u.longitude_deg.abs() <= 180.0) {
            return Err(Error::invalid("ground_user.longitude_deg", "must lie in [-180, 180]"));
        }
        if !(u.min_elevation_deg > 0.0 && u.min_elevation_deg < 90.0) {
            return Err(Error::invalid("ground_user.min_elevation_deg", "must lie in (0, 90)"));
        }
        let s = &self.g2s;
        positive("g2s.carrier_freq_hz", s.carrier_freq_hz)?;
        positive("g2s.bandwidth_hz", s.bandwidth_hz)?;
        positive("g2s.terminal_speed_mps", s.terminal_speed_mps)?;
        if s.fading_interval_symbols == 0 {
            return Err(Error::invalid("g2s.fading_interval_symbols", "must be >= 1"));
        }
        if s.sinusoids == 0 {
            return Err(Error::invalid("g2s.sinusoids", "must be >= 1"));
        }
        if let Some(d) = s.doppler_hz {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::invalid("g2s.doppler_hz", "must be non-negative"));
            }
        }
        self.scenario_budget().validate()?;
        self.code.validate()?;
        for (i, b) in self.isl.bands.iter().enumerate() {
            positive(&format!("isl.band[{i}].carrier_freq_hz"), b.carrier_freq_hz)?;
            positive(&format!("isl.band[{i}].noise_temperature_k"), b.noise_temperature_k)?;
            if let Some(w) = b.bandwidth_hz {
                positive(&format!("isl.band[{i}].bandwidth_hz"), w)?;
            }
        }
        if self.isl.tx_power_dbw.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("isl.tx_power_dbw", "must be finite"));
        }
        let e = &self.experiment;
        if e.trials == 0 {
            return Err(Error::invalid("experiment.trials", "must be >= 1"));
        }
        if e.blocks_per_pass == 0 {
            return Err(Error::invalid("experiment.blocks_per_pass", "must be >= 1"));
        }
        positive("experiment.ref_snr_step_db", e.ref_snr_step_db)?;
        if !(e.ref_snr_max_db >= e.ref_snr_min_db) {
            return Err(Error::invalid("experiment.ref_snr_max_db", "must be >= ref_snr_min_db"));
        }
        if e.strategies.is_empty() {
            return Err(Error::invalid("experiment.strategies", "must not be empty"));
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("threads", "must be >= 1"));
        }
        match e.mode {
            Mode::Bler => self.plan().validate(),
            Mode::Misalignment => self.sweep_spec().validate(),
        }
    }

    fn scenario_budget(&self) -> LinkBudget {
        let s = &self.g2s;
        LinkBudget {
            gu_antenna_gain_dbi: s.gu_antenna_gain_dbi,
            satellite_antenna_gain_dbi: s.satellite_antenna_gain_dbi,
            noise_psd_dbm_hz: s.noise_psd_dbm_hz,
            bandwidth_hz: s.bandwidth_hz,
            carrier_freq_hz: s.carrier_freq_hz,
        }
    }

    pub fn num_satellites(&self) -> Vec<u32> {
        self.geometry.num_satellites.to_vec()
    }

    /// Scenario for the first constellation size.
    pub fn scenario(&self) -> Result<Scenario> {
        let g = &self.geometry;
        let u = &self.ground_user;
        let budget = self.scenario_budget();
        Ok(Scenario {
            geometry: ConstellationGeometry::new(g.orbit_height_km, g.inclination_deg.to_radians(), self.num_satellites()[0])?,
            ground_user: GroundUser::new(u.latitude_deg.to_radians(), u.longitude_deg.to_radians(), u.min_elevation_deg.to_radians())?,
            search: SearchInterval::new(g.search_start_s, g.search_end_s, g.search_step_s)?,
            blocks_per_pass: self.experiment.blocks_per_pass,
            budget,
            code: self.code,
            fading: FadingConfig {
                symbol_time_s: budget.symbol_time_s(),
                fading_interval_symbols: self.g2s.fading_interval_symbols,
                sinusoids: self.g2s.sinusoids,
            },
            doppler_override_hz: self.g2s.doppler_hz,
            terminal_speed_mps: self.g2s.terminal_speed_mps,
        })
    }

    pub fn ref_snr_grid(&self) -> Vec<f64> {
        let e = &self.experiment;
        let n = ((e.ref_snr_max_db - e.ref_snr_min_db) / e.ref_snr_step_db + 1e-9).floor() as usize + 1;
        (0..n).map(|k| e.ref_snr_min_db + k as f64 * e.ref_snr_step_db).collect()
    }

    pub fn plan(&self) -> ExperimentPlan {
        ExperimentPlan {
            strategies: self.experiment.strategies.clone(),
            ref_snr_db: self.ref_snr_grid(),
            num_satellites: self.num_satellites(),
            bands: self.isl.bands.clone(),
            tx_power_dbw: self.isl.tx_power_dbw.clone(),
            misalignment_variances: self.isl.misalignment_variances.clone(),
            trials: self.experiment.trials,
        }
    }

    pub fn sweep_spec(&self) -> SweepSpec {
        SweepSpec {
            strategies: self.experiment.strategies.clone(),
            bands: self.isl.bands.clone(),
            tx_power_dbw: self.sweep.tx_power_dbw,
            variances: self.sweep.variances.clone(),
            target_bler: self.sweep.target_bler,
            snr_min_db: self.experiment.ref_snr_min_db,
            snr_max_db: self.experiment.ref_snr_max_db,
            step_db: self.sweep.step_db,
            trials: self.experiment.trials,
        }
    }
}

/// A validated configuration with its channel table resolved.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    /// Text of the channel table in force.
    pub table_text: String,
    pub table: ChannelParamTable,
}

impl LoadedConfig {
    pub fn new(config: RunConfig, table_text: String, origin: &Path) -> Result<Self> {
        let table = ChannelParamTable::parse(&table_text, &config.g2s.environment).map_err(|e| match e {
            Error::ChannelTable(m) => Error::Parse {
                path: origin.to_path_buf(),
                message: m,
            },
            other => other,
        })?;
        Ok(Self { config, table_text, table })
    }
}

/// Loads a TOML run configuration, or the manifest of a previous run.
pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if path.extension().is_some_and(|e| e == "json") {
        return super::output::config_from_manifest(&text, path);
    }
    let config = RunConfig::parse(&text, path)?;
    let table_text = match &config.g2s.channel_table {
        None => SAMPLE_TABLE.to_string(),
        Some(rel) => {
            let p = path.parent().unwrap_or(Path::new(".")).join(rel);
            std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?
        }
    };
    let origin = config.g2s.channel_table.clone().unwrap_or_else(|| path.to_path_buf());
    LoadedConfig::new(config, table_text, &origin)
}
