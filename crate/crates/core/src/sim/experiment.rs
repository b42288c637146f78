use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curve::{BlerCurve, BlerPoint, CurveMeta};
use super::engine::{PassSimulator, Scenario, Variant};
use crate::channel_g2s::ChannelParamTable;
use crate::channel_isl::IslConfig;
use crate::error::{Error, Result};
use crate::relay::RelayStrategy;

/// ISL carrier and antenna; the beamwidth follows from the gain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IslBand {
    pub name: String,
    pub carrier_freq_hz: f64,
    pub antenna_gain_dbi: f64,
    #[serde(default = "default_noise_temperature")]
    pub noise_temperature_k: f64,
    /// Defaults to 2 % of the carrier.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth_hz: Option<f64>,
}

fn default_noise_temperature() -> f64 {
    7000.0
}

impl IslBand {
    pub fn optical() -> Self {
        Self {
            name: "optical".into(),
            carrier_freq_hz: 193e12,
            antenna_gain_dbi: 90.0,
            noise_temperature_k: 7000.0,
            bandwidth_hz: None,
        }
    }

    pub fn terahertz() -> Self {
        Self {
            name: "thz".into(),
            carrier_freq_hz: 2e12,
            antenna_gain_dbi: 60.0,
            noise_temperature_k: 7000.0,
            bandwidth_hz: None,
        }
    }

    pub fn config(&self, tx_power_dbw: f64, misalignment_variance_rad2: f64) -> Result<IslConfig> {
        let mut cfg = IslConfig::with_gain_db(self.carrier_freq_hz, self.antenna_gain_dbi, tx_power_dbw, misalignment_variance_rad2)?;
        cfg.noise_temperature_k = self.noise_temperature_k;
        if let Some(w) = self.bandwidth_hz {
            cfg.bandwidth_hz = w;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs `f` on a pool of `threads` workers (global pool when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::invalid("threads", e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Error counts of each `(variant, snr)` request summed over `trials`
/// passes. Each request sees `trials * blocks_per_pass` blocks.
pub fn count_errors(sim: &PassSimulator<'_>, variants: &[Variant], requests: &[(usize, f64)], trials: u32) -> Vec<u64> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            sim.trial_errors(t, variants, requests)
                .iter()
                .map(|e| e.iter().filter(|&&x| x).count() as u64)
                .collect::<Vec<_>>()
        })
        .reduce(
            || vec![0; requests.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// BLER of one strategy at one reference SNR.
pub fn estimate_bler(sim: &PassSimulator<'_>, variant: &Variant, ref_snr_db: f64, trials: u32) -> BlerPoint {
    let errors = count_errors(sim, std::slice::from_ref(variant), &[(0, ref_snr_db)], trials)[0];
    BlerPoint::from_counts(ref_snr_db, errors, trials as u64 * sim.pass().len() as u64)
}

/// BLER curves over a reference-SNR grid, all sharing the same draws.
pub fn estimate_curves(sim: &PassSimulator<'_>, variants: &[Variant], ref_snr_db: &[f64], trials: u32) -> Vec<Vec<BlerPoint>> {
    let requests: Vec<(usize, f64)> = (0..variants.len())
        .flat_map(|v| ref_snr_db.iter().map(move |&s| (v, s)))
        .collect();
    let counts = count_errors(sim, variants, &requests, trials);
    let blocks = trials as u64 * sim.pass().len() as u64;
    counts
        .chunks(ref_snr_db.len())
        .map(|c| c.iter().zip(ref_snr_db).map(|(&e, &s)| BlerPoint::from_counts(s, e, blocks)).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub strategies: Vec<RelayStrategy>,
    pub ref_snr_db: Vec<f64>,
    pub num_satellites: Vec<u32>,
    pub bands: Vec<IslBand>,
    pub tx_power_dbw: Vec<f64>,
    pub misalignment_variances: Vec<f64>,
    pub trials: u32,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.strategies.is_empty() {
            return Err(Error::invalid("experiment.strategies", "must not be empty"));
        }
        if self.ref_snr_db.is_empty() || self.ref_snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::invalid("experiment.ref_snr_db", "must be a non-empty list of finite values"));
        }
        if self.num_satellites.is_empty() || self.num_satellites.iter().any(|&m| m < 2) {
            return Err(Error::invalid("geometry.num_satellites", "must be >= 2"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("experiment.trials", "must be >= 1"));
        }
        if self.strategies.iter().any(|s| s.uses_isl()) {
            if self.bands.is_empty() || self.tx_power_dbw.is_empty() || self.misalignment_variances.is_empty() {
                return Err(Error::invalid("isl", "AF/DF need at least one band, power and misalignment variance"));
            }
            if self.misalignment_variances.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                return Err(Error::invalid("isl.misalignment_variances", "must be non-negative"));
            }
        }
        Ok(())
    }

    /// Variants for one constellation size, with their curve metadata.
    pub fn variants(&self, num_satellites: u32) -> Result<Vec<(Variant, CurveMeta)>> {
        let mut out = Vec::new();
        for &strategy in &self.strategies {
            if !strategy.uses_isl() {
                let meta = CurveMeta {
                    strategy,
                    num_satellites,
                    tx_power_dbw: None,
                    isl_freq_hz: None,
                    misalignment_variance_rad2: None,
                };
                out.push((Variant::new(strategy, None)?, meta));
                continue;
            }
            for band in &self.bands {
                for &p in &self.tx_power_dbw {
                    for &var in &self.misalignment_variances {
                        let meta = CurveMeta {
                            strategy,
                            num_satellites,
                            tx_power_dbw: Some(p),
                            isl_freq_hz: Some(band.carrier_freq_hz),
                            misalignment_variance_rad2: Some(var),
                        };
                        out.push((Variant::new(strategy, Some(band.config(p, var)?))?, meta));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Runs every curve of the plan. `base` provides everything except the
/// constellation size.
pub fn run_experiment(plan: &ExperimentPlan, base: &Scenario, table: &ChannelParamTable, master_seed: u64) -> Result<Vec<BlerCurve>> {
    plan.validate()?;
    let mut curves = Vec::new();
    for &m in &plan.num_satellites {
        let mut scenario = base.clone();
        scenario.geometry.num_satellites = m;
        scenario.geometry.validate()?;
        let sim = PassSimulator::new(&scenario, table, master_seed)?;
        let (variants, metas): (Vec<_>, Vec<_>) = plan.variants(m)?.into_iter().unzip();
        let points = estimate_curves(&sim, &variants, &plan.ref_snr_db, plan.trials);
        curves.extend(metas.into_iter().zip(points).map(|(meta, points)| BlerCurve { meta, points }));
    }
    Ok(curves)
}

/// Outcome of a threshold search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Threshold {
    /// Smallest grid reference SNR (dB) meeting the target.
    Achieved(f64),
    /// Target missed even at the top of the grid.
    Unachievable,
}

impl Threshold {
    pub fn db(self) -> Option<f64> {
        match self {
            Threshold::Achieved(v) => Some(v),
            Threshold::Unachievable => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub strategies: Vec<RelayStrategy>,
    pub bands: Vec<IslBand>,
    pub tx_power_dbw: f64,
    pub variances: Vec<f64>,
    pub target_bler: f64,
    pub snr_min_db: f64,
    pub snr_max_db: f64,
    pub step_db: f64,
    pub trials: u32,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_bler > 0.0 && self.target_bler < 1.0) {
            return Err(Error::invalid("sweep.target_bler", "must lie in (0, 1)"));
        }
        if !(self.step_db > 0.0 && self.snr_max_db > self.snr_min_db) {
            return Err(Error::invalid("sweep.step_db", "need step > 0 and max > min"));
        }
        if self.strategies.iter().any(|s| !s.uses_isl()) || self.strategies.is_empty() {
            return Err(Error::invalid("sweep.strategies", "only af and df depend on the misalignment"));
        }
        if self.bands.is_empty() || self.variances.is_empty() || self.variances.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::invalid("sweep.variances", "need bands and non-negative variances"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("sweep.trials", "must be >= 1"));
        }
        Ok(())
    }

    fn grid_len(&self) -> usize {
        ((self.snr_max_db - self.snr_min_db) / self.step_db).round() as usize + 1
    }

    fn grid(&self, i: usize) -> f64 {
        self.snr_min_db + i as f64 * self.step_db
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCurve {
    pub strategy: RelayStrategy,
    pub band: IslBand,
    pub tx_power_dbw: f64,
    pub num_satellites: u32,
    /// `(sigma_p^2, required reference SNR)`.
    pub points: Vec<(f64, Threshold)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub curves: Vec<ThresholdCurve>,
    pub hard_handover: Threshold,
}

/// Independent bisections on the reference-SNR grid for many variants, run
/// in lockstep so each round shares one Monte-Carlo pass.
pub fn find_thresholds(sim: &PassSimulator<'_>, variants: &[Variant], spec: &SweepSpec) -> Vec<Threshold> {
    let n = spec.grid_len();
    let blocks = spec.trials as u64 * sim.pass().len() as u64;
    let mut cache: HashMap<(usize, usize), bool> = HashMap::new();
    let evaluate = |asks: Vec<(usize, usize)>, cache: &mut HashMap<(usize, usize), bool>| {
        let asks: Vec<_> = asks.into_iter().filter(|k| !cache.contains_key(k)).collect();
        if asks.is_empty() {
            return;
        }
        let requests: Vec<(usize, f64)> = asks.iter().map(|&(v, i)| (v, spec.grid(i))).collect();
        let counts = count_errors(sim, variants, &requests, spec.trials);
        for (k, e) in asks.into_iter().zip(counts) {
            cache.insert(k, e as f64 / blocks as f64 <= spec.target_bler);
        }
    };
    let all: Vec<usize> = (0..variants.len()).collect();
    evaluate(all.iter().flat_map(|&v| [(v, n - 1), (v, 0)]).collect(), &mut cache);
    let mut bounds: Vec<Option<(usize, usize)>> = all
        .iter()
        .map(|&v| (cache[&(v, n - 1)] && !cache[&(v, 0)]).then_some((0, n - 1)))
        .collect();
    loop {
        let asks: Vec<(usize, usize)> = bounds
            .iter()
            .enumerate()
            .filter_map(|(v, b)| b.filter(|(lo, hi)| hi - lo > 1).map(|(lo, hi)| (v, (lo + hi) / 2)))
            .collect();
        if asks.is_empty() {
            break;
        }
        evaluate(asks.clone(), &mut cache);
        for (v, mid) in asks {
            let (lo, hi) = bounds[v].as_mut().expect("active bisection");
            if cache[&(v, mid)] {
                *hi = mid;
            } else {
                *lo = mid;
            }
        }
    }
    all.iter()
        .map(|&v| {
            if !cache[&(v, n - 1)] {
                Threshold::Unachievable
            } else if cache[&(v, 0)] {
                Threshold::Achieved(spec.grid(0))
            } else {
                Threshold::Achieved(spec.grid(bounds[v].expect("bisected").1))
            }
        })
        .collect()
}

/// Required reference SNR versus misalignment variance per strategy and band.
pub fn misalignment_threshold_sweep(sim: &PassSimulator<'_>, spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let mut variants = vec![Variant::new(RelayStrategy::HardHandover, None)?];
    let mut keys = Vec::new();
    for &strategy in &spec.strategies {
        for band in &spec.bands {
            for &var in &spec.variances {
                variants.push(Variant::new(strategy, Some(band.config(spec.tx_power_dbw, var)?))?);
                keys.push((strategy, band.clone(), var));
            }
        }
    }
    let thresholds = find_thresholds(sim, &variants, spec);
    let mut curves: Vec<ThresholdCurve> = Vec::new();
    for ((strategy, band, var), th) in keys.into_iter().zip(thresholds[1..].iter().copied()) {
        match curves.iter_mut().find(|c| c.strategy == strategy && c.band == band) {
            Some(c) => c.points.push((var, th)),
            None => curves.push(ThresholdCurve {
                strategy,
                band,
                tx_power_dbw: spec.tx_power_dbw,
                num_satellites: sim.scenario().geometry.num_satellites,
                points: vec![(var, th)],
            }),
        }
    }
    Ok(SweepResult {
        curves,
        hard_handover: thresholds[0],
    })
}
