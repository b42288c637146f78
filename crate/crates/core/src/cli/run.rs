use std::path::Path;

use super::config::{LoadedConfig, Mode};
use super::output::{emit_csv, threshold_csv, Manifest};
use crate::error::{Error, Result};
use crate::relay::RelayStrategy;
use crate::sim::{misalignment_threshold_sweep, run_experiment, with_threads, PassSimulator, Threshold};

/// Command-line overrides applied on top of a loaded configuration.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<u32>,
    pub strategies: Option<Vec<RelayStrategy>>,
    pub threads: Option<usize>,
}

pub fn apply_overrides(loaded: &mut LoadedConfig, o: &Overrides) -> Result<()> {
    let c = &mut loaded.config;
    if let Some(s) = o.seed {
        c.seed = s;
    }
    if let Some(t) = o.trials {
        c.experiment.trials = t;
    }
    if let Some(list) = &o.strategies {
        c.experiment.strategies = list.clone();
    }
    if o.threads.is_some() {
        c.threads = o.threads;
    }
    c.validate()
}

fn write(out_dir: &Path, name: &str, text: &str) -> Result<()> {
    let p = out_dir.join(name);
    std::fs::write(&p, text).map_err(|e| Error::io(&p, e))
}

/// Runs the configured experiment and writes CSVs plus `manifest.json`.
pub fn run(loaded: &LoadedConfig, out_dir: &Path) -> Result<Manifest> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let cfg = &loaded.config;
    let base = cfg.scenario()?;
    let mut outputs = Vec::new();
    let mut notes = Vec::new();
    match cfg.experiment.mode {
        Mode::Bler => {
            let curves = with_threads(cfg.threads, || run_experiment(&cfg.plan(), &base, &loaded.table, cfg.seed))??;
            for c in &curves {
                let name = format!("{}.csv", c.meta.label());
                emit_csv(c, &out_dir.join(&name))?;
                outputs.push(name);
            }
        }
        Mode::Misalignment => {
            let spec = cfg.sweep_spec();
            for m in cfg.num_satellites() {
                let mut scenario = base.clone();
                scenario.geometry.num_satellites = m;
                let sim = PassSimulator::new(&scenario, &loaded.table, cfg.seed)?;
                let result = with_threads(cfg.threads, || misalignment_threshold_sweep(&sim, &spec))??;
                for c in &result.curves {
                    let name = format!("misalignment_{}_M{}_{}_PT{}dBW.csv", c.strategy, m, c.band.name, c.tx_power_dbw);
                    write(out_dir, &name, &threshold_csv(c))?;
                    outputs.push(name);
                }
                notes.push(match result.hard_handover {
                    Threshold::Achieved(db) => format!("M={m}: hard handover reaches the target at {db} dB"),
                    Threshold::Unachievable => format!("M={m}: hard handover does not reach the target on the grid"),
                });
            }
        }
    }
    let manifest = Manifest::new(loaded, outputs, notes);
    let json = serde_json::to_string_pretty(&manifest).expect("serializable manifest");
    write(out_dir, "manifest.json", &(json + "\n"))?;
    Ok(manifest)
}
