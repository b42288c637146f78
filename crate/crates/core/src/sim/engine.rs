use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::channel_g2s::{ChannelGenerator, ChannelParamTable, DwellUnit, FadingConfig};
use crate::channel_isl::IslConfig;
use crate::error::{Error, Result};
use crate::orbital::{find_pass_window, ConstellationGeometry, GroundUser, PassGeometry, Roles, Satellite, SearchInterval};
use crate::phy::{awgn, CodeModel, Modulation};
use crate::relay::{
    af_normalization, combine_af_symbol, combine_df_symbol, combine_noiseless_af_symbol, isl_receive, BlockInput, Branch, RelayStrategy,
};
use crate::rng::{Purpose, StreamFactory};
use crate::{db_to_linear, sim::budget::LinkBudget};

/// Physical and numerical setup of one pass.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub geometry: ConstellationGeometry,
    pub ground_user: GroundUser,
    pub search: SearchInterval,
    pub blocks_per_pass: usize,
    pub budget: LinkBudget,
    pub code: CodeModel,
    pub fading: FadingConfig,
    /// Fixed Doppler spread; when `None` it follows the range rate.
    pub doppler_override_hz: Option<f64>,
    /// Converts distance-based dwell statistics into time.
    pub terminal_speed_mps: f64,
}

impl Scenario {
    /// Reference setup for an `M`-satellite orbit.
    pub fn reference(num_satellites: u32) -> Self {
        let budget = LinkBudget::default();
        let code = CodeModel::default();
        Self {
            geometry: ConstellationGeometry::reference(num_satellites),
            ground_user: GroundUser::reference(),
            search: SearchInterval::new(18_000.0, 19_000.0, 1.0).expect("valid interval"),
            blocks_per_pass: 500,
            budget,
            code,
            fading: FadingConfig {
                symbol_time_s: budget.symbol_time_s(),
                ..FadingConfig::default()
            },
            doppler_override_hz: None,
            terminal_speed_mps: 1.5,
        }
    }

    pub fn seconds_per_unit(&self, unit: DwellUnit) -> f64 {
        match unit {
            DwellUnit::Seconds => 1.0,
            DwellUnit::Meters => 1.0 / self.terminal_speed_mps,
        }
    }
}

/// A strategy with the ISL it uses (if any).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variant {
    pub strategy: RelayStrategy,
    pub isl: Option<IslConfig>,
}

impl Variant {
    pub fn new(strategy: RelayStrategy, isl: Option<IslConfig>) -> Result<Self> {
        if strategy.uses_isl() && isl.is_none() {
            return Err(Error::invalid("strategy", format!("{strategy} needs an ISL configuration")));
        }
        Ok(Self {
            strategy,
            isl: if strategy.uses_isl() { isl } else { None },
        })
    }
}

/// Random draws of one block that do not depend on the reference SNR.
#[derive(Debug, Clone)]
pub struct BlockDraws {
    pub index: usize,
    pub roles: Roles,
    /// Channel coefficients per physical satellite.
    pub h: [Vec<Complex64>; 2],
    /// `(h0 / d)^2` per physical satellite.
    pub path_factor: [f64; 2],
    pub x: Vec<Complex64>,
    /// Receiver noise per physical satellite.
    pub noise: [Vec<Complex64>; 2],
    pub isl_noise: Vec<Complex64>,
    /// Standard-normal draw that scales into the pointing error.
    pub misalignment_z: f64,
}

/// Per-SNR received samples of one block, in relay/destination order.
#[derive(Debug, Clone, Default)]
pub struct BlockSignals {
    pub y_d: Vec<Complex64>,
    pub g_d: Vec<Complex64>,
    pub y_r: Vec<Complex64>,
    pub g_r: Vec<Complex64>,
}

impl BlockDraws {
    pub fn signals(&self, rho_ref: f64, out: &mut BlockSignals) {
        let d = self.roles.destination.index();
        let r = self.roles.relay.index();
        let fill = |sat: usize, y: &mut Vec<Complex64>, g: &mut Vec<Complex64>| {
            let amp = (rho_ref * self.path_factor[sat]).sqrt();
            g.clear();
            y.clear();
            for ((&h, &w), &x) in self.h[sat].iter().zip(&self.noise[sat]).zip(&self.x) {
                let gk = h * amp;
                g.push(gk);
                y.push(gk * x + w);
            }
        };
        fill(d, &mut out.y_d, &mut out.g_d);
        fill(r, &mut out.y_r, &mut out.g_r);
    }

    /// Relay-layer view of this block for one reference SNR.
    pub fn input<'a>(&'a self, signals: &'a BlockSignals, rho_isl: f64) -> BlockInput<'a> {
        BlockInput {
            x: &self.x,
            destination: Branch { y: &signals.y_d, g: &signals.g_d },
            relay: Branch { y: &signals.y_r, g: &signals.g_r },
            isl_noise: &self.isl_noise,
            rho_isl,
        }
    }
}

/// Pass geometry plus everything shared by all trials of one scenario.
#[derive(Debug)]
pub struct PassSimulator<'a> {
    scenario: &'a Scenario,
    table: &'a ChannelParamTable,
    pass: PassGeometry,
    modulation: Modulation,
    factory: StreamFactory,
}

impl<'a> PassSimulator<'a> {
    pub fn new(scenario: &'a Scenario, table: &'a ChannelParamTable, master_seed: u64) -> Result<Self> {
        scenario.code.validate()?;
        let pass = find_pass_window(&scenario.geometry, &scenario.ground_user, scenario.search, scenario.blocks_per_pass)?;
        Ok(Self {
            scenario,
            table,
            pass,
            modulation: Modulation::qpsk(),
            factory: StreamFactory::new(master_seed),
        })
    }

    pub fn pass(&self) -> &PassGeometry {
        &self.pass
    }

    pub fn scenario(&self) -> &Scenario {
        self.scenario
    }

    pub fn modulation(&self) -> &Modulation {
        &self.modulation
    }

    pub fn isl_distance_km(&self) -> f64 {
        self.scenario.geometry.isl_distance_km()
    }

    /// Realized ISL SNR of a block.
    pub fn rho_isl(&self, isl: &IslConfig, draws: &BlockDraws) -> f64 {
        isl.snr(self.isl_distance_km(), isl.misalignment_variance_rad2.sqrt() * draws.misalignment_z)
    }

    /// Streams the blocks of one trial in time order.
    pub fn for_each_block(&self, trial: u32, mut f: impl FnMut(&BlockDraws)) {
        let sc = self.scenario;
        let spu = sc.seconds_per_unit(self.table.dwell_unit);
        let mut gens = [Purpose::ChannelServing, Purpose::ChannelTarget]
            .map(|p| ChannelGenerator::new(self.table, spu, sc.fading.sinusoids, self.factory.stream(trial, 0, p)));
        let n = sc.code.block_symbols;
        let zero = Complex64::new(0.0, 0.0);
        let mut draws = BlockDraws {
            index: 0,
            roles: self.pass.roles[0],
            h: [vec![zero; n], vec![zero; n]],
            path_factor: [1.0; 2],
            x: Vec::with_capacity(n),
            noise: [Vec::with_capacity(n), Vec::with_capacity(n)],
            isl_noise: Vec::with_capacity(n),
            misalignment_z: 0.0,
        };
        let h0 = sc.geometry.orbit_height_km;
        for b in 0..self.pass.len() {
            let t0 = self.pass.times_s[b];
            for sat in [Satellite::Serving, Satellite::Target] {
                let i = sat.index();
                let look = self.pass.look(sat, b);
                let doppler = sc
                    .doppler_override_hz
                    .unwrap_or_else(|| sc.budget.doppler_hz(self.pass.range_rate_km_s[i][b]));
                gens[i].fill_block(t0, self.pass.quantized_elevation(sat, b), doppler, &sc.fading, &mut draws.h[i], None);
                draws.path_factor[i] = (h0 / look.slant_km).powi(2);
            }
            let block = b as u32;
            draws.index = b;
            draws.roles = self.pass.roles[b];
            let mut rng = self.factory.stream(trial, block, Purpose::Symbols);
            self.modulation.random_symbols(n, &mut rng, &mut draws.x);
            for (i, p) in [Purpose::NoiseServing, Purpose::NoiseTarget].into_iter().enumerate() {
                let mut rng = self.factory.stream(trial, block, p);
                draws.noise[i].clear();
                draws.noise[i].extend((0..n).map(|_| awgn(&mut rng)));
            }
            let mut rng = self.factory.stream(trial, block, Purpose::NoiseIsl);
            draws.isl_noise.clear();
            draws.isl_noise.extend((0..n).map(|_| awgn(&mut rng)));
            draws.misalignment_z = StandardNormal.sample(&mut self.factory.stream(trial, block, Purpose::Misalignment));
            f(&draws);
        }
    }

    /// Errors of every `(variant, snr)` request over one trial, indexed
    /// `[request][block]`.
    pub fn trial_errors(&self, trial: u32, variants: &[Variant], requests: &[(usize, f64)]) -> Vec<Vec<bool>> {
        let mut out = vec![Vec::with_capacity(self.pass.len()); requests.len()];
        let mut by_snr: Vec<(f64, Vec<usize>)> = Vec::new();
        for (k, &(_, snr)) in requests.iter().enumerate() {
            match by_snr.iter_mut().find(|(s, _)| s.to_bits() == snr.to_bits()) {
                Some((_, list)) => list.push(k),
                None => by_snr.push((snr, vec![k])),
            }
        }
        let mut signals = BlockSignals::default();
        self.for_each_block(trial, |draws| {
            for (snr, list) in &by_snr {
                draws.signals(db_to_linear(*snr), &mut signals);
                let mut eval = BlockEvaluator::new(self, draws, &signals);
                for &k in list {
                    out[k].push(eval.error(&variants[requests[k].0]));
                }
            }
        });
        out
    }

    /// Block error indicators of one strategy over one pass.
    pub fn run_pass(&self, trial: u32, variant: &Variant, ref_snr_db: f64) -> Vec<bool> {
        self.trial_errors(trial, std::slice::from_ref(variant), &[(0, ref_snr_db)]).remove(0)
    }
}

/// Evaluates strategies on one block, sharing the single-branch results.
struct BlockEvaluator<'s, 'a> {
    sim: &'s PassSimulator<'a>,
    draws: &'s BlockDraws,
    s: &'s BlockSignals,
    err_d: Option<bool>,
    err_r: Option<bool>,
}

impl<'s, 'a> BlockEvaluator<'s, 'a> {
    fn new(sim: &'s PassSimulator<'a>, draws: &'s BlockDraws, s: &'s BlockSignals) -> Self {
        Self {
            sim,
            draws,
            s,
            err_d: None,
            err_r: None,
        }
    }

    fn decide(&self, mut f: impl FnMut(usize) -> (f64, Complex64)) -> bool {
        let n = self.draws.x.len();
        let m = &self.sim.modulation;
        let sum: f64 = (0..n)
            .map(|k| {
                let (h, y) = f(k);
                m.realized_mi_per_bit(y, Complex64::new(h, 0.0))
            })
            .sum();
        self.sim.scenario.code.block_error(sum / n as f64)
    }

    fn direct(&self, y: &[Complex64], g: &[Complex64]) -> bool {
        let n = y.len();
        let m = &self.sim.modulation;
        let sum: f64 = y.iter().zip(g).map(|(&y, &g)| {
            let h2 = g.norm_sqr();
            if h2 > 0.0 {
                let h = h2.sqrt();
                m.realized_mi_per_bit(g.conj() * y / h, Complex64::new(h, 0.0))
            } else {
                0.0
            }
        }).sum();
        self.sim.scenario.code.block_error(sum / n as f64)
    }

    fn err_d(&mut self) -> bool {
        let v = self.err_d.unwrap_or_else(|| self.direct(&self.s.y_d, &self.s.g_d));
        self.err_d = Some(v);
        v
    }

    fn err_r(&mut self) -> bool {
        let v = self.err_r.unwrap_or_else(|| self.direct(&self.s.y_r, &self.s.g_r));
        self.err_r = Some(v);
        v
    }

    fn error(&mut self, v: &Variant) -> bool {
        let s = self.s;
        let x = &self.draws.x;
        let w = &self.draws.isl_noise;
        match v.strategy {
            RelayStrategy::HardHandover => self.err_d(),
            RelayStrategy::NoiselessDf => self.err_d() && self.err_r(),
            RelayStrategy::NoiselessAf => self.decide(|k| combine_noiseless_af_symbol(s.y_d[k], s.g_d[k], s.y_r[k], s.g_r[k])),
            RelayStrategy::Af => {
                let rho = self.sim.rho_isl(v.isl.as_ref().expect("AF variant has an ISL"), self.draws);
                self.decide(|k| {
                    let q = af_normalization(s.g_r[k]);
                    let y_isl = isl_receive(s.y_r[k] / q.sqrt(), rho, w[k]);
                    combine_af_symbol(s.y_d[k], s.g_d[k], y_isl, rho, q, s.g_r[k])
                })
            }
            RelayStrategy::Df => {
                if self.err_r() {
                    // A silent relay leaves exactly the direct observation.
                    return self.err_d();
                }
                let rho = self.sim.rho_isl(v.isl.as_ref().expect("DF variant has an ISL"), self.draws);
                self.decide(|k| combine_df_symbol(s.y_d[k], s.g_d[k], isl_receive(x[k], rho, w[k]), rho))
            }
        }
    }
}
