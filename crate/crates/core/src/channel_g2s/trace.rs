use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use super::fading::{JakesProcess, ShadowingProcess};
use super::table::{ChannelParamTable, ChannelState, ElevationEntry, LooTriple};
use crate::rng::SimRng;

/// One state occurrence of a sampled sequence, in table duration units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateOccurrence {
    pub state: ChannelState,
    pub start: f64,
    pub duration: f64,
}

/// Draws the starting state with probability proportional to the mean dwell.
pub fn initial_state<R: Rng + ?Sized>(entry: &ElevationEntry, rng: &mut R) -> ChannelState {
    let good = entry.good.dwell.mean();
    let bad = entry.bad.dwell.mean();
    if rng.random::<f64>() * (good + bad) < good {
        ChannelState::Good
    } else {
        ChannelState::Bad
    }
}

/// Alternating G/B occurrences covering `[0, duration)`; the last one is
/// truncated at `duration`.
pub fn sample_state_sequence<R: Rng + ?Sized>(
    table: &ChannelParamTable,
    elevation_deg: u32,
    duration: f64,
    rng: &mut R,
) -> Vec<StateOccurrence> {
    let entry = table.entry(elevation_deg);
    let mut state = initial_state(entry, rng);
    let mut start = 0.0;
    let mut out = Vec::new();
    while start < duration {
        let dwell = entry.state(state).dwell.sample(rng);
        out.push(StateOccurrence {
            state,
            start,
            duration: dwell.min(duration - start),
        });
        start += dwell;
        state = state.other();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingConfig {
    pub symbol_time_s: f64,
    /// Symbols per fading sample; the scatter term is held across them and
    /// the LoS level is interpolated linearly in dB.
    pub fading_interval_symbols: usize,
    /// Sinusoids in the Jakes generator.
    pub sinusoids: usize,
}

impl Default for FadingConfig {
    fn default() -> Self {
        Self {
            symbol_time_s: 1.0 / 5e6,
            fading_interval_symbols: 100,
            sinusoids: 32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccurrenceRecord {
    pub state: ChannelState,
    pub triple: LooTriple,
    pub start_s: f64,
    pub end_s: f64,
    los_phase: f64,
}

#[derive(Debug, Clone, Copy)]
struct FadingSample {
    los_db: f64,
    los_phase: f64,
    scatter: Complex64,
    occurrence: u32,
}

/// Channel process of one satellite link, advanced monotonically in time.
///
/// State occurrences are drawn lazily with the parameters of the elevation
/// in force when each occurrence starts.
#[derive(Debug)]
pub struct ChannelGenerator<'t> {
    table: &'t ChannelParamTable,
    seconds_per_unit: f64,
    rng: SimRng,
    shadow: ShadowingProcess,
    jakes: JakesProcess,
    occurrences: Vec<OccurrenceRecord>,
    clock_s: Option<f64>,
}

impl<'t> ChannelGenerator<'t> {
    pub fn new(table: &'t ChannelParamTable, seconds_per_unit: f64, sinusoids: usize, mut rng: SimRng) -> Self {
        let shadow = ShadowingProcess::new(table.los_correlation * seconds_per_unit, &mut rng);
        let jakes = JakesProcess::new(sinusoids, &mut rng);
        Self {
            table,
            seconds_per_unit,
            rng,
            shadow,
            jakes,
            occurrences: Vec::new(),
            clock_s: None,
        }
    }

    pub fn occurrences(&self) -> &[OccurrenceRecord] {
        &self.occurrences
    }

    fn push_occurrence(&mut self, state: ChannelState, start_s: f64, elevation_deg: u32) {
        let params = self.table.entry(elevation_deg).state(state);
        let triple = params.sample_triple(&mut self.rng);
        let los_phase = self.rng.random::<f64>() * TAU;
        let dwell = params.dwell.sample(&mut self.rng) * self.seconds_per_unit;
        self.occurrences.push(OccurrenceRecord {
            state,
            triple,
            start_s,
            end_s: start_s + dwell,
            los_phase,
        });
    }

    fn occurrence_at(&mut self, t_s: f64, elevation_deg: u32) -> u32 {
        if self.occurrences.is_empty() {
            let state = initial_state(self.table.entry(elevation_deg), &mut self.rng);
            self.push_occurrence(state, t_s, elevation_deg);
        }
        loop {
            let last = *self.occurrences.last().expect("non-empty");
            if t_s < last.end_s {
                return (self.occurrences.len() - 1) as u32;
            }
            self.push_occurrence(last.state.other(), last.end_s, elevation_deg);
        }
    }

    fn sample(&mut self, t_s: f64, elevation_deg: u32, doppler_hz: f64) -> FadingSample {
        let occurrence = self.occurrence_at(t_s, elevation_deg);
        let dt = self.clock_s.map_or(0.0, |c| t_s - c);
        debug_assert!(dt >= 0.0, "channel generator must advance forward in time");
        self.shadow.advance(dt, &mut self.rng);
        self.jakes.advance(dt, doppler_hz);
        self.clock_s = Some(t_s);
        let rec = self.occurrences[occurrence as usize];
        FadingSample {
            los_db: rec.triple.ma_db + rec.triple.sigma_a_db * self.shadow.value(),
            los_phase: rec.los_phase,
            scatter: self.jakes.value() * (2.0 * rec.triple.sigma2()).sqrt(),
            occurrence,
        }
    }

    /// Fills `out` with per-symbol coefficients for symbols starting at `t0_s`.
    /// When `labels` is given, the active occurrence index of every symbol is
    /// appended to it.
    pub fn fill_block(
        &mut self,
        t0_s: f64,
        elevation_deg: u32,
        doppler_hz: f64,
        cfg: &FadingConfig,
        out: &mut [Complex64],
        mut labels: Option<&mut Vec<u32>>,
    ) {
        let f = cfg.fading_interval_symbols.max(1);
        let n = out.len();
        let segments = n.div_ceil(f);
        let mut prev = self.sample(t0_s, elevation_deg, doppler_hz);
        for k in 0..segments {
            let t_next = t0_s + ((k + 1) * f) as f64 * cfg.symbol_time_s;
            let next = self.sample(t_next, elevation_deg, doppler_hz);
            let mut amp = 10f64.powf(prev.los_db / 20.0);
            let ratio = 10f64.powf((next.los_db - prev.los_db) / (20.0 * f as f64));
            let rot = Complex64::from_polar(1.0, prev.los_phase);
            let end = ((k + 1) * f).min(n);
            for h in &mut out[k * f..end] {
                *h = rot * amp + prev.scatter;
                amp *= ratio;
            }
            if let Some(l) = labels.as_deref_mut() {
                l.extend(std::iter::repeat_n(prev.occurrence, end - k * f));
            }
            prev = next;
        }
    }
}

/// Per-symbol channel coefficients of one link plus state annotations.
#[derive(Debug, Clone)]
pub struct ChannelTrace {
    pub h: Vec<Complex64>,
    pub symbol_time_s: f64,
    pub occurrences: Vec<OccurrenceRecord>,
    occurrence_of_symbol: Vec<u32>,
}

impl ChannelTrace {
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn state_at(&self, n: usize) -> ChannelState {
        self.occurrences[self.occurrence_of_symbol[n] as usize].state
    }

    pub fn triple_at(&self, n: usize) -> LooTriple {
        self.occurrences[self.occurrence_of_symbol[n] as usize].triple
    }

    pub fn occurrence_index(&self, n: usize) -> usize {
        self.occurrence_of_symbol[n] as usize
    }

    pub fn states(&self) -> Vec<ChannelState> {
        (0..self.len()).map(|n| self.state_at(n)).collect()
    }

    /// Symbol ranges of consecutive code blocks of `block_symbols` symbols.
    pub fn blocks(&self, block_symbols: usize) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        (0..self.len())
            .step_by(block_symbols.max(1))
            .map(move |s| s..(s + block_symbols).min(self.len()))
    }
}

/// Generates a continuous trace of `num_symbols` coefficients at a fixed
/// quantized elevation.
pub fn generate_trace(
    table: &ChannelParamTable,
    elevation_deg: u32,
    num_symbols: usize,
    cfg: &FadingConfig,
    seconds_per_unit: f64,
    doppler_hz: f64,
    rng: SimRng,
) -> ChannelTrace {
    let mut generator = ChannelGenerator::new(table, seconds_per_unit, cfg.sinusoids, rng);
    let mut h = vec![Complex64::new(0.0, 0.0); num_symbols];
    let mut labels = Vec::with_capacity(num_symbols);
    generator.fill_block(0.0, elevation_deg, doppler_hz, cfg, &mut h, Some(&mut labels));
    ChannelTrace {
        h,
        symbol_time_s: cfg.symbol_time_s,
        occurrences: generator.occurrences,
        occurrence_of_symbol: labels,
    }
}
