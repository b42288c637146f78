use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Stationary unit-variance Gauss-Markov process (first-order low-pass of
/// white noise). Sampling it at spacing `dt` is exactly the first-order IIR
/// recursion with pole `exp(-dt / tau)`, for any spacing.
#[derive(Debug, Clone)]
pub struct ShadowingProcess {
    correlation_s: f64,
    value: f64,
}

impl ShadowingProcess {
    pub fn new<R: Rng + ?Sized>(correlation_s: f64, rng: &mut R) -> Self {
        Self {
            correlation_s,
            value: rng.sample(StandardNormal),
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Correlation coefficient between samples `dt` apart.
    pub fn correlation(&self, dt: f64) -> f64 {
        if self.correlation_s > 0.0 {
            (-dt / self.correlation_s).exp()
        } else if dt == 0.0 {
            1.0
        } else {
            0.0
        }
    }

    pub fn advance<R: Rng + ?Sized>(&mut self, dt: f64, rng: &mut R) -> f64 {
        if dt > 0.0 {
            let rho = self.correlation(dt);
            let innovation: f64 = rng.sample(StandardNormal);
            self.value = rho * self.value + (1.0 - rho * rho).sqrt() * innovation;
        }
        self.value
    }
}

/// Unit-power complex Gaussian-like process with the Jakes (Clarke) Doppler
/// spectrum, built as a sum of sinusoids.
///
/// Arrival angle `n` is uniform inside the `n`-th of `N` equal sectors, so the
/// ensemble autocorrelation is exactly `J0(2 pi f_D tau)`. The Doppler phase
/// is accumulated, which lets the Doppler frequency change between samples.
#[derive(Debug, Clone)]
pub struct JakesProcess {
    cos_angles: Vec<f64>,
    phases: Vec<f64>,
    doppler_phase: f64,
    scale: f64,
}

impl JakesProcess {
    pub fn new<R: Rng + ?Sized>(sinusoids: usize, rng: &mut R) -> Self {
        let n = sinusoids.max(1);
        let mut cos_angles = Vec::with_capacity(n);
        let mut phases = Vec::with_capacity(n);
        for k in 0..n {
            let alpha = (k as f64 + rng.random::<f64>()) * TAU / n as f64;
            cos_angles.push(alpha.cos());
            phases.push(rng.random::<f64>() * TAU);
        }
        Self {
            cos_angles,
            phases,
            doppler_phase: 0.0,
            scale: 1.0 / (n as f64).sqrt(),
        }
    }

    pub fn advance(&mut self, dt: f64, doppler_hz: f64) {
        self.doppler_phase += TAU * doppler_hz * dt;
    }

    pub fn value(&self) -> Complex64 {
        let sum: Complex64 = self
            .cos_angles
            .iter()
            .zip(&self.phases)
            .map(|(c, p)| Complex64::from_polar(1.0, self.doppler_phase * c + p))
            .sum();
        sum * self.scale
    }
}
