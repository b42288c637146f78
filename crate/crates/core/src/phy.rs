//! Modulation, realized mutual information and the threshold decoder model.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, SQRT_2};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit-energy constellation indexed by bit label (MSB first).
#[derive(Debug, Clone, PartialEq)]
pub struct Modulation {
    points: Vec<Complex64>,
    bits_per_symbol: u32,
    gray_qpsk: bool,
}

impl Modulation {
    /// Gray-mapped QPSK: bit pair `b0 b1` maps to `((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2)`.
    pub fn qpsk() -> Self {
        let points = (0..4u32)
            .map(|label| {
                let b0 = (label >> 1) & 1;
                let b1 = label & 1;
                Complex64::new(1.0 - 2.0 * b0 as f64, 1.0 - 2.0 * b1 as f64) * FRAC_1_SQRT_2
            })
            .collect();
        Self {
            points,
            bits_per_symbol: 2,
            gray_qpsk: true,
        }
    }

    /// Gray-labelled S-PSK.
    pub fn psk(size: usize) -> Result<Self> {
        if size < 2 || !size.is_power_of_two() {
            return Err(Error::invalid("modulation size", "must be a power of two >= 2"));
        }
        let mut points = vec![Complex64::new(0.0, 0.0); size];
        for k in 0..size {
            let gray = k ^ (k >> 1);
            let angle = std::f64::consts::TAU * k as f64 / size as f64 + std::f64::consts::PI / size as f64;
            points[gray] = Complex64::from_polar(1.0, angle);
        }
        Self::from_points(points)
    }

    /// Arbitrary alphabet; must have power-of-two size and unit mean energy.
    pub fn from_points(points: Vec<Complex64>) -> Result<Self> {
        let s = points.len();
        if s < 2 || !s.is_power_of_two() {
            return Err(Error::invalid("modulation size", "must be a power of two >= 2"));
        }
        let energy = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / s as f64;
        if (energy - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("modulation points", format!("mean energy {energy} != 1")));
        }
        let qpsk = Self::qpsk();
        let gray_qpsk = s == 4 && points.iter().zip(&qpsk.points).all(|(a, b)| (a - b).norm() < 1e-12);
        Ok(Self {
            points,
            bits_per_symbol: s.trailing_zeros(),
            gray_qpsk,
        })
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Maps bits (each 0 or 1) to symbols.
    pub fn modulate(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        let m = self.bits_per_symbol as usize;
        if bits.len() % m != 0 {
            return Err(Error::LengthMismatch {
                expected: bits.len().div_ceil(m) * m,
                actual: bits.len(),
            });
        }
        Ok(bits
            .chunks_exact(m)
            .map(|chunk| {
                let label = chunk.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
                self.points[label]
            })
            .collect())
    }

    /// Uniformly random symbols.
    pub fn random_symbols<R: Rng + ?Sized>(&self, n: usize, rng: &mut R, out: &mut Vec<Complex64>) {
        out.clear();
        out.extend((0..n).map(|_| self.points[rng.random_range(0..self.points.len())]));
    }

    /// `1 - H(X | y, g) / log2 S` with the posterior `p(s) ~ exp(-|y - g s|^2)`.
    pub fn realized_mi_per_bit(&self, y: Complex64, g: Complex64) -> f64 {
        if self.gray_qpsk {
            qpsk_mi_per_bit(y, g)
        } else {
            self.generic_mi_per_bit(y, g)
        }
    }

    /// Alphabet-agnostic evaluation with log-sum-exp normalization.
    pub fn generic_mi_per_bit(&self, y: Complex64, g: Complex64) -> f64 {
        let metrics: Vec<f64> = self.points.iter().map(|&s| -(y - g * s).norm_sqr()).collect();
        let max = metrics.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let log_z = max + metrics.iter().map(|m| (m - max).exp()).sum::<f64>().ln();
        let h_nats: f64 = metrics
            .iter()
            .map(|m| {
                let lp = m - log_z;
                -lp.exp() * lp
            })
            .sum();
        (1.0 - h_nats / LN_2 / self.bits_per_symbol as f64).clamp(0.0, 1.0)
    }

    /// Mean realized MI per bit over a block.
    pub fn block_mi(&self, y: &[Complex64], g: &[Complex64]) -> Result<f64> {
        if y.len() != g.len() {
            return Err(Error::LengthMismatch {
                expected: y.len(),
                actual: g.len(),
            });
        }
        if y.is_empty() {
            return Ok(0.0);
        }
        let sum: f64 = y.iter().zip(g).map(|(&y, &g)| self.realized_mi_per_bit(y, g)).sum();
        Ok(sum / y.len() as f64)
    }
}

impl Default for Modulation {
    fn default() -> Self {
        Self::qpsk()
    }
}

/// Binary entropy in bits of a posterior with log-likelihood ratio `llr`.
#[inline]
pub fn binary_entropy_from_llr(llr: f64) -> f64 {
    let a = llr.abs();
    let e = (-a).exp();
    (e.ln_1p() + a * e / (1.0 + e)) / LN_2
}

/// Gray QPSK posterior factorizes into two binary ones with LLR
/// `2 sqrt(2) Re/Im(y conj(g))`.
#[inline]
pub fn qpsk_mi_per_bit(y: Complex64, g: Complex64) -> f64 {
    let z = y * g.conj();
    let hi = binary_entropy_from_llr(2.0 * SQRT_2 * z.re);
    let hq = binary_entropy_from_llr(2.0 * SQRT_2 * z.im);
    1.0 - 0.5 * (hi + hq)
}

/// Adds unit-variance circular complex Gaussian noise.
pub fn awgn<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeModel {
    pub rate: f64,
    pub block_symbols: usize,
    pub threshold_bits: f64,
}

impl Default for CodeModel {
    fn default() -> Self {
        Self {
            rate: 0.5,
            block_symbols: 1000,
            threshold_bits: 0.5714,
        }
    }
}

impl CodeModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.rate > 0.0 && self.rate < 1.0) {
            return Err(Error::invalid("code.rate", "must lie in (0, 1)"));
        }
        if self.block_symbols == 0 {
            return Err(Error::invalid("code.block_symbols", "must be >= 1"));
        }
        if !(self.threshold_bits > 0.0 && self.threshold_bits <= 1.0) {
            return Err(Error::invalid("code.threshold_bits", "must lie in (0, 1]"));
        }
        Ok(())
    }

    /// A block is lost when its mean MI does not exceed the threshold.
    pub fn block_error(&self, block_mi_bits: f64) -> bool {
        block_mi_bits <= self.threshold_bits
    }
}
