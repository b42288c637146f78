//! Inter-satellite link: free-space AWGN with Gaussian pointing error.

use std::f64::consts::{LN_2, PI};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{db_to_linear, BOLTZMANN, SPEED_OF_LIGHT};

/// Half-power beamwidth in degrees from Kraus' approximation.
pub fn kraus_beamwidth_deg(gain_db: f64) -> f64 {
    202.5 * 10f64.powf(-gain_db / 20.0)
}

/// Free-space path gain `(c / (4 pi d f))^2`.
pub fn free_space_gain(distance_km: f64, freq_hz: f64) -> f64 {
    let x = SPEED_OF_LIGHT / (4.0 * PI * distance_km * 1e3 * freq_hz);
    x * x
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IslConfig {
    pub carrier_freq_hz: f64,
    pub tx_power_w: f64,
    pub max_antenna_gain: f64,
    pub half_power_beamwidth_rad: f64,
    pub noise_temperature_k: f64,
    pub bandwidth_hz: f64,
    pub misalignment_variance_rad2: f64,
}

impl IslConfig {
    /// Builds a band with the beamwidth from Kraus' formula and a bandwidth of
    /// 2 % of the carrier.
    pub fn with_gain_db(carrier_freq_hz: f64, gain_db: f64, tx_power_dbw: f64, misalignment_variance_rad2: f64) -> Result<Self> {
        let cfg = Self {
            carrier_freq_hz,
            tx_power_w: db_to_linear(tx_power_dbw),
            max_antenna_gain: db_to_linear(gain_db),
            half_power_beamwidth_rad: kraus_beamwidth_deg(gain_db).to_radians(),
            noise_temperature_k: 7000.0,
            bandwidth_hz: 0.02 * carrier_freq_hz,
            misalignment_variance_rad2,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Optical band: 193 THz, 90 dBi.
    pub fn optical(tx_power_dbw: f64, misalignment_variance_rad2: f64) -> Self {
        Self::with_gain_db(193e12, 90.0, tx_power_dbw, misalignment_variance_rad2).expect("valid preset")
    }

    /// THz band: 2 THz, 60 dBi.
    pub fn terahertz(tx_power_dbw: f64, misalignment_variance_rad2: f64) -> Self {
        Self::with_gain_db(2e12, 60.0, tx_power_dbw, misalignment_variance_rad2).expect("valid preset")
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("carrier_freq_hz", self.carrier_freq_hz),
            ("max_antenna_gain", self.max_antenna_gain),
            ("half_power_beamwidth_rad", self.half_power_beamwidth_rad),
            ("noise_temperature_k", self.noise_temperature_k),
            ("bandwidth_hz", self.bandwidth_hz),
        ];
        for (field, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(field, "must be positive and finite"));
            }
        }
        if !(self.tx_power_w >= 0.0 && self.tx_power_w.is_finite()) {
            return Err(Error::invalid("tx_power_w", "must be non-negative"));
        }
        if !(self.misalignment_variance_rad2 >= 0.0 && self.misalignment_variance_rad2.is_finite()) {
            return Err(Error::invalid("misalignment_variance_rad2", "must be non-negative"));
        }
        Ok(())
    }

    /// `nu = 4 ln 2 / theta^2`.
    pub fn beam_param(&self) -> f64 {
        4.0 * LN_2 / (self.half_power_beamwidth_rad * self.half_power_beamwidth_rad)
    }

    /// ISL SNR with perfect pointing at the given distance.
    pub fn aligned_snr(&self, distance_km: f64) -> f64 {
        self.tx_power_w * free_space_gain(distance_km, self.carrier_freq_hz) * self.max_antenna_gain * self.max_antenna_gain
            / (BOLTZMANN * self.noise_temperature_k * self.bandwidth_hz)
    }

    /// Realized linear ISL SNR for pointing error `xi_rad`.
    pub fn snr(&self, distance_km: f64, xi_rad: f64) -> f64 {
        self.aligned_snr(distance_km) * (-2.0 * self.beam_param() * xi_rad * xi_rad).exp()
    }

    /// One pointing-error draw, `N(0, sigma_p^2)`.
    pub fn sample_misalignment<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.misalignment_variance_rad2.sqrt() * z
    }
}

/// Realized ISL SNR; see [`IslConfig::snr`].
pub fn isl_snr(cfg: &IslConfig, distance_km: f64, xi_rad: f64) -> f64 {
    cfg.snr(distance_km, xi_rad)
}
