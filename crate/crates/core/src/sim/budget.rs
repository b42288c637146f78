use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{db_to_linear, SPEED_OF_LIGHT};

/// G2S link budget. The reference SNR is the LoS SNR at slant range `h0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkBudget {
    pub gu_antenna_gain_dbi: f64,
    pub satellite_antenna_gain_dbi: f64,
    pub noise_psd_dbm_hz: f64,
    pub bandwidth_hz: f64,
    pub carrier_freq_hz: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self {
            gu_antenna_gain_dbi: 0.0,
            satellite_antenna_gain_dbi: 50.0,
            noise_psd_dbm_hz: -174.0,
            bandwidth_hz: 5e6,
            carrier_freq_hz: 2.2e9,
        }
    }
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return Err(Error::invalid("g2s.bandwidth_hz", "must be positive"));
        }
        if !(self.carrier_freq_hz > 0.0 && self.carrier_freq_hz.is_finite()) {
            return Err(Error::invalid("g2s.carrier_freq_hz", "must be positive"));
        }
        for (f, v) in [
            ("g2s.gu_antenna_gain_dbi", self.gu_antenna_gain_dbi),
            ("g2s.satellite_antenna_gain_dbi", self.satellite_antenna_gain_dbi),
            ("g2s.noise_psd_dbm_hz", self.noise_psd_dbm_hz),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(f, "must be finite"));
            }
        }
        Ok(())
    }

    pub fn symbol_time_s(&self) -> f64 {
        1.0 / self.bandwidth_hz
    }

    /// Free-space gain at distance `h0`.
    pub fn reference_path_gain(&self, orbit_height_km: f64) -> f64 {
        let x = SPEED_OF_LIGHT / (4.0 * PI * orbit_height_km * 1e3 * self.carrier_freq_hz);
        x * x
    }

    fn noise_power_w(&self) -> f64 {
        db_to_linear(self.noise_psd_dbm_hz - 30.0) * self.bandwidth_hz
    }

    fn gains(&self) -> f64 {
        db_to_linear(self.gu_antenna_gain_dbi + self.satellite_antenna_gain_dbi)
    }

    /// Linear reference SNR produced by transmit power `p_gu_w`.
    pub fn reference_snr(&self, p_gu_w: f64, orbit_height_km: f64) -> f64 {
        p_gu_w * self.gains() * self.reference_path_gain(orbit_height_km) / self.noise_power_w()
    }

    /// Transmit power (W) needed for a linear reference SNR.
    pub fn power_for_reference_snr(&self, rho_ref: f64, orbit_height_km: f64) -> f64 {
        rho_ref * self.noise_power_w() / (self.gains() * self.reference_path_gain(orbit_height_km))
    }

    /// LoS SNR at slant range `slant_km`: `rho_ref (h0 / d)^2`.
    pub fn los_snr(rho_ref: f64, orbit_height_km: f64, slant_km: f64) -> f64 {
        let r = orbit_height_km / slant_km;
        rho_ref * r * r
    }

    /// Doppler spread seen through a range rate.
    pub fn doppler_hz(&self, range_rate_km_s: f64) -> f64 {
        range_rate_km_s.abs() * 1e3 * self.carrier_freq_hz / SPEED_OF_LIGHT
    }
}
