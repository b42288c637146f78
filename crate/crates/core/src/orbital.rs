//! Circular-orbit geometry seen from a fixed ground user.
//!
//! Two adjacent satellites of an `M`-satellite orbit are tracked: the serving
//! satellite S starts at orbital phase 0 and the target T at `2 pi / M`.
//! Angles are radians throughout; degrees appear only in the quantized
//! elevations used to index channel tables.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const EARTH_RADIUS_KM: f64 = 6371.0;
pub const GRAVITATIONAL_CONST_KM3_S2: f64 = 3.986e5;
pub const EARTH_ANGULAR_SPEED_RAD_S: f64 = 7.292_115_9e-5;

/// Elevations (degrees) for which channel parameter tables exist.
pub const TABLE_ELEVATIONS_DEG: [u32; 4] = [30, 45, 60, 70];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Satellite {
    Serving,
    Target,
}

impl Satellite {
    pub fn index(self) -> usize {
        match self {
            Satellite::Serving => 0,
            Satellite::Target => 1,
        }
    }

    pub fn other(self) -> Satellite {
        match self {
            Satellite::Serving => Satellite::Target,
            Satellite::Target => Satellite::Serving,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstellationGeometry {
    pub orbit_height_km: f64,
    pub inclination_rad: f64,
    pub num_satellites: u32,
    pub earth_radius_km: f64,
    pub gravitational_const: f64,
    pub earth_angular_speed_rad_s: f64,
}

impl ConstellationGeometry {
    pub fn new(orbit_height_km: f64, inclination_rad: f64, num_satellites: u32) -> Result<Self> {
        let geom = Self {
            orbit_height_km,
            inclination_rad,
            num_satellites,
            earth_radius_km: EARTH_RADIUS_KM,
            gravitational_const: GRAVITATIONAL_CONST_KM3_S2,
            earth_angular_speed_rad_s: EARTH_ANGULAR_SPEED_RAD_S,
        };
        geom.validate()?;
        Ok(geom)
    }

    /// 550 km, 45 degree orbit with `num_satellites` satellites.
    pub fn reference(num_satellites: u32) -> Self {
        Self::new(550.0, 45f64.to_radians(), num_satellites).expect("reference geometry is valid")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.orbit_height_km > 0.0) {
            return Err(Error::invalid("orbit_height_km", "must be positive"));
        }
        if !(0.0..=PI).contains(&self.inclination_rad) {
            return Err(Error::invalid("inclination", "must lie in [0, 180] degrees"));
        }
        if self.num_satellites == 0 {
            return Err(Error::invalid("num_satellites", "must be positive"));
        }
        if !(self.earth_radius_km > 0.0) || !(self.gravitational_const > 0.0) {
            return Err(Error::invalid("earth constants", "must be positive"));
        }
        Ok(())
    }

    pub fn orbit_radius_km(&self) -> f64 {
        self.earth_radius_km + self.orbit_height_km
    }

    pub fn angular_spacing_rad(&self) -> f64 {
        TAU / f64::from(self.num_satellites)
    }

    /// Keplerian angular speed of a circular orbit, rad/s.
    pub fn angular_speed(&self) -> f64 {
        (self.gravitational_const / self.orbit_radius_km().powi(3)).sqrt()
    }

    pub fn period_s(&self) -> f64 {
        TAU / self.angular_speed()
    }

    pub fn initial_phase_rad(&self, sat: Satellite) -> f64 {
        match sat {
            Satellite::Serving => 0.0,
            Satellite::Target => self.angular_spacing_rad(),
        }
    }

    pub fn angular_position_rad(&self, sat: Satellite, t_s: f64) -> f64 {
        self.angular_speed() * t_s + self.initial_phase_rad(sat)
    }

    /// Latitude and longitude of the sub-satellite point, longitude in (-pi, pi].
    pub fn ssp_coordinates(&self, sat: Satellite, t_s: f64) -> (f64, f64) {
        ssp_from_phase(
            self.inclination_rad,
            self.angular_position_rad(sat, t_s),
            self.earth_angular_speed_rad_s * t_s,
        )
    }

    /// Elevation and slant range of `sat` seen from `gu` at time `t_s`.
    pub fn look_angle(&self, gu: &GroundUser, sat: Satellite, t_s: f64) -> LookAngle {
        let (lat, lon) = self.ssp_coordinates(sat, t_s);
        let cos_gamma = lat.sin() * gu.latitude_rad.sin()
            + lat.cos() * gu.latitude_rad.cos() * (gu.longitude_rad - lon).cos();
        let gamma = cos_gamma.clamp(-1.0, 1.0).acos();
        let elevation = elevation_from_central_angle(gamma, self.earth_radius_km, self.orbit_height_km);
        LookAngle {
            central_angle_rad: gamma,
            elevation_rad: elevation,
            slant_km: self.slant_range_km(elevation),
        }
    }

    /// Slant range for a given elevation (law of cosines).
    pub fn slant_range_km(&self, elevation_rad: f64) -> f64 {
        let re = self.earth_radius_km;
        let h = self.orbit_height_km;
        let s = elevation_rad.sin();
        (re * re * s * s + h * h + 2.0 * h * re).sqrt() - re * s
    }

    /// Chord length between adjacent satellites.
    pub fn isl_distance_km(&self) -> f64 {
        2.0 * self.orbit_radius_km() * (0.5 * self.angular_spacing_rad()).sin()
    }
}

/// Sub-satellite point for orbital phase `alpha` after the earth has turned by
/// `earth_rotation` radians.
pub fn ssp_from_phase(inclination: f64, alpha: f64, earth_rotation: f64) -> (f64, f64) {
    let lat = (inclination.sin() * alpha.sin()).asin();
    let inertial_lon = (inclination.cos() * alpha.sin()).atan2(alpha.cos());
    (lat, wrap_longitude(inertial_lon - earth_rotation))
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_longitude(lon: f64) -> f64 {
    let wrapped = (lon + PI).rem_euclid(TAU) - PI;
    if wrapped <= -PI {
        wrapped + TAU
    } else {
        wrapped
    }
}

/// Elevation from the earth-central angle between user and sub-satellite point.
/// `gamma = 0` yields exactly pi/2.
pub fn elevation_from_central_angle(gamma: f64, earth_radius_km: f64, orbit_height_km: f64) -> f64 {
    if gamma == 0.0 {
        return FRAC_PI_2;
    }
    let ratio = earth_radius_km / (earth_radius_km + orbit_height_km);
    (gamma.cos() - ratio).atan2(gamma.sin())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundUser {
    pub latitude_rad: f64,
    pub longitude_rad: f64,
    pub min_elevation_rad: f64,
}

impl GroundUser {
    pub fn new(latitude_rad: f64, longitude_rad: f64, min_elevation_rad: f64) -> Result<Self> {
        if !(latitude_rad.abs() <= FRAC_PI_2) {
            return Err(Error::invalid("latitude", "must lie in [-90, 90] degrees"));
        }
        if !(-PI..=PI).contains(&longitude_rad) {
            return Err(Error::invalid("longitude", "must lie in [-180, 180] degrees"));
        }
        if !(min_elevation_rad > 0.0 && min_elevation_rad < FRAC_PI_2) {
            return Err(Error::invalid("min_elevation", "must lie in (0, 90) degrees"));
        }
        Ok(Self {
            latitude_rad,
            longitude_rad,
            min_elevation_rad,
        })
    }

    /// 45 N, 7 E with a 25 degree elevation mask.
    pub fn reference() -> Self {
        Self::new(45f64.to_radians(), 7f64.to_radians(), 25f64.to_radians())
            .expect("reference user is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LookAngle {
    pub central_angle_rad: f64,
    pub elevation_rad: f64,
    pub slant_km: f64,
}

impl LookAngle {
    pub fn elevation_deg(&self) -> f64 {
        self.elevation_rad.to_degrees()
    }
}

/// Nearest tabulated elevation; exact midpoints round toward the higher value.
/// Anything below 30 degrees maps to 30 and anything above 70 to 70.
pub fn quantize_elevation(elevation_deg: f64) -> u32 {
    let table = TABLE_ELEVATIONS_DEG;
    if elevation_deg <= f64::from(table[0]) {
        return table[0];
    }
    for pair in table.windows(2) {
        let (lo, hi) = (f64::from(pair[0]), f64::from(pair[1]));
        if elevation_deg <= hi {
            return if hi - elevation_deg <= elevation_deg - lo {
                pair[1]
            } else {
                pair[0]
            };
        }
    }
    table[table.len() - 1]
}

/// Which physical satellite relays and which combines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Roles {
    pub relay: Satellite,
    pub destination: Satellite,
}

impl Roles {
    /// The higher satellite is the destination; on a tie the serving
    /// satellite keeps that role.
    pub fn from_elevations(serving_rad: f64, target_rad: f64) -> Self {
        if serving_rad >= target_rad {
            Roles {
                relay: Satellite::Target,
                destination: Satellite::Serving,
            }
        } else {
            Roles {
                relay: Satellite::Serving,
                destination: Satellite::Target,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchInterval {
    pub start_s: f64,
    pub end_s: f64,
    pub step_s: f64,
}

impl SearchInterval {
    pub fn new(start_s: f64, end_s: f64, step_s: f64) -> Result<Self> {
        if !(start_s >= 0.0 && end_s > start_s) {
            return Err(Error::invalid("search interval", "need 0 <= start < end"));
        }
        if !(step_s > 0.0) {
            return Err(Error::invalid("search step", "must be positive"));
        }
        Ok(Self {
            start_s,
            end_s,
            step_s,
        })
    }
}

/// Per-sample geometry of the joint-visibility window.
#[derive(Debug, Clone)]
pub struct PassGeometry {
    pub window_start_s: f64,
    pub window_end_s: f64,
    pub times_s: Vec<f64>,
    /// Indexed by [`Satellite::index`].
    pub looks: [Vec<LookAngle>; 2],
    /// Range rate (km/s), indexed by [`Satellite::index`].
    pub range_rate_km_s: [Vec<f64>; 2],
    pub roles: Vec<Roles>,
}

impl PassGeometry {
    pub fn len(&self) -> usize {
        self.times_s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times_s.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.window_end_s - self.window_start_s
    }

    pub fn look(&self, sat: Satellite, i: usize) -> LookAngle {
        self.looks[sat.index()][i]
    }

    pub fn quantized_elevation(&self, sat: Satellite, i: usize) -> u32 {
        quantize_elevation(self.look(sat, i).elevation_deg())
    }

    /// Quantized elevation series of one satellite.
    pub fn quantized_series(&self, sat: Satellite) -> Vec<u32> {
        (0..self.len()).map(|i| self.quantized_elevation(sat, i)).collect()
    }

    /// Sample index closest to the instant where both elevations are equal.
    pub fn crossover_index(&self) -> usize {
        (0..self.len())
            .min_by(|&a, &b| {
                let da = (self.looks[0][a].elevation_rad - self.looks[1][a].elevation_rad).abs();
                let db = (self.looks[0][b].elevation_rad - self.looks[1][b].elevation_rad).abs();
                da.total_cmp(&db)
            })
            .unwrap_or(0)
    }
}

fn joint_margin(geom: &ConstellationGeometry, gu: &GroundUser, t: f64) -> f64 {
    let s = geom.look_angle(gu, Satellite::Serving, t).elevation_rad;
    let tg = geom.look_angle(gu, Satellite::Target, t).elevation_rad;
    s.min(tg) - gu.min_elevation_rad
}

fn refine_edge(geom: &ConstellationGeometry, gu: &GroundUser, mut outside: f64, mut inside: f64) -> f64 {
    for _ in 0..60 {
        let mid = 0.5 * (outside + inside);
        if joint_margin(geom, gu, mid) >= 0.0 {
            inside = mid;
        } else {
            outside = mid;
        }
        if (inside - outside).abs() < 1e-7 {
            break;
        }
    }
    inside
}

/// Finds the joint-visibility window inside `search` and samples it at
/// `num_samples` uniformly spaced instants (interval midpoints).
///
/// When several windows exist the one reaching the highest elevation wins.
pub fn find_pass_window(
    geom: &ConstellationGeometry,
    gu: &GroundUser,
    search: SearchInterval,
    num_samples: usize,
) -> Result<PassGeometry> {
    if num_samples == 0 {
        return Err(Error::invalid("blocks_per_pass", "must be positive"));
    }
    let steps = ((search.end_s - search.start_s) / search.step_s).ceil() as usize;
    let mut windows: Vec<(f64, f64, f64)> = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    let mut prev_t = search.start_s;
    for k in 0..=steps {
        let t = (search.start_s + k as f64 * search.step_s).min(search.end_s);
        let margin = joint_margin(geom, gu, t);
        let peak = geom
            .look_angle(gu, Satellite::Serving, t)
            .elevation_rad
            .max(geom.look_angle(gu, Satellite::Target, t).elevation_rad);
        match (&mut open, margin >= 0.0) {
            (None, true) => {
                let start = if k == 0 { t } else { refine_edge(geom, gu, prev_t, t) };
                open = Some((start, peak));
            }
            (Some((_, best)), true) => *best = best.max(peak),
            (Some((start, best)), false) => {
                windows.push((*start, refine_edge(geom, gu, t, prev_t), *best));
                open = None;
            }
            (None, false) => {}
        }
        prev_t = t;
    }
    if let Some((start, best)) = open {
        windows.push((start, search.end_s, best));
    }
    let (t0, t1, _) = windows
        .into_iter()
        .filter(|w| w.1 > w.0)
        .max_by(|a, b| a.2.total_cmp(&b.2))
        .ok_or(Error::NoJointVisibility {
            start_s: search.start_s,
            end_s: search.end_s,
        })?;

    let dt = (t1 - t0) / num_samples as f64;
    let times_s: Vec<f64> = (0..num_samples).map(|i| t0 + (i as f64 + 0.5) * dt).collect();
    let sats = [Satellite::Serving, Satellite::Target];
    let looks = sats.map(|sat| times_s.iter().map(|&t| geom.look_angle(gu, sat, t)).collect::<Vec<_>>());
    let range_rate_km_s = sats.map(|sat| {
        times_s
            .iter()
            .map(|&t| {
                let h = 0.05;
                (geom.look_angle(gu, sat, t + h).slant_km - geom.look_angle(gu, sat, t - h).slant_km)
                    / (2.0 * h)
            })
            .collect::<Vec<_>>()
    });
    let roles = (0..num_samples)
        .map(|i| Roles::from_elevations(looks[0][i].elevation_rad, looks[1][i].elevation_rad))
        .collect();
    Ok(PassGeometry {
        window_start_s: t0,
        window_end_s: t1,
        times_s,
        looks,
        range_rate_km_s,
        roles,
    })
}
