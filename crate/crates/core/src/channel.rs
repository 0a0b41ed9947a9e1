//! Large-scale GBS-UAV channel gains under the urban-micro LoS/NLoS models.
//!
//! Every gain returned here is an *amplitude* gain in dB, i.e. half of the
//! corresponding power gain in dB, so that `P * h^2` in the SINR expressions
//! becomes `P_dBm + 2 * h_dB`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Vec3;
use crate::scene::{Gbs, Scene};

/// Lowest value the array pattern may take, dB.
pub const ANTENNA_FLOOR_DB: f64 = -30.0;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("GBS and UAV positions coincide")]
    CoincidentPositions,
    #[error("UAV altitude {0} m must be positive")]
    NonPositiveAltitude(f64),
    #[error("UAV altitude {altitude} m is outside the model envelope (max {max} m)")]
    AltitudeOutOfRange { altitude: f64, max: f64 },
    #[error("invalid channel parameters: {0}")]
    InvalidParams(String),
}

/// Thermal noise over `bandwidth_hz` with the given density and noise figure.
pub fn noise_power_dbm(psd_dbm_per_hz: f64, bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    psd_dbm_per_hz + 10.0 * bandwidth_hz.log10() + noise_figure_db
}

/// Total transmit power split evenly over `n_rb` resource blocks.
pub fn per_rb_power_dbm(total_dbm: f64, n_rb: u32) -> f64 {
    total_dbm - 10.0 * f64::from(n_rb).log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub carrier_freq_ghz: f64,
    /// Transmit power per resource block, dBm.
    pub tx_power_dbm: f64,
    /// Receiver noise power over one resource block, dBm.
    pub noise_power_dbm: f64,
}

impl ChannelParams {
    /// 2 GHz carrier, 41 dBm spread over 50 RBs of 180 kHz, -169 dBm/Hz noise
    /// density with a 9 dB noise figure.
    pub fn reference() -> Self {
        Self {
            carrier_freq_ghz: 2.0,
            tx_power_dbm: per_rb_power_dbm(41.0, 50),
            noise_power_dbm: noise_power_dbm(-169.0, 180e3, 9.0),
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(self.carrier_freq_ghz > 0.0 && self.carrier_freq_ghz.is_finite()) {
            return Err(ChannelError::InvalidParams(format!(
                "carrier frequency {} GHz",
                self.carrier_freq_ghz
            )));
        }
        let (n, p) = (self.noise_power_dbm, self.tx_power_dbm);
        if n.is_nan() || p.is_nan() || n >= p {
            return Err(ChannelError::InvalidParams(format!(
                "noise power {} dBm must be below transmit power {} dBm",
                self.noise_power_dbm, self.tx_power_dbm
            )));
        }
        Ok(())
    }

    /// Amplitude gain at which the mean received power equals the noise
    /// power: `(sigma^2 - P) / 2` in dB.
    pub fn noise_floor_gain_db(&self) -> f64 {
        (self.noise_power_dbm - self.tx_power_dbm) / 2.0
    }

    pub fn tx_power_mw(&self) -> f64 {
        db_to_linear(self.tx_power_dbm)
    }

    pub fn noise_power_mw(&self) -> f64 {
        db_to_linear(self.noise_power_dbm)
    }
}

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AntennaModel {
    Isotropic,
    /// Vertical uniform linear array with an electrical tilt. Negative tilt
    /// points below the horizon.
    Ula {
        n_elements: usize,
        tilt_deg: f64,
        spacing_wavelengths: f64,
    },
}

impl AntennaModel {
    /// Eight half-wavelength elements tilted 10 degrees down.
    pub fn downtilted_ula() -> Self {
        AntennaModel::Ula {
            n_elements: 8,
            tilt_deg: -10.0,
            spacing_wavelengths: 0.5,
        }
    }

    pub fn max_gain_db(&self) -> f64 {
        match *self {
            AntennaModel::Isotropic => 0.0,
            AntennaModel::Ula { n_elements, .. } => 10.0 * (n_elements as f64).log10(),
        }
    }

    /// Power gain in dB toward `uav` from an antenna at `gbs`.
    pub fn gain_db(&self, gbs: Vec3, uav: Vec3) -> Result<f64, ChannelError> {
        if gbs == uav {
            return Err(ChannelError::CoincidentPositions);
        }
        match *self {
            AntennaModel::Isotropic => Ok(0.0),
            AntennaModel::Ula {
                n_elements,
                tilt_deg,
                spacing_wavelengths,
            } => {
                if n_elements == 0 {
                    return Err(ChannelError::InvalidParams("ULA needs elements".into()));
                }
                let elevation = (uav.z - gbs.z).atan2(uav.horizontal_distance(gbs));
                let psi = 2.0
                    * std::f64::consts::PI
                    * spacing_wavelengths
                    * (elevation.sin() - tilt_deg.to_radians().sin());
                let (mut re, mut im) = (0.0, 0.0);
                for k in 0..n_elements {
                    let phase = psi * k as f64;
                    re += phase.cos();
                    im += phase.sin();
                }
                let power = (re * re + im * im) / n_elements as f64;
                let db = if power > 0.0 {
                    linear_to_db(power)
                } else {
                    f64::NEG_INFINITY
                };
                Ok(db.clamp(ANTENNA_FLOOR_DB, self.max_gain_db()))
            }
        }
    }
}

/// Forces one propagation model regardless of geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainOverride {
    #[default]
    Auto,
    ForceLos,
    ForceNlos,
}

/// Free-space power gain in dB at distance `d_m` meters.
pub fn free_space_power_db(d_m: f64, freq_ghz: f64) -> f64 {
    -(32.45 + 20.0 * (d_m / 1000.0).log10() + 20.0 * (freq_ghz * 1000.0).log10())
}

/// Altitude where the NLoS distance slope `43.2 - 7.6 log10 H` vanishes.
pub fn nlos_altitude_limit() -> f64 {
    10f64.powf(43.2 / 7.6)
}

fn check_link(d: f64, altitude: f64) -> Result<(), ChannelError> {
    if d <= 0.0 {
        return Err(ChannelError::CoincidentPositions);
    }
    if altitude <= 0.0 {
        return Err(ChannelError::NonPositiveAltitude(altitude));
    }
    let max = nlos_altitude_limit();
    if altitude >= max {
        return Err(ChannelError::AltitudeOutOfRange { altitude, max });
    }
    Ok(())
}

/// LoS power gain in dB (no antenna term): the smaller of free space and the
/// urban-micro LoS law.
pub fn los_power_db(freq_ghz: f64, d: f64, altitude: f64) -> f64 {
    let umi = -30.9 - (22.25 - 0.5 * altitude.log10()) * d.log10() - 20.0 * freq_ghz.log10();
    free_space_power_db(d, freq_ghz).min(umi)
}

/// NLoS power gain in dB (no antenna term), never above the LoS value.
pub fn nlos_power_db(freq_ghz: f64, d: f64, altitude: f64) -> f64 {
    let umi = -32.4 - (43.2 - 7.6 * altitude.log10()) * d.log10() - 20.0 * freq_ghz.log10();
    los_power_db(freq_ghz, d, altitude).min(umi)
}

pub fn los_gain_db(
    params: &ChannelParams,
    antenna: &AntennaModel,
    gbs: &Gbs,
    uav: Vec3,
) -> Result<f64, ChannelError> {
    let d = uav.distance(gbs.position);
    check_link(d, uav.z)?;
    let g = antenna.gain_db(gbs.position, uav)?;
    Ok(g / 2.0 + los_power_db(params.carrier_freq_ghz, d, uav.z) / 2.0)
}

pub fn nlos_gain_db(
    params: &ChannelParams,
    antenna: &AntennaModel,
    gbs: &Gbs,
    uav: Vec3,
) -> Result<f64, ChannelError> {
    let d = uav.distance(gbs.position);
    check_link(d, uav.z)?;
    let g = antenna.gain_db(gbs.position, uav)?;
    Ok(g / 2.0 + nlos_power_db(params.carrier_freq_ghz, d, uav.z) / 2.0)
}

/// Amplitude gain in dB, picking the LoS or NLoS law from the scene geometry
/// unless overridden.
pub fn large_scale_gain_db(
    scene: &Scene,
    params: &ChannelParams,
    antenna: &AntennaModel,
    gbs: &Gbs,
    uav: Vec3,
    mode: GainOverride,
) -> Result<f64, ChannelError> {
    if uav.z > scene.region.h_max {
        return Err(ChannelError::AltitudeOutOfRange {
            altitude: uav.z,
            max: scene.region.h_max,
        });
    }
    let los = match mode {
        GainOverride::Auto => scene.is_los(gbs, uav),
        GainOverride::ForceLos => true,
        GainOverride::ForceNlos => false,
    };
    if los {
        los_gain_db(params, antenna, gbs, uav)
    } else {
        nlos_gain_db(params, antenna, gbs, uav)
    }
}
