//! Noise power, distance-based path loss and the composite RIS path-loss laws.
//!
//! Every gain in this module is a linear power gain. Decibels only appear in
//! constructor arguments and conversion helpers.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Thermal noise density at room temperature (dBm/Hz).
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    linear_to_db(watts) + 30.0
}

/// Transmitter/receiver radio parameters shared by every link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig {
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    pub p_tot_w: f64,
    pub carrier_hz: f64,
}

impl RadioConfig {
    pub fn new(bandwidth_hz: f64, noise_figure_db: f64, p_tot_w: f64, carrier_hz: f64) -> Result<Self> {
        let cfg = Self {
            bandwidth_hz,
            noise_figure_db,
            p_tot_w,
            carrier_hz,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        positive("bandwidth_hz", self.bandwidth_hz)?;
        positive("p_tot_w", self.p_tot_w)?;
        positive("carrier_hz", self.carrier_hz)?;
        if !(self.noise_figure_db.is_finite() && self.noise_figure_db >= 0.0) {
            return Err(invalid(
                "noise_figure_db",
                format!("must be >= 0, got {}", self.noise_figure_db),
            ));
        }
        Ok(())
    }

    /// Receiver noise floor `-174 + 10 log10(BW) + NF` in dBm.
    pub fn noise_power_dbm(&self) -> Result<f64> {
        positive("bandwidth_hz", self.bandwidth_hz)?;
        Ok(THERMAL_NOISE_DBM_PER_HZ + 10.0 * self.bandwidth_hz.log10() + self.noise_figure_db)
    }
}

/// Noise power in watts for the configured bandwidth and noise figure.
pub fn noise_power(config: &RadioConfig) -> Result<f64> {
    Ok(dbm_to_watts(config.noise_power_dbm()?))
}

/// Source-destination, source-relay and relay-destination distances (m).
///
/// The relay distances double as source-RIS and RIS-destination distances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub d_sd: f64,
    pub d_sr: f64,
    pub d_rd: f64,
}

impl LinkGeometry {
    pub fn new(d_sd: f64, d_sr: f64, d_rd: f64) -> Result<Self> {
        let geom = Self { d_sd, d_sr, d_rd };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<()> {
        positive("d_sd_m", self.d_sd)?;
        positive("d_sr_m", self.d_sr)?;
        positive("d_rd_m", self.d_rd)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathLossModel {
    /// Friis free-space loss `(c / (4 pi f d))^2`.
    FreeSpace { carrier_hz: f64 },
    /// `ref_loss_db + 10 * exponent * log10(d / ref_distance_m)` dB of loss.
    LogDistance {
        exponent: f64,
        ref_loss_db: f64,
        ref_distance_m: f64,
    },
}

impl PathLossModel {
    pub fn free_space(carrier_hz: f64) -> Result<Self> {
        let model = Self::FreeSpace { carrier_hz };
        model.validate()?;
        Ok(model)
    }

    pub fn log_distance(exponent: f64, ref_loss_db: f64, ref_distance_m: f64) -> Result<Self> {
        let model = Self::LogDistance {
            exponent,
            ref_loss_db,
            ref_distance_m,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::FreeSpace { carrier_hz } => positive("carrier_hz", carrier_hz),
            Self::LogDistance {
                exponent,
                ref_loss_db,
                ref_distance_m,
            } => {
                positive("exponent", exponent)?;
                positive("ref_distance_m", ref_distance_m)?;
                if !ref_loss_db.is_finite() {
                    return Err(invalid("ref_loss_db", "must be finite"));
                }
                Ok(())
            }
        }
    }

    /// Linear power gain at distance `d` metres.
    pub fn gain(&self, d: f64) -> Result<f64> {
        positive("distance", d)?;
        Ok(match *self {
            Self::FreeSpace { carrier_hz } => {
                let ratio = SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * carrier_hz * d);
                ratio * ratio
            }
            Self::LogDistance {
                exponent,
                ref_loss_db,
                ref_distance_m,
            } => db_to_linear(-(ref_loss_db + 10.0 * exponent * (d / ref_distance_m).log10())),
        })
    }
}

pub fn path_loss(model: &PathLossModel, d: f64) -> Result<f64> {
    model.gain(d)
}

/// Which composite path-loss law governs the reflected RIS path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RisMode {
    /// Large elements behave as anomalous mirrors: sum-distance law.
    Anomalous,
    /// Wavelength-scale elements scatter: product-distance law.
    Diffuse,
}

impl RisMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Anomalous => "anomalous",
            Self::Diffuse => "diffuse",
        }
    }
}

impl fmt::Display for RisMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RisMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "anomalous" => Ok(Self::Anomalous),
            "diffuse" => Ok(Self::Diffuse),
            other => Err(invalid(
                "ris.mode",
                format!("expected \"anomalous\" or \"diffuse\", got {other:?}"),
            )),
        }
    }
}

pub fn ris_path_loss(model: &PathLossModel, geometry: &LinkGeometry, mode: RisMode) -> Result<f64> {
    geometry.validate()?;
    match mode {
        RisMode::Anomalous => model.gain(geometry.d_sr + geometry.d_rd),
        RisMode::Diffuse => Ok(model.gain(geometry.d_sr)? * model.gain(geometry.d_rd)?),
    }
}

/// Per-scenario constants: noise power and the linear gain of every link.
///
/// Computed once and shared by all trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub n0: f64,
    pub p_tot: f64,
    pub pl_sd: f64,
    pub pl_sr: f64,
    pub pl_rd: f64,
    pub pl_ris_anomalous: f64,
    pub pl_ris_diffuse: f64,
}

impl LinkBudget {
    pub fn new(radio: &RadioConfig, geometry: &LinkGeometry, model: &PathLossModel) -> Result<Self> {
        radio.validate()?;
        geometry.validate()?;
        model.validate()?;
        Ok(Self {
            n0: noise_power(radio)?,
            p_tot: radio.p_tot_w,
            pl_sd: model.gain(geometry.d_sd)?,
            pl_sr: model.gain(geometry.d_sr)?,
            pl_rd: model.gain(geometry.d_rd)?,
            pl_ris_anomalous: ris_path_loss(model, geometry, RisMode::Anomalous)?,
            pl_ris_diffuse: ris_path_loss(model, geometry, RisMode::Diffuse)?,
        })
    }

    /// A budget with every path gain, the noise power and `p_tot` set to one.
    pub fn unit() -> Self {
        Self {
            n0: 1.0,
            p_tot: 1.0,
            pl_sd: 1.0,
            pl_sr: 1.0,
            pl_rd: 1.0,
            pl_ris_anomalous: 1.0,
            pl_ris_diffuse: 1.0,
        }
    }

    pub fn ris_gain(&self, mode: RisMode) -> f64 {
        match mode {
            RisMode::Anomalous => self.pl_ris_anomalous,
            RisMode::Diffuse => self.pl_ris_diffuse,
        }
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {value}")))
    }
}
