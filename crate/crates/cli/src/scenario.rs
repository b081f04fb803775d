//! Scenario files: TOML with one table per section.
//!
//! ```toml
//! [radio]
//! bandwidth_hz = 1e6
//! noise_figure_db = 9.0
//! p_tot_w = 0.1
//! carrier_hz = 2.4e9
//!
//! [geometry]
//! d_sd_m = 100.0
//! d_sr_m = 50.0
//! d_rd_m = 60.0
//!
//! [pathloss]
//! kind = "log_distance"   # or "free_space" (uses radio.carrier_hz)
//! exponent = 3.0
//! ref_loss_db = 40.0
//! ref_distance_m = 1.0
//!
//! [fading.sr]             # sd, sr, rd, li, s_ris, ris_d; default rayleigh, mean power 1
//! kind = "rician"
//! k_factor = 3.0
//!
//! [relay]
//! n_r = 4
//!
//! [ris]
//! n_elements = 16
//! r_a = 1.0
//! mode = "anomalous"      # selects the RIS path-loss law for scheme "ris"
//!
//! [sim]
//! schemes = ["hd_df", "fd_af", "ris"]
//! trials = 10000
//! seed = 1
//!
//! [sweep]                 # optional
//! variable = "p_tot"
//! values = [0.01, 0.1, 1.0]
//!
//! [output]
//! prefix = "results/run"
//! ```
//!
//! Unknown keys are errors. Every optional key is filled in on load, so a
//! loaded file serializes back to a complete, explicit configuration.

use std::fs;
use std::path::{Path, PathBuf};

use linklab_core::montecarlo::FadingProfile;
use linklab_core::{
    AllocationMode, FadingKind, FadingSpec, LinkGeometry, PathLossModel, RadioConfig, RisMode, Scenario, Scheme,
    SweepSpec, SweepVariable,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },

    #[error("{key}: {source}")]
    Invalid {
        key: String,
        #[source]
        source: linklab_core::Error,
    },
}

impl ScenarioError {
    fn invalid(key: impl Into<String>, source: linklab_core::Error) -> Self {
        Self::Invalid {
            key: key.into(),
            source,
        }
    }
}

type Result<T> = std::result::Result<T, ScenarioError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub radio: RadioSection,
    pub geometry: GeometrySection,
    pub pathloss: PathLossSection,
    #[serde(default)]
    pub fading: FadingSection,
    #[serde(default)]
    pub relay: RelaySection,
    #[serde(default)]
    pub ris: RisSection,
    pub sim: SimSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioSection {
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    pub p_tot_w: f64,
    pub carrier_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub d_sd_m: f64,
    pub d_sr_m: f64,
    pub d_rd_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossSection {
    /// `"free_space"` or `"log_distance"`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ref_loss_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ref_distance_m: Option<f64>,
}

impl PathLossSection {
    fn model(&self, carrier_hz: f64) -> Result<PathLossModel> {
        let err = |e| ScenarioError::invalid("pathloss", e);
        let bad = |name: &'static str, reason: &str| {
            err(linklab_core::Error::InvalidParameter {
                name,
                reason: reason.to_owned(),
            })
        };
        match self.kind.as_str() {
            "free_space" => {
                if self.exponent.is_some() || self.ref_loss_db.is_some() || self.ref_distance_m.is_some() {
                    return Err(bad(
                        "kind",
                        "free_space takes no exponent, ref_loss_db or ref_distance_m (carrier comes from radio.carrier_hz)",
                    ));
                }
                PathLossModel::free_space(carrier_hz).map_err(err)
            }
            "log_distance" => {
                let exponent = self
                    .exponent
                    .ok_or_else(|| bad("exponent", "required for log_distance"))?;
                let ref_loss = self
                    .ref_loss_db
                    .ok_or_else(|| bad("ref_loss_db", "required for log_distance"))?;
                PathLossModel::log_distance(exponent, ref_loss, self.ref_distance_m.unwrap_or(1.0)).map_err(err)
            }
            other => Err(bad(
                "kind",
                &format!("expected \"free_space\" or \"log_distance\", got {other:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingEntry {
    pub kind: String,
    #[serde(default)]
    pub k_factor: f64,
    #[serde(default = "one")]
    pub mean_power: f64,
    #[serde(default)]
    pub los_phase_rad: f64,
}

impl Default for FadingEntry {
    fn default() -> Self {
        Self {
            kind: FadingKind::Rayleigh.as_str().to_owned(),
            k_factor: 0.0,
            mean_power: 1.0,
            los_phase_rad: 0.0,
        }
    }
}

impl FadingEntry {
    fn to_spec(&self, key: &str) -> Result<FadingSpec> {
        let err = |e| ScenarioError::invalid(key, e);
        let kind: FadingKind = self.kind.parse().map_err(err)?;
        match kind {
            FadingKind::Rayleigh if self.k_factor != 0.0 => Err(linklab_core::Error::InvalidParameter {
                name: "k_factor",
                reason: "not used by rayleigh fading; remove it or use kind = \"rician\"".into(),
            }),
            FadingKind::Rayleigh => FadingSpec::rayleigh(self.mean_power),
            FadingKind::Rician => FadingSpec::rician(self.k_factor, self.mean_power, self.los_phase_rad),
            FadingKind::Los => FadingSpec::los(self.mean_power, self.los_phase_rad),
        }
        .map_err(err)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingSection {
    #[serde(default)]
    pub sd: FadingEntry,
    #[serde(default)]
    pub sr: FadingEntry,
    #[serde(default)]
    pub rd: FadingEntry,
    #[serde(default)]
    pub li: FadingEntry,
    #[serde(default)]
    pub s_ris: FadingEntry,
    #[serde(default)]
    pub ris_d: FadingEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelaySection {
    #[serde(default = "default_n_r")]
    pub n_r: u32,
}

impl Default for RelaySection {
    fn default() -> Self {
        Self { n_r: default_n_r() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RisSection {
    #[serde(default = "default_n_ris")]
    pub n_elements: u32,
    #[serde(default = "one")]
    pub r_a: f64,
    #[serde(default = "default_ris_mode")]
    pub mode: String,
}

impl Default for RisSection {
    fn default() -> Self {
        Self {
            n_elements: default_n_ris(),
            r_a: 1.0,
            mode: default_ris_mode(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub schemes: Vec<String>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Integer, or a decimal string for seeds above `i64::MAX`.
    #[serde(default, with = "seed_repr")]
    pub seed: u64,
    #[serde(default = "default_allocation")]
    pub allocation: String,
    #[serde(default = "default_outage")]
    pub outage_threshold_bps_hz: f64,
    #[serde(default = "default_oracle_grid")]
    pub oracle_grid: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_prefix")]
    pub prefix: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            prefix: default_prefix(),
        }
    }
}

mod seed_repr {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(seed: &u64, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(*seed) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&seed.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(v) => u64::try_from(v).map_err(|_| de::Error::custom("seed must be >= 0")),
            Repr::Str(s) => s.parse().map_err(|_| de::Error::custom(format!("invalid seed {s:?}"))),
        }
    }
}

fn one() -> f64 {
    1.0
}
fn default_n_r() -> u32 {
    2
}
fn default_n_ris() -> u32 {
    16
}
fn default_ris_mode() -> String {
    RisMode::Anomalous.as_str().to_owned()
}
fn default_trials() -> u64 {
    1000
}
fn default_allocation() -> String {
    AllocationMode::Closed.as_str().to_owned()
}
fn default_outage() -> f64 {
    Scenario::DEFAULT_OUTAGE_THRESHOLD
}
fn default_oracle_grid() -> u64 {
    Scenario::DEFAULT_ORACLE_GRID as u64
}
fn default_prefix() -> String {
    "linklab".to_owned()
}

/// A validated scenario ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub scenario: Scenario,
    pub sweep: Option<SweepSpec>,
    pub trials: u64,
    pub seed: u64,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text).map_err(|source| ScenarioError::Parse {
            path: path.to_owned(),
            source,
        })
    }

    pub fn parse(text: &str) -> std::result::Result<Self, toml::de::Error> {
        let mut file: Self = toml::from_str(text)?;
        if file.pathloss.kind == "log_distance" && file.pathloss.ref_distance_m.is_none() {
            file.pathloss.ref_distance_m = Some(1.0);
        }
        Ok(file)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario files always serialize")
    }

    /// Scheme list with `"ris"` expanded to the configured RIS mode and
    /// duplicates removed.
    pub fn expanded_schemes(&self) -> Result<Vec<Scheme>> {
        let mode: RisMode = self
            .ris
            .mode
            .parse()
            .map_err(|e| ScenarioError::invalid("ris.mode", e))?;
        let mut out = Vec::new();
        for name in &self.sim.schemes {
            let scheme = if name == "ris" {
                Scheme::from(mode)
            } else {
                name.parse().map_err(|e| ScenarioError::invalid("sim.schemes", e))?
            };
            if !out.contains(&scheme) {
                out.push(scheme);
            }
        }
        Ok(out)
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let radio = RadioConfig {
            bandwidth_hz: self.radio.bandwidth_hz,
            noise_figure_db: self.radio.noise_figure_db,
            p_tot_w: self.radio.p_tot_w,
            carrier_hz: self.radio.carrier_hz,
        };
        radio.validate().map_err(|e| ScenarioError::invalid("radio", e))?;

        let geometry = LinkGeometry::new(self.geometry.d_sd_m, self.geometry.d_sr_m, self.geometry.d_rd_m)
            .map_err(|e| ScenarioError::invalid("geometry", e))?;

        let pathloss = self.pathloss.model(radio.carrier_hz)?;

        let f = &self.fading;
        let fading = FadingProfile {
            sd: f.sd.to_spec("fading.sd")?,
            sr: f.sr.to_spec("fading.sr")?,
            rd: f.rd.to_spec("fading.rd")?,
            li: f.li.to_spec("fading.li")?,
            s_ris: f.s_ris.to_spec("fading.s_ris")?,
            ris_d: f.ris_d.to_spec("fading.ris_d")?,
        };

        let schemes = self.expanded_schemes()?;
        let allocation_mode: AllocationMode = self
            .sim
            .allocation
            .parse()
            .map_err(|e| ScenarioError::invalid("sim.allocation", e))?;

        let scenario = Scenario {
            radio,
            geometry,
            pathloss,
            fading,
            n_r: self.relay.n_r as usize,
            n_ris: self.ris.n_elements as usize,
            r_a: self.ris.r_a,
            schemes,
            allocation_mode,
            oracle_grid: self.sim.oracle_grid as usize,
            outage_threshold: self.sim.outage_threshold_bps_hz,
        };
        scenario
            .validate()
            .map_err(|e| ScenarioError::invalid(key_for(&e), e))?;

        if self.sim.trials == 0 {
            return Err(ScenarioError::invalid(
                "sim.trials",
                linklab_core::Error::InvalidParameter {
                    name: "trials",
                    reason: "must be >= 1".into(),
                },
            ));
        }

        let sweep = match &self.sweep {
            Some(s) => {
                let variable: SweepVariable = s
                    .variable
                    .parse()
                    .map_err(|e| ScenarioError::invalid("sweep.variable", e))?;
                let spec = SweepSpec::new(variable, s.values.clone())
                    .map_err(|e| ScenarioError::invalid("sweep.values", e))?;
                for &v in &spec.values {
                    scenario
                        .with(variable, v)
                        .map_err(|e| ScenarioError::invalid(format!("sweep.values ({variable} = {v})"), e))?;
                }
                Some(spec)
            }
            None => None,
        };

        Ok(Resolved {
            scenario,
            sweep,
            trials: self.sim.trials,
            seed: self.sim.seed,
        })
    }
}

/// File key for a scenario-level validation error.
fn key_for(err: &linklab_core::Error) -> &'static str {
    match err {
        linklab_core::Error::OddRelayAntennas(_) => "relay.n_r",
        linklab_core::Error::InvalidParameter { name, .. } => match *name {
            "n_r" => "relay.n_r",
            "n_ris" => "ris.n_elements",
            "ris.r_a" => "ris.r_a",
            "schemes" => "sim.schemes",
            "oracle_grid" => "sim.oracle_grid",
            "outage_threshold" => "sim.outage_threshold_bps_hz",
            _ => "scenario",
        },
        _ => "scenario",
    }
}
