//! The structured-text data dialect shared by power tables, link presets,
//! batteries and duty profiles.
//!
//! Files are TOML. The bundled defaults live in `data/wakemod.toml`; any
//! other file with the same schema can replace them.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

/// Bundled model data.
pub const DEFAULT_DATA: &str = include_str!("../data/wakemod.toml");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownName {
        kind: &'static str,
        name: String,
        available: String,
    },
}

impl ConfigError {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IdleRow {
    pub rate_bps: u32,
    pub power_uw: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TxRow {
    pub voltage_v: f64,
    pub tx_power_dbm: f64,
    pub consumption_mw: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AuxRowRaw {
    pub op: String,
    pub energy_uj: Option<f64>,
    pub energy_mj: Option<f64>,
    pub duration_ms: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModuleRaw {
    pub mcu_shutdown_nw: f64,
    pub tx_shutdown_nw: f64,
    pub mcu_wake_us: f64,
    pub auto_shutdown_ms: f64,
    pub who_am_i: u8,
    pub peak_envelope_power_dbm: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DistanceAnchor {
    pub distance_m: f64,
    pub pdr: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LinkPresetRaw {
    pub carrier_freq_mhz: f64,
    pub tx_antenna_gain_dbi: f64,
    pub rx_antenna_gain_dbi: f64,
    pub sensitivity_dbm: f64,
    #[serde(default = "default_exponent")]
    pub path_loss_exponent: f64,
    #[serde(default = "default_reference")]
    pub reference_distance_m: f64,
    pub max_range_cutoff_m: Option<f64>,
    pub pdr_ceiling: Option<f64>,
    pub calibration_tx_power_dbm: f64,
    #[serde(default)]
    pub anchors: Vec<DistanceAnchor>,
    pub pdr_midpoint_db: Option<f64>,
    pub pdr_slope_db: Option<f64>,
}

fn default_exponent() -> f64 {
    2.0
}

fn default_reference() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BatteryRaw {
    pub capacity_mah: f64,
    pub nominal_voltage_v: f64,
    #[serde(default)]
    pub self_discharge_per_year: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ReceptionRef {
    pub ldr_bps: u32,
    pub hdr_bps: u32,
    #[serde(default)]
    pub payload_bits: usize,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProfileEventRaw {
    pub label: String,
    pub energy_uj: Option<f64>,
    pub energy_mj: Option<f64>,
    pub reception: Option<ReceptionRef>,
    #[serde(default)]
    pub rate_hz: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProfileRaw {
    pub idle_power_uw: f64,
    #[serde(default)]
    pub events: Vec<ProfileEventRaw>,
}

/// A whole data file as written.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelData {
    pub idle_listen: Vec<IdleRow>,
    pub tx: Vec<TxRow>,
    pub aux: Vec<AuxRowRaw>,
    pub module: ModuleRaw,
    #[serde(default)]
    pub link: BTreeMap<String, LinkPresetRaw>,
    #[serde(default)]
    pub battery: BTreeMap<String, BatteryRaw>,
    #[serde(default)]
    pub profile: BTreeMap<String, ProfileRaw>,
}

impl ModelData {
    pub fn bundled() -> Self {
        Self::parse(DEFAULT_DATA, "bundled data").expect("bundled data parses")
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            origin: origin.to_string(),
            message: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Bundled data unless `path` is given.
    pub fn load_or_bundled(path: Option<&Path>) -> Result<Self, ConfigError> {
        match path {
            Some(p) => Self::load(p),
            None => Ok(Self::bundled()),
        }
    }

    pub fn link_preset(&self, name: &str) -> Result<&LinkPresetRaw, ConfigError> {
        lookup(&self.link, "link preset", name)
    }

    pub fn battery(&self, name: &str) -> Result<&BatteryRaw, ConfigError> {
        lookup(&self.battery, "battery", name)
    }

    pub fn profile(&self, name: &str) -> Result<&ProfileRaw, ConfigError> {
        lookup(&self.profile, "profile", name)
    }
}

fn lookup<'a, T>(
    map: &'a BTreeMap<String, T>,
    kind: &'static str,
    name: &str,
) -> Result<&'a T, ConfigError> {
    map.get(name).ok_or_else(|| ConfigError::UnknownName {
        kind,
        name: name.to_string(),
        available: map.keys().cloned().collect::<Vec<_>>().join(", "),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_data_parses() {
        let d = ModelData::bundled();
        assert_eq!(d.idle_listen.len(), 6);
        assert_eq!(d.tx.len(), 6);
        assert_eq!(d.aux.len(), 6);
        assert!(d.link.contains_key("paper"));
        assert!(d.link.contains_key("datasheet"));
        assert_eq!(d.module.who_am_i, 0x57);
    }

    #[test]
    fn malformed_number_names_the_field() {
        let text = DEFAULT_DATA.replacen("power_uw = 6.88", "power_uw = 6.8.8", 1);
        let err = ModelData::parse(&text, "tampered.toml").unwrap_err().to_string();
        assert!(err.contains("tampered.toml"), "{err}");
        assert!(err.contains("power_uw"), "{err}");
    }

    #[test]
    fn unknown_preset_lists_alternatives() {
        let d = ModelData::bundled();
        let err = d.link_preset("moon").unwrap_err().to_string();
        assert!(err.contains("paper"), "{err}");
    }
}
