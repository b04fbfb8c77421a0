//! Scenario files: devices plus a timed list of host commands.
//!
//! ```toml
//! seed = 7
//! horizon_s = 5.0
//! delivery = "link"          # "link", "ideal" or "chip-flip"
//! flip_prob = 0.05           # only for chip-flip
//! link_preset = "paper"
//!
//! [[device]]
//! name = "gateway"
//! position_m = [0.0, 0.0]
//!
//! [[device]]
//! name = "sensor"
//! position_m = [40.0, 0.0]
//!
//! [[command]]
//! at_s = 0.0
//! device = "sensor"
//! op = "SetupWuR"
//! ldr_bps = 1024
//! hdr_bps = 32768
//! address = 0x0042
//!
//! [[command]]
//! at_s = 1.0
//! device = "gateway"
//! op = "SendWuC"
//! address = 0x0042
//! payload = [1, 2, 3]
//! ```

use std::io::{self, Write};

use serde::Deserialize;
use thiserror::Error;

use super::device::{DeviceSetup, HostCommand};
use super::event::DeviceId;
use super::sim::{DeliveryMode, SimOptions, Simulation};
use super::SimError;
use crate::airtime_energy::PowerModel;
use crate::config::{ConfigError, ModelData};
use crate::link_model::LinkParams;
use crate::mls_codec::{RadioConfig, DEFAULT_THRESHOLD};
use crate::time::SimTime;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario: {0}")]
    Parse(String),
    #[error("scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("simulation: {0}")]
    Sim(#[from] SimError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DeliveryKind {
    #[default]
    Link,
    Ideal,
    ChipFlip,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DeviceSpec {
    pub name: String,
    #[serde(default)]
    pub position_m: (f64, f64),
    #[serde(default = "default_voltage")]
    pub voltage_v: f64,
    pub tx_power_dbm: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CommandSpec {
    pub at_s: f64,
    pub device: String,
    pub op: String,
    pub ldr_bps: Option<u32>,
    pub hdr_bps: Option<u32>,
    pub address: Option<u16>,
    #[serde(default)]
    pub payload: Vec<u8>,
    pub voltage_v: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub seed: u64,
    pub horizon_s: f64,
    #[serde(default)]
    pub delivery: DeliveryKind,
    #[serde(default)]
    pub flip_prob: f64,
    #[serde(default = "default_true")]
    pub strict_rates: bool,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub trace_chips: bool,
    #[serde(default = "default_preset")]
    pub link_preset: String,
    #[serde(rename = "device")]
    pub devices: Vec<DeviceSpec>,
    #[serde(rename = "command", default)]
    pub commands: Vec<CommandSpec>,
}

fn default_voltage() -> f64 {
    3.0
}
fn default_true() -> bool {
    true
}
fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}
fn default_preset() -> String {
    "paper".into()
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))
    }

    pub fn options(&self) -> SimOptions {
        SimOptions {
            delivery: match self.delivery {
                DeliveryKind::Link => DeliveryMode::Link,
                DeliveryKind::Ideal => DeliveryMode::Ideal,
                DeliveryKind::ChipFlip => DeliveryMode::ChipFlip {
                    flip_prob: self.flip_prob,
                },
            },
            strict_rates: self.strict_rates,
            threshold: self.threshold,
            trace_chips: self.trace_chips,
        }
    }

    pub fn horizon(&self) -> Result<SimTime, ScenarioError> {
        if !(self.horizon_s.is_finite() && self.horizon_s > 0.0) {
            return Err(ScenarioError::Invalid("horizon_s must be positive".into()));
        }
        Ok(SimTime::from_secs_f64(self.horizon_s))
    }

    /// Builds the simulation with every command scheduled.
    pub fn build(&self, data: &ModelData, seed_override: Option<u64>) -> Result<Simulation, ScenarioError> {
        let power = PowerModel::from_data(data)?;
        let link = LinkParams::from_data(data, &self.link_preset)?;
        let seed = seed_override.unwrap_or(self.seed);
        let mut sim = Simulation::new(power, link, self.options(), seed);
        for d in &self.devices {
            if sim.find_device(&d.name).is_some() {
                return Err(ScenarioError::Invalid(format!("duplicate device `{}`", d.name)));
            }
            let mut setup = DeviceSetup::new(d.name.clone(), d.position_m, d.voltage_v);
            setup.tx_power_dbm = d.tx_power_dbm;
            sim.add_device(setup);
        }
        let mut commands: Vec<&CommandSpec> = self.commands.iter().collect();
        commands.sort_by(|a, b| a.at_s.total_cmp(&b.at_s));
        for c in commands {
            let (id, cmd) = self.command(&sim, c)?;
            if !(c.at_s.is_finite() && c.at_s >= 0.0) {
                return Err(ScenarioError::Invalid(format!("command at_s {} must be non-negative", c.at_s)));
            }
            sim.schedule_command(SimTime::from_secs_f64(c.at_s), id, cmd)?;
        }
        Ok(sim)
    }

    fn command(&self, sim: &Simulation, c: &CommandSpec) -> Result<(DeviceId, HostCommand), ScenarioError> {
        let id = sim
            .find_device(&c.device)
            .ok_or_else(|| ScenarioError::Invalid(format!("command targets unknown device `{}`", c.device)))?;
        let need_address = || {
            c.address
                .ok_or_else(|| ScenarioError::Invalid(format!("{} at {} s needs `address`", c.op, c.at_s)))
        };
        let cmd = match c.op.as_str() {
            "WhoAmI" => HostCommand::WhoAmI,
            "IRQReason" => HostCommand::IrqReason,
            "SetupWuR" => {
                let ldr = c.ldr_bps.unwrap_or(1024);
                let hdr = c.hdr_bps.unwrap_or(32768);
                HostCommand::SetupWuR(RadioConfig::new(ldr, hdr, need_address()?).map_err(SimError::from)?)
            }
            "SendWuC" => HostCommand::SendWuC {
                address: need_address()?,
                payload: c.payload.clone(),
                voltage_v: c.voltage_v.unwrap_or(sim.device(id).setup.voltage_v),
            },
            other => {
                return Err(ScenarioError::Invalid(format!(
                    "unknown op `{other}` (expected WhoAmI, SetupWuR, SendWuC or IRQReason)"
                )))
            }
        };
        Ok((id, cmd))
    }

    /// Builds and runs the scenario to its horizon.
    pub fn run(&self, data: &ModelData, seed_override: Option<u64>) -> Result<Simulation, ScenarioError> {
        let mut sim = self.build(data, seed_override)?;
        sim.run_until(self.horizon()?)?;
        Ok(sim)
    }
}

/// Writes the executed events as `time_s,device,event,detail`.
pub fn write_trace_csv(sim: &Simulation, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "time_s,device,event,detail")?;
    for e in sim.trace() {
        writeln!(
            out,
            "{},{},{},{}",
            e.time.as_secs_f64(),
            csv_field(sim.device(e.device).name()),
            e.event,
            csv_field(&e.detail)
        )?;
    }
    Ok(())
}

/// Writes every device's ledger over `[0, horizon]` as
/// `device,start_s,end_s,state,power_w,energy_j`.
pub fn write_ledger_csv(sim: &Simulation, horizon: SimTime, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "device,start_s,end_s,state,power_w,energy_j")?;
    for d in sim.devices() {
        for e in d.ledger.entries(horizon) {
            writeln!(
                out,
                "{},{},{},{},{:e},{:e}",
                csv_field(d.name()),
                e.start.as_secs_f64(),
                e.end.as_secs_f64(),
                e.state,
                e.power_w,
                e.energy_j
            )?;
        }
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
