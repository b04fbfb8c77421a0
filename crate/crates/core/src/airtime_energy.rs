//! Measured power tables and the per-transaction cost model built on them.
//!
//! Idle listening and reception draw the same power at a given rate, so a
//! receiver spends `idle(ldr)` while the preamble is on air and `idle(hdr)`
//! while address and payload are decoded, then the fixed IRQ handling cost.
//! A sender pays the fixed `SendWuC` overhead (command processing and
//! transmitter ramp-up) followed by the transmitter consumption for the
//! airtime.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::config::{AuxRowRaw, ConfigError, IdleRow, ModelData, ModuleRaw, TxRow};
use crate::mls_codec::{airtime, DataRate, RadioConfig, MAX_PAYLOAD_BYTES};
use crate::time::SimTime;

/// Lowest chip rate the transmitter handles without premature auto-shutdown.
pub const MIN_SAFE_TX_RATE: u32 = 1024;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error("no idle-listen measurement for {0} bit/s")]
    UnsupportedRate(u32),
    #[error("supply voltage {voltage} V outside the characterized range {min}..={max} V")]
    VoltageOutOfRange { voltage: f64, min: f64, max: f64 },
    #[error("unknown auxiliary operation `{0}`")]
    UnknownOp(String),
    #[error("payload of {0} bits is not 0 or a whole number of bytes up to 48")]
    InvalidPayloadBits(usize),
    #[error("sending at {rate} bit/s risks premature transmitter auto-shutdown")]
    AutoShutdownRisk { rate: u32 },
}

/// Idle-listening power by data rate, in µW as measured.
#[derive(Debug, Clone, PartialEq)]
pub struct IdleListenTable {
    rows: Vec<IdleRow>,
}

impl IdleListenTable {
    pub fn new(rows: Vec<IdleRow>) -> Result<Self, ConfigError> {
        if rows.is_empty() {
            return Err(ConfigError::invalid("idle_listen", "table is empty"));
        }
        for (i, r) in rows.iter().enumerate() {
            DataRate::new(r.rate_bps)
                .map_err(|e| ConfigError::invalid(format!("idle_listen[{i}].rate_bps"), e.to_string()))?;
            if !(r.power_uw.is_finite() && r.power_uw > 0.0) {
                return Err(ConfigError::invalid(
                    format!("idle_listen[{i}].power_uw"),
                    "must be positive",
                ));
            }
        }
        for (i, w) in rows.windows(2).enumerate() {
            if w[1].rate_bps <= w[0].rate_bps {
                return Err(ConfigError::invalid(
                    format!("idle_listen[{}].rate_bps", i + 1),
                    "rates must be strictly increasing",
                ));
            }
            if w[1].power_uw <= w[0].power_uw {
                return Err(ConfigError::invalid(
                    format!("idle_listen[{}].power_uw", i + 1),
                    "power must be strictly increasing with rate",
                ));
            }
        }
        Ok(IdleListenTable { rows })
    }

    pub fn rows(&self) -> &[IdleRow] {
        &self.rows
    }

    /// Exact table value; rates without a measurement are unsupported.
    pub fn power_uw(&self, rate_bps: u32) -> Result<f64, EnergyError> {
        self.rows
            .iter()
            .find(|r| r.rate_bps == rate_bps)
            .map(|r| r.power_uw)
            .ok_or(EnergyError::UnsupportedRate(rate_bps))
    }
}

/// Transmitter output power and consumption at a supply voltage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TxPoint {
    pub tx_power_dbm: f64,
    pub consumption_mw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TxTable {
    rows: Vec<TxRow>,
}

impl TxTable {
    pub fn new(rows: Vec<TxRow>) -> Result<Self, ConfigError> {
        if rows.len() < 2 {
            return Err(ConfigError::invalid("tx", "need at least two rows"));
        }
        for (i, r) in rows.iter().enumerate() {
            if !(r.consumption_mw.is_finite() && r.consumption_mw > 0.0) {
                return Err(ConfigError::invalid(
                    format!("tx[{i}].consumption_mw"),
                    "must be positive",
                ));
            }
            if !r.tx_power_dbm.is_finite() {
                return Err(ConfigError::invalid(format!("tx[{i}].tx_power_dbm"), "must be finite"));
            }
        }
        for (i, w) in rows.windows(2).enumerate() {
            let field = |f: &str| format!("tx[{}].{f}", i + 1);
            if w[1].voltage_v <= w[0].voltage_v {
                return Err(ConfigError::invalid(field("voltage_v"), "must be strictly increasing"));
            }
            if w[1].tx_power_dbm <= w[0].tx_power_dbm {
                return Err(ConfigError::invalid(field("tx_power_dbm"), "must be strictly increasing"));
            }
            if w[1].consumption_mw <= w[0].consumption_mw {
                return Err(ConfigError::invalid(field("consumption_mw"), "must be strictly increasing"));
            }
        }
        Ok(TxTable { rows })
    }

    pub fn rows(&self) -> &[TxRow] {
        &self.rows
    }

    pub fn voltage_range(&self) -> (f64, f64) {
        (self.rows[0].voltage_v, self.rows[self.rows.len() - 1].voltage_v)
    }

    /// Exact rows at table voltages, per-column linear interpolation between
    /// them, no extrapolation.
    pub fn operating_point(&self, voltage: f64) -> Result<TxPoint, EnergyError> {
        let (min, max) = self.voltage_range();
        if !(voltage >= min && voltage <= max) {
            return Err(EnergyError::VoltageOutOfRange { voltage, min, max });
        }
        if let Some(r) = self.rows.iter().find(|r| r.voltage_v == voltage) {
            return Ok(TxPoint {
                tx_power_dbm: r.tx_power_dbm,
                consumption_mw: r.consumption_mw,
            });
        }
        let hi = self.rows.partition_point(|r| r.voltage_v < voltage);
        let (a, b) = (&self.rows[hi - 1], &self.rows[hi]);
        let f = (voltage - a.voltage_v) / (b.voltage_v - a.voltage_v);
        Ok(TxPoint {
            tx_power_dbm: a.tx_power_dbm + f * (b.tx_power_dbm - a.tx_power_dbm),
            consumption_mw: a.consumption_mw + f * (b.consumption_mw - a.consumption_mw),
        })
    }
}

/// Operations with a fixed measured cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AuxOp {
    WhoAmI,
    SetupWuR,
    /// Command processing and transmitter ramp-up before a wake-up call.
    SendWuC,
    IrqReason,
    IrqNoPayload,
    IrqPayload6,
}

impl AuxOp {
    pub const ALL: [AuxOp; 6] = [
        AuxOp::WhoAmI,
        AuxOp::SetupWuR,
        AuxOp::SendWuC,
        AuxOp::IrqReason,
        AuxOp::IrqNoPayload,
        AuxOp::IrqPayload6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AuxOp::WhoAmI => "WhoAmI",
            AuxOp::SetupWuR => "SetupWuR",
            AuxOp::SendWuC => "SendWuC",
            AuxOp::IrqReason => "IRQReason",
            AuxOp::IrqNoPayload => "IRQ_no_payload",
            AuxOp::IrqPayload6 => "IRQ_payload6",
        }
    }
}

impl FromStr for AuxOp {
    type Err = EnergyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AuxOp::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| EnergyError::UnknownOp(s.to_string()))
    }
}

impl fmt::Display for AuxOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyUnit {
    Microjoule,
    Millijoule,
}

impl EnergyUnit {
    pub fn symbol(self) -> &'static str {
        match self {
            EnergyUnit::Microjoule => "µJ",
            EnergyUnit::Millijoule => "mJ",
        }
    }

    fn to_joules(self, value: f64) -> f64 {
        match self {
            EnergyUnit::Microjoule => value * 1e-6,
            EnergyUnit::Millijoule => value * 1e-3,
        }
    }
}

/// One auxiliary-operation row, keeping the value in its loaded unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxCost {
    pub op: AuxOp,
    pub energy: f64,
    pub unit: EnergyUnit,
    pub duration_ms: f64,
}

impl AuxCost {
    pub fn energy_j(&self) -> f64 {
        self.unit.to_joules(self.energy)
    }

    pub fn duration(&self) -> SimTime {
        SimTime::from_millis_f64(self.duration_ms)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuxOpTable {
    rows: Vec<AuxCost>,
}

impl AuxOpTable {
    pub fn new(raw: &[AuxRowRaw]) -> Result<Self, ConfigError> {
        let mut rows: Vec<AuxCost> = Vec::with_capacity(raw.len());
        for (i, r) in raw.iter().enumerate() {
            let op: AuxOp = r
                .op
                .parse()
                .map_err(|e: EnergyError| ConfigError::invalid(format!("aux[{i}].op"), e.to_string()))?;
            if rows.iter().any(|c| c.op == op) {
                return Err(ConfigError::invalid(format!("aux[{i}].op"), format!("duplicate `{op}`")));
            }
            let (energy, unit) = match (r.energy_uj, r.energy_mj) {
                (Some(v), None) => (v, EnergyUnit::Microjoule),
                (None, Some(v)) => (v, EnergyUnit::Millijoule),
                _ => {
                    return Err(ConfigError::invalid(
                        format!("aux[{i}]"),
                        "exactly one of `energy_uj` or `energy_mj` is required",
                    ))
                }
            };
            if !(energy.is_finite() && energy >= 0.0) {
                return Err(ConfigError::invalid(format!("aux[{i}].energy"), "must be non-negative"));
            }
            if !(r.duration_ms.is_finite() && r.duration_ms > 0.0) {
                return Err(ConfigError::invalid(format!("aux[{i}].duration_ms"), "must be positive"));
            }
            rows.push(AuxCost {
                op,
                energy,
                unit,
                duration_ms: r.duration_ms,
            });
        }
        if let Some(missing) = AuxOp::ALL.iter().find(|op| !rows.iter().any(|r| r.op == **op)) {
            return Err(ConfigError::invalid("aux", format!("missing row `{missing}`")));
        }
        Ok(AuxOpTable { rows })
    }

    pub fn rows(&self) -> &[AuxCost] {
        &self.rows
    }

    pub fn get(&self, op: AuxOp) -> AuxCost {
        *self
            .rows
            .iter()
            .find(|r| r.op == op)
            .expect("table holds every operation")
    }
}

/// Module-level constants outside the three tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModuleConstants {
    pub mcu_shutdown_w: f64,
    pub tx_shutdown_w: f64,
    pub mcu_wake: SimTime,
    pub auto_shutdown: SimTime,
    pub who_am_i: u8,
    pub peak_envelope_power_dbm: Option<f64>,
}

impl ModuleConstants {
    fn new(raw: &ModuleRaw) -> Result<Self, ConfigError> {
        for (field, v) in [
            ("module.mcu_shutdown_nw", raw.mcu_shutdown_nw),
            ("module.tx_shutdown_nw", raw.tx_shutdown_nw),
            ("module.mcu_wake_us", raw.mcu_wake_us),
            ("module.auto_shutdown_ms", raw.auto_shutdown_ms),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ConfigError::invalid(field, "must be non-negative"));
            }
        }
        Ok(ModuleConstants {
            mcu_shutdown_w: raw.mcu_shutdown_nw * 1e-9,
            tx_shutdown_w: raw.tx_shutdown_nw * 1e-9,
            mcu_wake: SimTime::from_secs_f64(raw.mcu_wake_us * 1e-6),
            auto_shutdown: SimTime::from_millis_f64(raw.auto_shutdown_ms),
            who_am_i: raw.who_am_i,
            peak_envelope_power_dbm: raw.peak_envelope_power_dbm,
        })
    }

    /// Consumption of a module whose receiver has not been configured yet.
    pub fn unconfigured_power_w(&self) -> f64 {
        self.mcu_shutdown_w + self.tx_shutdown_w
    }
}

/// One row of a cost breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct Phase {
    pub name: &'static str,
    /// Set for phases charged at a constant power.
    pub power_w: Option<f64>,
    pub energy_j: f64,
    pub duration: SimTime,
}

/// Cost of one side of a transaction. Totals are the in-order sums of the
/// breakdown rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    pub phases: Vec<Phase>,
    pub energy_j: f64,
    pub duration: SimTime,
}

impl CostReport {
    fn from_phases(phases: Vec<Phase>) -> Self {
        let energy_j = phases.iter().fold(0.0, |acc, p| acc + p.energy_j);
        let duration = phases.iter().map(|p| p.duration).sum();
        CostReport {
            phases,
            energy_j,
            duration,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransactionReport {
    pub sender: CostReport,
    pub receiver: CostReport,
}

/// All measured characteristics of the module.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerModel {
    pub idle: IdleListenTable,
    pub tx: TxTable,
    pub aux: AuxOpTable,
    pub module: ModuleConstants,
}

impl PowerModel {
    pub fn from_data(data: &ModelData) -> Result<Self, ConfigError> {
        Ok(PowerModel {
            idle: IdleListenTable::new(data.idle_listen.clone())?,
            tx: TxTable::new(data.tx.clone())?,
            aux: AuxOpTable::new(&data.aux)?,
            module: ModuleConstants::new(&data.module)?,
        })
    }

    pub fn bundled() -> Self {
        Self::from_data(&ModelData::bundled()).expect("bundled tables are valid")
    }

    /// Idle-listen power in watts.
    pub fn idle_power(&self, rate: DataRate) -> Result<f64, EnergyError> {
        Ok(self.idle.power_uw(rate.bps())? * 1e-6)
    }

    pub fn tx_operating_point(&self, voltage: f64) -> Result<TxPoint, EnergyError> {
        self.tx.operating_point(voltage)
    }

    pub fn aux_cost(&self, op: AuxOp) -> AuxCost {
        self.aux.get(op)
    }

    pub fn aux_cost_by_name(&self, name: &str) -> Result<AuxCost, EnergyError> {
        Ok(self.aux.get(name.parse()?))
    }

    /// IRQ handling row for a frame with or without payload.
    pub fn irq_cost(&self, payload_bits: usize) -> AuxCost {
        if payload_bits == 0 {
            self.aux.get(AuxOp::IrqNoPayload)
        } else {
            self.aux.get(AuxOp::IrqPayload6)
        }
    }

    pub fn sender_cost(
        &self,
        cfg: &RadioConfig,
        payload_bits: usize,
        voltage: f64,
    ) -> Result<CostReport, EnergyError> {
        check_payload_bits(payload_bits)?;
        let slowest = cfg.min_rate().bps();
        if slowest < MIN_SAFE_TX_RATE {
            return Err(EnergyError::AutoShutdownRisk { rate: slowest });
        }
        let tx = self.tx_operating_point(voltage)?;
        let overhead = self.aux_cost(AuxOp::SendWuC);
        let air = airtime(cfg, payload_bits).total();
        let tx_w = tx.consumption_mw * 1e-3;
        Ok(CostReport::from_phases(vec![
            Phase {
                name: "sendwuc-overhead",
                power_w: None,
                energy_j: overhead.energy_j(),
                duration: overhead.duration(),
            },
            Phase {
                name: "transmit",
                power_w: Some(tx_w),
                energy_j: tx_w * air.as_secs_f64(),
                duration: air,
            },
        ]))
    }

    pub fn receiver_cost(
        &self,
        cfg: &RadioConfig,
        payload_bits: usize,
    ) -> Result<CostReport, EnergyError> {
        check_payload_bits(payload_bits)?;
        let air = airtime(cfg, payload_bits);
        let ldr_w = self.idle_power(cfg.ldr())?;
        let hdr_w = self.idle_power(cfg.hdr())?;
        let irq = self.irq_cost(payload_bits);
        Ok(CostReport::from_phases(vec![
            Phase {
                name: "preamble",
                power_w: Some(ldr_w),
                energy_j: ldr_w * air.preamble.as_secs_f64(),
                duration: air.preamble,
            },
            Phase {
                name: "decoding",
                power_w: Some(hdr_w),
                energy_j: hdr_w * air.body.as_secs_f64(),
                duration: air.body,
            },
            Phase {
                name: "irq-handling",
                power_w: None,
                energy_j: irq.energy_j(),
                duration: irq.duration(),
            },
        ]))
    }

    pub fn transaction(
        &self,
        cfg: &RadioConfig,
        payload_bits: usize,
        voltage: f64,
    ) -> Result<TransactionReport, EnergyError> {
        Ok(TransactionReport {
            sender: self.sender_cost(cfg, payload_bits, voltage)?,
            receiver: self.receiver_cost(cfg, payload_bits)?,
        })
    }
}

fn check_payload_bits(bits: usize) -> Result<(), EnergyError> {
    if bits % 8 == 0 && bits <= MAX_PAYLOAD_BYTES * 8 {
        Ok(())
    } else {
        Err(EnergyError::InvalidPayloadBits(bits))
    }
}
