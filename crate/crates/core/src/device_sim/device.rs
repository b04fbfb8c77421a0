use super::event::DeviceId;
use super::ledger::EnergyLedger;
use super::SimError;
use crate::mls_codec::{DataRate, RadioConfig, WucFrame};
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McuState {
    Shutdown,
    HandlingIrq,
    ServingHost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WurState {
    IdleListen(DataRate),
    Decoding(DataRate),
    Suspended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TxState {
    Shutdown,
    RampUp,
    Transmitting,
    AutoShutdownPending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfBranch {
    Rx,
    Tx,
}

/// Why the module last raised its host interrupt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WakeReason {
    WakeUpCall { address: u16 },
}

/// Always-powered storage surviving MCU shutdown.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BackupRegisters {
    pub reason: Option<WakeReason>,
    pub payload: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleState {
    pub mcu: McuState,
    pub wur: WurState,
    pub tx: TxState,
    pub rf_switch: RfBranch,
    pub backup: BackupRegisters,
}

impl Default for ModuleState {
    fn default() -> Self {
        ModuleState {
            mcu: McuState::Shutdown,
            wur: WurState::Suspended,
            tx: TxState::Shutdown,
            rf_switch: RfBranch::Rx,
            backup: BackupRegisters::default(),
        }
    }
}

impl ModuleState {
    /// Checks the RF switch against transmitter and receiver activity.
    pub fn check(&self) -> Result<(), SimError> {
        if self.tx == TxState::Transmitting && self.rf_switch != RfBranch::Tx {
            return Err(SimError::StateViolation("transmitting with the RF switch on the receive branch".into()));
        }
        if matches!(self.wur, WurState::Decoding(_)) && self.rf_switch != RfBranch::Rx {
            return Err(SimError::StateViolation("decoding with the RF switch on the transmit branch".into()));
        }
        Ok(())
    }
}

/// Commands a host issues over the module's bus after pulling SDN low.
#[derive(Debug, Clone, PartialEq)]
pub enum HostCommand {
    WhoAmI,
    SetupWuR(RadioConfig),
    SendWuC {
        address: u16,
        payload: Vec<u8>,
        voltage_v: f64,
    },
    IrqReason,
}

impl HostCommand {
    pub fn name(&self) -> &'static str {
        match self {
            HostCommand::WhoAmI => "WhoAmI",
            HostCommand::SetupWuR(_) => "SetupWuR",
            HostCommand::SendWuC { .. } => "SendWuC",
            HostCommand::IrqReason => "IRQReason",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CommandResponse {
    Identity(u8),
    Configured,
    /// The wake-up call goes on air during `[start, end)`.
    Sending { start: SimTime, end: SimTime, corrupted: bool },
    IrqReason(BackupRegisters),
}

/// Placement and supply of one simulated module.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceSetup {
    pub name: String,
    pub position_m: (f64, f64),
    pub voltage_v: f64,
    /// Overrides the output power looked up from the supply voltage.
    pub tx_power_dbm: Option<f64>,
}

impl DeviceSetup {
    pub fn new(name: impl Into<String>, position_m: (f64, f64), voltage_v: f64) -> Self {
        DeviceSetup {
            name: name.into(),
            position_m,
            voltage_v,
            tx_power_dbm: None,
        }
    }

    pub fn distance_to(&self, other: &DeviceSetup) -> f64 {
        let (dx, dy) = (self.position_m.0 - other.position_m.0, self.position_m.1 - other.position_m.1);
        dx.hypot(dy)
    }
}

#[derive(Debug, Clone)]
pub struct Device {
    pub id: DeviceId,
    pub setup: DeviceSetup,
    pub state: ModuleState,
    pub config: Option<RadioConfig>,
    pub sdn_low: bool,
    pub irq_line: bool,
    pub ledger: EnergyLedger,
    pub(crate) pending_config: Option<RadioConfig>,
}

impl Device {
    pub(crate) fn new(id: DeviceId, setup: DeviceSetup, floor_w: f64) -> Self {
        Device {
            id,
            setup,
            state: ModuleState::default(),
            config: None,
            sdn_low: false,
            irq_line: false,
            ledger: EnergyLedger::new("unconfigured", floor_w),
            pending_config: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.setup.name
    }

    pub fn busy_until(&self) -> SimTime {
        self.ledger.busy_until()
    }

    pub(crate) fn store_wakeup(&mut self, frame: &WucFrame) {
        self.state.backup = BackupRegisters {
            reason: Some(WakeReason::WakeUpCall { address: frame.address() }),
            payload: frame.payload().to_vec(),
        };
    }
}
