//! Discrete-event simulation of wake-up modules exchanging wake-up calls.
//!
//! Every module runs the same state machines: an MCU that is shut down
//! except while serving host commands or handling a received frame, a
//! wake-up receiver that listens at the preamble rate, and a transmitter
//! with its RF switch. Time is exact ([`SimTime`](crate::time::SimTime)) and
//! same-instant events run in `(time, device, insertion)` order, so a run is
//! fully determined by its inputs and seed.

mod device;
mod event;
mod ledger;
pub mod scenario;
mod sim;
mod wakeup;

use thiserror::Error;

use crate::airtime_energy::EnergyError;
use crate::link_model::LinkError;
use crate::mls_codec::CodecError;
use crate::time::SimTime;

pub use device::{
    BackupRegisters, CommandResponse, Device, DeviceSetup, HostCommand, McuState, ModuleState, RfBranch,
    TxState, WakeReason, WurState,
};
pub use event::{DeviceId, EventKind, SimEvent, TimerKind, TraceEntry};
pub use ledger::{Activity, Cost, EnergyLedger, LedgerEntry};
pub use sim::{
    CommandRecord, DeliveryMode, ReceptionOutcome, ReceptionRecord, SimOptions, Simulation, Transmission,
};
pub use wakeup::{end_to_end_wakeup, trial_seed, TransactionOutcome, WakeupSetup};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("event at {at} is earlier than the current time {now}")]
    InPast { at: SimTime, now: SimTime },
    #[error("no device with index {0}")]
    UnknownDevice(usize),
    #[error("module did not respond: SDN was not pulled low")]
    NoResponse,
    #[error("module busy until {until}")]
    Busy { until: SimTime },
    #[error("wake-up receiver has not been configured")]
    NotConfigured,
    #[error("sending at {rate} bit/s risks premature transmitter auto-shutdown")]
    AutoShutdownRisk { rate: u32 },
    #[error("module state violation: {0}")]
    StateViolation(String),
    #[error("energy ledger: {0}")]
    Ledger(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Link(#[from] LinkError),
}
