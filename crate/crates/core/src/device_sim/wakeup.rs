use super::device::{BackupRegisters, CommandResponse, DeviceSetup, HostCommand};
use super::event::TraceEntry;
use super::ledger::LedgerEntry;
use super::sim::{ReceptionOutcome, SimOptions, Simulation};
use super::SimError;
use crate::airtime_energy::PowerModel;
use crate::link_model::LinkParams;
use crate::mls_codec::{RadioConfig, WucFrame};
use crate::time::SimTime;

/// One sender waking one receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct WakeupSetup {
    /// Rates, code and the receiver's address.
    pub cfg: RadioConfig,
    pub payload: Vec<u8>,
    pub voltage_v: f64,
    pub distance_m: f64,
    pub tx_power_dbm: Option<f64>,
}

impl WakeupSetup {
    pub fn new(cfg: RadioConfig, payload: Vec<u8>, distance_m: f64) -> Self {
        WakeupSetup {
            cfg,
            payload,
            voltage_v: 3.0,
            distance_m,
            tx_power_dbm: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransactionOutcome {
    /// Whether the link let the call reach the receiver at all.
    pub delivered: bool,
    pub outcome: ReceptionOutcome,
    /// Energy from the SendWuC command until the last chip is on air.
    pub sender_energy_j: f64,
    pub sender_duration: SimTime,
    /// Energy from the first chip reaching the receiver until the interrupt;
    /// `None` if the receiver was not woken.
    pub receiver_energy_j: Option<f64>,
    pub receiver_duration: Option<SimTime>,
    /// Registers read back by the receiver's host after the interrupt.
    pub backup: Option<BackupRegisters>,
    /// Sender and receiver ledgers from t = 0 to the end of the run.
    pub sender_ledger: Vec<LedgerEntry>,
    pub receiver_ledger: Vec<LedgerEntry>,
    pub trace: Vec<TraceEntry>,
}

impl TransactionOutcome {
    pub fn woken_frame(&self) -> Option<&WucFrame> {
        match &self.outcome {
            ReceptionOutcome::Woken { frame, .. } => Some(frame),
            _ => None,
        }
    }
}

/// When both modules are configured and the call is sent.
pub const SETUP_AT: SimTime = SimTime::ZERO;
pub const SEND_AT: SimTime = SimTime::from_secs(1);

/// Runs a full wake-up: both modules receive SetupWuR at t = 0, the sender's
/// host issues SendWuC at t = 1 s, and on wake-up the receiver's host reads
/// the interrupt reason.
pub fn end_to_end_wakeup(
    setup: &WakeupSetup,
    power: &PowerModel,
    link: &LinkParams,
    options: SimOptions,
    seed: u64,
) -> Result<TransactionOutcome, SimError> {
    let mut sim = Simulation::new(power.clone(), link.clone(), options, seed);
    let mut tx_setup = DeviceSetup::new("sender", (0.0, 0.0), setup.voltage_v);
    tx_setup.tx_power_dbm = setup.tx_power_dbm;
    let sender = sim.add_device(tx_setup);
    let receiver = sim.add_device(DeviceSetup::new("receiver", (setup.distance_m, 0.0), setup.voltage_v));

    let address = setup.cfg.address();
    sim.schedule_command(SETUP_AT, sender, HostCommand::SetupWuR(setup.cfg.with_address(!address)))?;
    sim.schedule_command(SETUP_AT, receiver, HostCommand::SetupWuR(setup.cfg.clone()))?;
    sim.schedule_command(
        SEND_AT,
        sender,
        HostCommand::SendWuC {
            address,
            payload: setup.payload.clone(),
            voltage_v: setup.voltage_v,
        },
    )?;
    sim.run()?;

    if let Some(rejected) = sim.commands().iter().find_map(|c| c.result.clone().err()) {
        return Err(rejected);
    }
    let tx = sim.transmissions().first().cloned().ok_or(SimError::NotConfigured)?;
    let (delivered, outcome) = sim
        .receptions()
        .iter()
        .find(|r| r.receiver == receiver)
        .map(|r| (r.delivered, r.outcome.clone()))
        .unwrap_or((false, ReceptionOutcome::Ignored));

    let sender_energy_j = sim.device(sender).ledger.energy_between(SEND_AT, tx.end);
    let (mut receiver_energy_j, mut receiver_duration, mut backup) = (None, None, None);
    if let ReceptionOutcome::Woken { irq_at, .. } = &outcome {
        receiver_energy_j = Some(sim.device(receiver).ledger.energy_between(tx.start, *irq_at));
        receiver_duration = Some(*irq_at - tx.start);
        sim.pull_sdn_low(receiver)?;
        if let CommandResponse::IrqReason(regs) = sim.host_command(receiver, HostCommand::IrqReason)? {
            backup = Some(regs);
        }
        sim.run()?;
    }
    let end = sim.now().max(tx.end);

    Ok(TransactionOutcome {
        delivered,
        outcome,
        sender_energy_j,
        sender_duration: tx.end - SEND_AT,
        receiver_energy_j,
        receiver_duration,
        backup,
        sender_ledger: sim.ledger_entries(sender, end),
        receiver_ledger: sim.ledger_entries(receiver, end),
        trace: sim.trace().to_vec(),
    })
}

/// Independent per-trial seed derived from a base seed (SplitMix64 mixing).
pub fn trial_seed(base: u64, trial: u64) -> u64 {
    let mut z = base.wrapping_add(trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
