use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::device::{
    CommandResponse, Device, DeviceSetup, HostCommand, McuState, RfBranch, TxState, WurState,
};
use super::event::{DeviceId, EventKind, EventQueue, SimEvent, TimerKind, TraceEntry};
use super::ledger::{Activity, Cost, LedgerEntry};
use super::SimError;
use crate::airtime_energy::{AuxOp, PowerModel, MIN_SAFE_TX_RATE};
use crate::link_model::{self, LinkParams};
use crate::mls_codec::{
    airtime, chip_flip_noise, encode_frame, Chip, ChipStream, Decoder, RadioConfig, WucFrame,
    DEFAULT_THRESHOLD,
};
use crate::time::SimTime;

/// How the link decides whether a wake-up call reaches a receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeliveryMode {
    /// One Bernoulli draw per frame from the calibrated PDR curve; the chip
    /// stream then arrives intact.
    Link,
    /// Every frame arrives intact.
    Ideal,
    /// Every frame within the range cutoff arrives with each chip flipped
    /// independently; the correlator decides whether it is recovered.
    ChipFlip { flip_prob: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    pub delivery: DeliveryMode,
    /// Reject sending below 1024 bit/s. When off, slow frames whose off-runs
    /// outlast the transmitter's auto-shutdown timeout go out corrupted.
    pub strict_rates: bool,
    /// Preamble detection threshold, fraction of matching chips.
    pub threshold: f64,
    /// Emit one `chip-boundary` event per transmitted chip.
    pub trace_chips: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            delivery: DeliveryMode::Link,
            strict_rates: true,
            threshold: DEFAULT_THRESHOLD,
            trace_chips: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transmission {
    pub sender: DeviceId,
    pub frame: WucFrame,
    pub cfg: RadioConfig,
    /// What actually goes on air, after any auto-shutdown truncation.
    pub stream: ChipStream,
    pub start: SimTime,
    pub end: SimTime,
    pub tx_power_dbm: f64,
    pub corrupted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReceptionOutcome {
    /// Receiver unconfigured, busy, or already decoding.
    Ignored,
    NotDelivered,
    NotDetected,
    AddressMismatch { frame: WucFrame },
    Woken { frame: WucFrame, irq_at: SimTime },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReceptionRecord {
    pub receiver: DeviceId,
    pub transmission: Option<usize>,
    pub stream_start: SimTime,
    pub delivered: bool,
    pub outcome: ReceptionOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandRecord {
    pub time: SimTime,
    pub device: DeviceId,
    pub command: &'static str,
    pub result: Result<CommandResponse, SimError>,
}

/// One simulation instance. Owns all device state and its random stream.
pub struct Simulation {
    power: PowerModel,
    link: LinkParams,
    options: SimOptions,
    clock: SimTime,
    queue: EventQueue,
    devices: Vec<Device>,
    trace: Vec<TraceEntry>,
    rng: ChaCha8Rng,
    transmissions: Vec<Transmission>,
    receptions: Vec<ReceptionRecord>,
    commands: Vec<CommandRecord>,
}

impl Simulation {
    pub fn new(power: PowerModel, link: LinkParams, options: SimOptions, seed: u64) -> Self {
        Simulation {
            power,
            link,
            options,
            clock: SimTime::ZERO,
            queue: EventQueue::default(),
            devices: Vec::new(),
            trace: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            transmissions: Vec::new(),
            receptions: Vec::new(),
            commands: Vec::new(),
        }
    }

    pub fn add_device(&mut self, setup: DeviceSetup) -> DeviceId {
        let id = DeviceId(self.devices.len());
        let floor = self.power.module.unconfigured_power_w();
        self.devices.push(Device::new(id, setup, floor));
        id
    }

    pub fn now(&self) -> SimTime {
        self.clock
    }

    pub fn power(&self) -> &PowerModel {
        &self.power
    }

    pub fn link(&self) -> &LinkParams {
        &self.link
    }

    pub fn options(&self) -> &SimOptions {
        &self.options
    }

    pub fn device(&self, id: DeviceId) -> &Device {
        &self.devices[id.0]
    }

    pub fn devices(&self) -> &[Device] {
        &self.devices
    }

    pub fn find_device(&self, name: &str) -> Option<DeviceId> {
        self.devices.iter().find(|d| d.name() == name).map(|d| d.id)
    }

    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }

    pub fn transmissions(&self) -> &[Transmission] {
        &self.transmissions
    }

    pub fn receptions(&self) -> &[ReceptionRecord] {
        &self.receptions
    }

    pub fn commands(&self) -> &[CommandRecord] {
        &self.commands
    }

    pub fn pending_events(&self) -> usize {
        self.queue.len()
    }

    pub fn ledger_entries(&self, id: DeviceId, horizon: SimTime) -> Vec<LedgerEntry> {
        self.devices[id.0].ledger.entries(horizon)
    }

    fn check_device(&self, id: DeviceId) -> Result<(), SimError> {
        if id.0 < self.devices.len() {
            Ok(())
        } else {
            Err(SimError::UnknownDevice(id.0))
        }
    }

    pub fn schedule(&mut self, event: SimEvent) -> Result<(), SimError> {
        self.check_device(event.target)?;
        if event.time < self.clock {
            return Err(SimError::InPast {
                at: event.time,
                now: self.clock,
            });
        }
        self.queue.push(event);
        Ok(())
    }

    /// Schedules an SDN pulse followed by `cmd` at `at`.
    pub fn schedule_command(&mut self, at: SimTime, id: DeviceId, cmd: HostCommand) -> Result<(), SimError> {
        self.schedule(SimEvent::new(at, id, EventKind::SdnLow))?;
        self.schedule(SimEvent::new(at, id, EventKind::Command(cmd)))
    }

    /// Drives SDN low now, waking the MCU for one command.
    pub fn pull_sdn_low(&mut self, id: DeviceId) -> Result<(), SimError> {
        self.check_device(id)?;
        self.record(self.clock, id, "sdn-low", String::new());
        self.devices[id.0].sdn_low = true;
        Ok(())
    }

    /// Executes `cmd` now. The response is available immediately; the
    /// command's cost and duration land in the ledger.
    pub fn host_command(&mut self, id: DeviceId, cmd: HostCommand) -> Result<CommandResponse, SimError> {
        self.check_device(id)?;
        let now = self.clock;
        let name = cmd.name();
        let result = self.execute_command(id, cmd);
        self.commands.push(CommandRecord {
            time: now,
            device: id,
            command: name,
            result: result.clone(),
        });
        result
    }

    /// Wakes the MCU through its reset source. It returns to shutdown after
    /// the wake-up time without touching the backup registers.
    pub fn system_reset(&mut self, id: DeviceId) -> Result<(), SimError> {
        self.check_device(id)?;
        let now = self.clock;
        let dev = &mut self.devices[id.0];
        if dev.busy_until() > now {
            return Err(SimError::Busy { until: dev.busy_until() });
        }
        let end = now + self.power.module.mcu_wake;
        let floor = dev.ledger.background_power_at(now);
        dev.ledger.add(Activity {
            start: now,
            end,
            state: "system-reset",
            cost: Cost::Power(floor),
        })?;
        dev.state.mcu = McuState::ServingHost;
        self.record(now, id, "timer", "system-reset".into());
        self.schedule(SimEvent::new(end, id, EventKind::Timer(TimerKind::WakeDone)))
    }

    /// Feeds `stream` to a receiver starting now.
    pub fn wur_receive(&mut self, id: DeviceId, stream: &ChipStream, delivered: bool) -> Result<ReceptionOutcome, SimError> {
        self.check_device(id)?;
        self.receive_at(id, stream, delivered, self.clock, None)
    }

    /// Processes every event up to and including `until`, then advances the
    /// clock to `until`. Returns the newly executed part of the trace.
    pub fn run_until(&mut self, until: SimTime) -> Result<&[TraceEntry], SimError> {
        if until < self.clock {
            return Err(SimError::InPast {
                at: until,
                now: self.clock,
            });
        }
        let first = self.trace.len();
        while let Some(t) = self.queue.peek_time() {
            if t > until {
                break;
            }
            let ev = self.queue.pop().expect("peeked");
            self.clock = ev.time;
            self.dispatch(ev)?;
        }
        self.clock = until;
        Ok(&self.trace[first..])
    }

    /// Runs until the queue is empty.
    pub fn run(&mut self) -> Result<&[TraceEntry], SimError> {
        let first = self.trace.len();
        while let Some(ev) = self.queue.pop() {
            self.clock = ev.time;
            self.dispatch(ev)?;
        }
        Ok(&self.trace[first..])
    }

    fn record(&mut self, time: SimTime, device: DeviceId, event: &'static str, detail: String) {
        self.trace.push(TraceEntry {
            time,
            device,
            event,
            detail,
        });
    }

    fn dispatch(&mut self, ev: SimEvent) -> Result<(), SimError> {
        let id = ev.target;
        let now = ev.time;
        match ev.kind {
            EventKind::ChipBoundary { on } => {
                self.record(now, id, "chip-boundary", if on { "1" } else { "0" }.into());
            }
            EventKind::SdnLow => {
                self.record(now, id, "sdn-low", String::new());
                self.devices[id.0].sdn_low = true;
            }
            EventKind::Command(cmd) => {
                let name = cmd.name();
                let result = self.execute_command(id, cmd);
                let detail = match &result {
                    Ok(resp) => format!("{name} ok {}", describe(resp)).trim_end().to_string(),
                    Err(e) => format!("{name} rejected: {e}"),
                };
                self.record(now, id, "command", detail);
                self.commands.push(CommandRecord {
                    time: now,
                    device: id,
                    command: name,
                    result,
                });
            }
            EventKind::Timer(kind) => self.on_timer(now, id, kind)?,
            EventKind::TxComplete => {
                self.record(now, id, "tx-complete", String::new());
                let dev = &mut self.devices[id.0];
                dev.state.tx = TxState::AutoShutdownPending;
                dev.state.rf_switch = RfBranch::Rx;
                dev.state.mcu = McuState::Shutdown;
                dev.state.wur = match &dev.config {
                    Some(c) => WurState::IdleListen(c.ldr()),
                    None => WurState::Suspended,
                };
                self.queue.push(SimEvent::new(now, id, EventKind::Timer(TimerKind::AutoShutdown)));
            }
            EventKind::PreambleDetected => {
                self.record(now, id, "preamble-detected", String::new());
                let dev = &mut self.devices[id.0];
                if let Some(c) = &dev.config {
                    dev.state.wur = WurState::Decoding(c.hdr());
                }
            }
            EventKind::FrameComplete { frame, matched } => {
                self.record(
                    now,
                    id,
                    "frame-complete",
                    format!("address=0x{:04x} payload={} match={matched}", frame.address(), frame.payload().len()),
                );
                let dev = &mut self.devices[id.0];
                if let Some(c) = &dev.config {
                    dev.state.wur = WurState::IdleListen(c.ldr());
                }
                if matched {
                    dev.state.mcu = McuState::HandlingIrq;
                }
            }
            EventKind::IrqAssert { frame } => {
                self.record(now, id, "irq-assert", format!("address=0x{:04x}", frame.address()));
                let dev = &mut self.devices[id.0];
                dev.store_wakeup(&frame);
                dev.irq_line = true;
                dev.state.mcu = McuState::Shutdown;
            }
        }
        self.devices[id.0].state.check()
    }

    fn on_timer(&mut self, now: SimTime, id: DeviceId, kind: TimerKind) -> Result<(), SimError> {
        match kind {
            TimerKind::TxStart { tx } => {
                self.record(now, id, "timer", format!("tx-start #{tx}"));
                self.start_transmission(now, tx)?;
            }
            TimerKind::CommandDone => {
                self.record(now, id, "timer", "command-done".into());
                let dev = &mut self.devices[id.0];
                dev.state.mcu = McuState::Shutdown;
                if let Some(cfg) = dev.pending_config.take() {
                    let idle = self.power.idle_power(cfg.ldr())?;
                    dev.ledger.set_background(now, "idle-listen", idle)?;
                    dev.state.wur = WurState::IdleListen(cfg.ldr());
                    dev.config = Some(cfg);
                }
            }
            TimerKind::AutoShutdown => {
                self.record(now, id, "timer", "auto-shutdown".into());
                self.devices[id.0].state.tx = TxState::Shutdown;
            }
            TimerKind::WakeDone => {
                self.record(now, id, "timer", "wake-done".into());
                self.devices[id.0].state.mcu = McuState::Shutdown;
            }
            TimerKind::User(tag) => self.record(now, id, "timer", format!("user {tag}")),
        }
        Ok(())
    }

    fn execute_command(&mut self, id: DeviceId, cmd: HostCommand) -> Result<CommandResponse, SimError> {
        let now = self.clock;
        {
            let dev = &self.devices[id.0];
            if !dev.sdn_low {
                return Err(SimError::NoResponse);
            }
            if dev.busy_until() > now {
                return Err(SimError::Busy { until: dev.busy_until() });
            }
        }
        let response = match cmd {
            HostCommand::WhoAmI => {
                self.fixed_cost_command(id, AuxOp::WhoAmI, "who-am-i")?;
                CommandResponse::Identity(self.power.module.who_am_i)
            }
            HostCommand::SetupWuR(cfg) => {
                // The receiver model needs both rates in the idle table.
                self.power.idle_power(cfg.ldr())?;
                self.power.idle_power(cfg.hdr())?;
                self.fixed_cost_command(id, AuxOp::SetupWuR, "setup-wur")?;
                let dev = &mut self.devices[id.0];
                dev.state.wur = WurState::Suspended;
                dev.pending_config = Some(cfg);
                CommandResponse::Configured
            }
            HostCommand::IrqReason => {
                self.fixed_cost_command(id, AuxOp::IrqReason, "irq-reason")?;
                let dev = &mut self.devices[id.0];
                dev.irq_line = false;
                CommandResponse::IrqReason(dev.state.backup.clone())
            }
            HostCommand::SendWuC {
                address,
                payload,
                voltage_v,
            } => self.send_wuc(id, address, payload, voltage_v)?,
        };
        self.devices[id.0].sdn_low = false;
        Ok(response)
    }

    fn fixed_cost_command(&mut self, id: DeviceId, op: AuxOp, state: &'static str) -> Result<(), SimError> {
        let now = self.clock;
        let cost = self.power.aux_cost(op);
        let end = now + cost.duration();
        let dev = &mut self.devices[id.0];
        dev.ledger.add(Activity {
            start: now,
            end,
            state,
            cost: Cost::Energy(cost.energy_j()),
        })?;
        dev.state.mcu = McuState::ServingHost;
        self.queue.push(SimEvent::new(end, id, EventKind::Timer(TimerKind::CommandDone)));
        Ok(())
    }

    fn send_wuc(&mut self, id: DeviceId, address: u16, payload: Vec<u8>, voltage_v: f64) -> Result<CommandResponse, SimError> {
        let now = self.clock;
        let cfg = self.devices[id.0]
            .config
            .clone()
            .ok_or(SimError::NotConfigured)?
            .with_address(address);
        let frame = WucFrame::new(address, payload)?;
        let slowest = cfg.min_rate().bps();
        if slowest < MIN_SAFE_TX_RATE && self.options.strict_rates {
            return Err(SimError::AutoShutdownRisk { rate: slowest });
        }
        let point = self.power.tx_operating_point(voltage_v)?;
        let mut stream = encode_frame(&frame, &cfg);
        let mut corrupted = false;
        if slowest < MIN_SAFE_TX_RATE {
            if let Some(cut) = auto_shutdown_point(&stream, self.power.module.auto_shutdown) {
                stream = silence_from(&stream, cut);
                corrupted = true;
            }
        }
        let overhead = self.power.aux_cost(AuxOp::SendWuC);
        let start = now + overhead.duration();
        let end = start + stream.total_duration();
        let tx_w = point.consumption_mw * 1e-3;
        let dev = &mut self.devices[id.0];
        dev.ledger.add(Activity {
            start: now,
            end: start,
            state: "sendwuc-overhead",
            cost: Cost::Energy(overhead.energy_j()),
        })?;
        dev.ledger.add(Activity {
            start,
            end,
            state: "transmit",
            cost: Cost::Power(tx_w),
        })?;
        dev.state.mcu = McuState::ServingHost;
        dev.state.tx = TxState::RampUp;
        let tx_power_dbm = dev.setup.tx_power_dbm.unwrap_or(point.tx_power_dbm);
        let tx = self.transmissions.len();
        self.transmissions.push(Transmission {
            sender: id,
            frame,
            cfg,
            stream,
            start,
            end,
            tx_power_dbm,
            corrupted,
        });
        self.queue.push(SimEvent::new(start, id, EventKind::Timer(TimerKind::TxStart { tx })));
        self.queue.push(SimEvent::new(end, id, EventKind::TxComplete));
        Ok(CommandResponse::Sending { start, end, corrupted })
    }

    fn start_transmission(&mut self, now: SimTime, tx: usize) -> Result<(), SimError> {
        let (sender, stream, tx_power) = {
            let t = &self.transmissions[tx];
            (t.sender, t.stream.clone(), t.tx_power_dbm)
        };
        {
            let dev = &mut self.devices[sender.0];
            dev.state.rf_switch = RfBranch::Tx;
            dev.state.tx = TxState::Transmitting;
            dev.state.wur = WurState::Suspended;
        }
        if self.options.trace_chips {
            let mut t = now;
            for chip in stream.chips() {
                self.queue.push(SimEvent::new(t, sender, EventKind::ChipBoundary { on: chip.on }));
                t += chip.duration;
            }
        }
        for r in 0..self.devices.len() {
            let rid = DeviceId(r);
            if rid == sender || self.devices[r].config.is_none() {
                continue;
            }
            let distance = self.devices[sender.0].setup.distance_to(&self.devices[r].setup);
            let reach = distance.max(self.link.reference_distance_m);
            let beyond = self.link.max_range_cutoff_m.is_some_and(|c| distance > c);
            let (delivered, received) = match self.options.delivery {
                DeliveryMode::Ideal => (true, stream.clone()),
                DeliveryMode::Link => (
                    link_model::deliver(reach, tx_power, &self.link, &mut self.rng)?,
                    stream.clone(),
                ),
                DeliveryMode::ChipFlip { flip_prob } => {
                    let seed = self.rng.gen();
                    (!beyond, chip_flip_noise(&stream, flip_prob, seed)?)
                }
            };
            self.receive_at(rid, &received, delivered, now, Some(tx))?;
        }
        Ok(())
    }

    fn receive_at(
        &mut self,
        id: DeviceId,
        stream: &ChipStream,
        delivered: bool,
        at: SimTime,
        transmission: Option<usize>,
    ) -> Result<ReceptionOutcome, SimError> {
        let outcome = self.reception_outcome(id, stream, delivered, at)?;
        self.receptions.push(ReceptionRecord {
            receiver: id,
            transmission,
            stream_start: at,
            delivered,
            outcome: outcome.clone(),
        });
        Ok(outcome)
    }

    fn reception_outcome(&mut self, id: DeviceId, stream: &ChipStream, delivered: bool, at: SimTime) -> Result<ReceptionOutcome, SimError> {
        let dev = &self.devices[id.0];
        let Some(cfg) = dev.config.clone() else {
            return Ok(ReceptionOutcome::Ignored);
        };
        if dev.busy_until() > at || !matches!(dev.state.wur, WurState::IdleListen(_)) {
            log::warn!("{}: wake-up call at {at} overlaps ongoing activity; ignored", dev.name());
            return Ok(ReceptionOutcome::Ignored);
        }
        if !delivered {
            return Ok(ReceptionOutcome::NotDelivered);
        }
        let decoded = match Decoder::new(&cfg, self.options.threshold)?.decode(stream) {
            Ok(Some(d)) => d,
            Ok(None) | Err(_) => return Ok(ReceptionOutcome::NotDetected),
        };
        let air = airtime(&cfg, decoded.frame.payload_bits());
        let pre_start = at + decoded.preamble_start;
        let pre_end = pre_start + air.preamble;
        let body_end = pre_end + air.body;
        let matched = decoded.frame.address() == cfg.address();
        let ldr_w = self.power.idle_power(cfg.ldr())?;
        let hdr_w = self.power.idle_power(cfg.hdr())?;
        let irq = self.power.irq_cost(decoded.frame.payload_bits());

        let dev = &mut self.devices[id.0];
        dev.ledger.add(Activity {
            start: pre_start,
            end: pre_end,
            state: "preamble",
            cost: Cost::Power(ldr_w),
        })?;
        dev.ledger.add(Activity {
            start: pre_end,
            end: body_end,
            state: "decoding",
            cost: Cost::Power(hdr_w),
        })?;
        self.queue.push(SimEvent::new(pre_end, id, EventKind::PreambleDetected));
        self.queue.push(SimEvent::new(
            body_end,
            id,
            EventKind::FrameComplete {
                frame: decoded.frame.clone(),
                matched,
            },
        ));
        if !matched {
            return Ok(ReceptionOutcome::AddressMismatch { frame: decoded.frame });
        }
        let irq_at = body_end + irq.duration();
        self.devices[id.0].ledger.add(Activity {
            start: body_end,
            end: irq_at,
            state: "irq-handling",
            cost: Cost::Energy(irq.energy_j()),
        })?;
        self.queue.push(SimEvent::new(
            irq_at,
            id,
            EventKind::IrqAssert {
                frame: decoded.frame.clone(),
            },
        ));
        Ok(ReceptionOutcome::Woken {
            frame: decoded.frame,
            irq_at,
        })
    }
}

fn describe(resp: &CommandResponse) -> String {
    match resp {
        CommandResponse::Identity(b) => format!("id=0x{b:02x}"),
        CommandResponse::Configured => String::new(),
        CommandResponse::Sending { start, end, corrupted } => format!(
            "on-air {}..{}{}",
            start.as_secs_f64(),
            end.as_secs_f64(),
            if *corrupted { " corrupted" } else { "" }
        ),
        CommandResponse::IrqReason(regs) => format!("reason={:?} payload={:02x?}", regs.reason, regs.payload),
    }
}

/// Offset into `stream` at which an off-run reaches `timeout`.
fn auto_shutdown_point(stream: &ChipStream, timeout: SimTime) -> Option<SimTime> {
    if timeout.is_zero() {
        return None;
    }
    let mut t = SimTime::ZERO;
    let mut run_start = None;
    for chip in stream.chips() {
        if chip.on {
            run_start = None;
        } else {
            let start = *run_start.get_or_insert(t);
            if t + chip.duration - start >= timeout {
                return Some(start + timeout);
            }
        }
        t += chip.duration;
    }
    None
}

/// Carrier stays off from `cut` to the end of the stream.
fn silence_from(stream: &ChipStream, cut: SimTime) -> ChipStream {
    let mut t = SimTime::ZERO;
    let chips = stream
        .chips()
        .iter()
        .map(|c| {
            let on = c.on && t < cut;
            t += c.duration;
            Chip { on, duration: c.duration }
        })
        .collect();
    ChipStream::new(chips).expect("durations unchanged")
}
