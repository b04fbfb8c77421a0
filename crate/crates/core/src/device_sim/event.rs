use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;

use super::device::HostCommand;
use crate::mls_codec::WucFrame;
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeviceId(pub usize);

impl fmt::Display for DeviceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dev{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TimerKind {
    /// Ramp-up finished; the frame goes on air.
    TxStart { tx: usize },
    /// A host command finished and the MCU returns to shutdown.
    CommandDone,
    /// The transmitter has powered down after the last chip.
    AutoShutdown,
    /// The MCU finished a system-reset wake-up.
    WakeDone,
    /// Caller-defined marker with no side effects.
    User(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    ChipBoundary { on: bool },
    PreambleDetected,
    FrameComplete { frame: WucFrame, matched: bool },
    IrqAssert { frame: WucFrame },
    SdnLow,
    Command(HostCommand),
    Timer(TimerKind),
    TxComplete,
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::ChipBoundary { .. } => "chip-boundary",
            EventKind::PreambleDetected => "preamble-detected",
            EventKind::FrameComplete { .. } => "frame-complete",
            EventKind::IrqAssert { .. } => "irq-assert",
            EventKind::SdnLow => "sdn-low",
            EventKind::Command(_) => "command",
            EventKind::Timer(_) => "timer",
            EventKind::TxComplete => "tx-complete",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimEvent {
    pub time: SimTime,
    pub target: DeviceId,
    pub kind: EventKind,
}

impl SimEvent {
    pub fn new(time: SimTime, target: DeviceId, kind: EventKind) -> Self {
        SimEvent { time, target, kind }
    }
}

/// One executed event.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TraceEntry {
    pub time: SimTime,
    pub device: DeviceId,
    pub event: &'static str,
    pub detail: String,
}

struct Queued {
    time: SimTime,
    target: DeviceId,
    seq: u64,
    kind: EventKind,
}

impl Queued {
    fn key(&self) -> (SimTime, DeviceId, u64) {
        (self.time, self.target, self.seq)
    }
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

/// Min-queue ordered by `(time, target, insertion sequence)`.
#[derive(Default)]
pub(crate) struct EventQueue {
    heap: BinaryHeap<Reverse<Queued>>,
    next_seq: u64,
}

impl EventQueue {
    pub fn push(&mut self, ev: SimEvent) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Reverse(Queued {
            time: ev.time,
            target: ev.target,
            seq,
            kind: ev.kind,
        }));
    }

    pub fn peek_time(&self) -> Option<SimTime> {
        self.heap.peek().map(|r| r.0.time)
    }

    pub fn pop(&mut self) -> Option<SimEvent> {
        self.heap.pop().map(|Reverse(q)| SimEvent {
            time: q.time,
            target: q.target,
            kind: q.kind,
        })
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_break_by_target_then_sequence() {
        let mut q = EventQueue::default();
        let t = SimTime::from_secs(1);
        q.push(SimEvent::new(t, DeviceId(2), EventKind::Timer(TimerKind::User(0))));
        q.push(SimEvent::new(t, DeviceId(1), EventKind::Timer(TimerKind::User(1))));
        q.push(SimEvent::new(t, DeviceId(1), EventKind::Timer(TimerKind::User(2))));
        q.push(SimEvent::new(SimTime::ZERO, DeviceId(9), EventKind::Timer(TimerKind::User(3))));
        let order: Vec<u64> = std::iter::from_fn(|| q.pop())
            .map(|e| match e.kind {
                EventKind::Timer(TimerKind::User(n)) => n,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(order, [3, 1, 2, 0]);
    }
}
