//! Per-device energy accounting.
//!
//! A device is always in some background state (unconfigured, or idle
//! listening at its preamble rate). Foreground activities such as command
//! handling, transmission or decoding replace the background for their
//! duration. [`EnergyLedger::entries`] tiles `[0, horizon]` with both.

use super::SimError;
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cost {
    /// Constant power in watts for the whole interval.
    Power(f64),
    /// Fixed energy in joules spread over the interval.
    Energy(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Activity {
    pub start: SimTime,
    pub end: SimTime,
    pub state: &'static str,
    pub cost: Cost,
}

/// One tiled interval.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerEntry {
    pub start: SimTime,
    pub end: SimTime,
    pub state: &'static str,
    /// Average power over the interval.
    pub power_w: f64,
    pub energy_j: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Background {
    start: SimTime,
    state: &'static str,
    power_w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    background: Vec<Background>,
    activities: Vec<Activity>,
}

impl EnergyLedger {
    pub fn new(state: &'static str, power_w: f64) -> Self {
        EnergyLedger {
            background: vec![Background {
                start: SimTime::ZERO,
                state,
                power_w,
            }],
            activities: Vec::new(),
        }
    }

    /// Switches the background state from `at` onwards.
    pub fn set_background(&mut self, at: SimTime, state: &'static str, power_w: f64) -> Result<(), SimError> {
        let last = self.background.last().expect("ledger starts with a background");
        if at < last.start {
            return Err(SimError::Ledger(format!(
                "background change at {at} precedes the previous change at {}",
                last.start
            )));
        }
        if at == last.start {
            self.background.pop();
        }
        self.background.push(Background { start: at, state, power_w });
        Ok(())
    }

    pub fn background_power_at(&self, t: SimTime) -> f64 {
        self.background
            .iter()
            .rev()
            .find(|b| b.start <= t)
            .map(|b| b.power_w)
            .unwrap_or(0.0)
    }

    /// Records a foreground activity. Activities must not overlap and must be
    /// added in time order.
    pub fn add(&mut self, activity: Activity) -> Result<(), SimError> {
        if activity.end < activity.start {
            return Err(SimError::Ledger(format!("activity `{}` ends before it starts", activity.state)));
        }
        if let Some(prev) = self.activities.last() {
            if activity.start < prev.end {
                return Err(SimError::Ledger(format!(
                    "activity `{}` at {} overlaps `{}` ending at {}",
                    activity.state, activity.start, prev.state, prev.end
                )));
            }
        }
        if activity.start != activity.end {
            self.activities.push(activity);
        }
        Ok(())
    }

    pub fn activities(&self) -> &[Activity] {
        &self.activities
    }

    /// End of the last recorded activity.
    pub fn busy_until(&self) -> SimTime {
        self.activities.last().map(|a| a.end).unwrap_or(SimTime::ZERO)
    }

    /// Gap-free, non-overlapping intervals covering `[0, horizon]`.
    pub fn entries(&self, horizon: SimTime) -> Vec<LedgerEntry> {
        let mut out = Vec::new();
        let mut cursor = SimTime::ZERO;
        for act in &self.activities {
            if act.start >= horizon {
                break;
            }
            self.fill_background(cursor, act.start, &mut out);
            let end = act.end.min(horizon);
            let full = (act.end - act.start).as_secs_f64();
            let span = (end - act.start).as_secs_f64();
            let (power_w, energy_j) = match act.cost {
                Cost::Power(p) => (p, p * span),
                Cost::Energy(e) => {
                    let part = if end == act.end { e } else { e * span / full };
                    (e / full, part)
                }
            };
            out.push(LedgerEntry {
                start: act.start,
                end,
                state: act.state,
                power_w,
                energy_j,
            });
            cursor = end;
        }
        self.fill_background(cursor, horizon, &mut out);
        out
    }

    fn fill_background(&self, from: SimTime, to: SimTime, out: &mut Vec<LedgerEntry>) {
        if to <= from {
            return;
        }
        for (i, b) in self.background.iter().enumerate() {
            let seg_end = self.background.get(i + 1).map(|n| n.start).unwrap_or(SimTime::MAX);
            let start = b.start.max(from);
            let end = seg_end.min(to);
            if end > start {
                out.push(LedgerEntry {
                    start,
                    end,
                    state: b.state,
                    power_w: b.power_w,
                    energy_j: b.power_w * (end - start).as_secs_f64(),
                });
            }
        }
    }

    pub fn total_energy(&self, horizon: SimTime) -> f64 {
        self.entries(horizon).iter().map(|e| e.energy_j).sum()
    }

    /// Energy spent within `[from, to]`, pro-rating partially covered
    /// intervals.
    pub fn energy_between(&self, from: SimTime, to: SimTime) -> f64 {
        self.entries(to)
            .iter()
            .filter(|e| e.end > from)
            .map(|e| {
                if e.start >= from {
                    e.energy_j
                } else {
                    let kept = (e.end - from).as_secs_f64() / (e.end - e.start).as_secs_f64();
                    e.energy_j * kept
                }
            })
            .sum()
    }
}
