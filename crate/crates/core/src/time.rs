//! Exact simulation time.
//!
//! Every chip duration in the system is `1 / rate` with `rate` a power of two
//! between 256 and 32768 bit/s, and every measured operation duration is a
//! multiple of 0.1 ms. A tick of `1 / (32768 * 10^6)` s represents both
//! families exactly, so timestamps never need rounding once they are in the
//! simulator.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Sub};

/// Ticks per second of simulation time.
pub const TICKS_PER_SECOND: u64 = 32_768 * 1_000_000;

const TICKS_PER_MILLI: f64 = (TICKS_PER_SECOND / 1000) as f64;

/// A point in, or span of, simulation time measured in integer ticks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimTime(u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);
    pub const MAX: SimTime = SimTime(u64::MAX);

    pub const fn from_ticks(ticks: u64) -> Self {
        SimTime(ticks)
    }

    pub const fn ticks(self) -> u64 {
        self.0
    }

    /// Duration of `count` chips at `rate` chips per second.
    ///
    /// Panics if `rate` does not divide [`TICKS_PER_SECOND`]; callers pass
    /// validated [`DataRate`](crate::DataRate) values.
    pub fn from_chips(count: u64, rate: u32) -> Self {
        assert!(
            rate > 0 && TICKS_PER_SECOND % rate as u64 == 0,
            "chip rate {rate} is not representable"
        );
        SimTime(count * (TICKS_PER_SECOND / rate as u64))
    }

    pub const fn from_secs(secs: u64) -> Self {
        SimTime(secs * TICKS_PER_SECOND)
    }

    /// Rounds to the nearest tick. Negative or non-finite input maps to zero.
    pub fn from_secs_f64(secs: f64) -> Self {
        if !secs.is_finite() || secs <= 0.0 {
            return SimTime::ZERO;
        }
        SimTime((secs * TICKS_PER_SECOND as f64).round() as u64)
    }

    pub fn from_millis_f64(ms: f64) -> Self {
        if !ms.is_finite() || ms <= 0.0 {
            return SimTime::ZERO;
        }
        SimTime((ms * TICKS_PER_MILLI).round() as u64)
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / TICKS_PER_SECOND as f64
    }

    pub fn as_millis_f64(self) -> f64 {
        self.0 as f64 / TICKS_PER_MILLI
    }

    pub fn checked_sub(self, rhs: SimTime) -> Option<SimTime> {
        self.0.checked_sub(rhs.0).map(SimTime)
    }

    pub fn saturating_sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(rhs.0))
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl Add for SimTime {
    type Output = SimTime;
    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.checked_add(rhs.0).expect("simulation time overflow"))
    }
}

impl AddAssign for SimTime {
    fn add_assign(&mut self, rhs: SimTime) {
        *self = *self + rhs;
    }
}

impl Sub for SimTime {
    type Output = SimTime;
    fn sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.checked_sub(rhs.0).expect("negative simulation time"))
    }
}

impl Mul<u64> for SimTime {
    type Output = SimTime;
    fn mul(self, rhs: u64) -> SimTime {
        SimTime(self.0.checked_mul(rhs).expect("simulation time overflow"))
    }
}

impl Sum for SimTime {
    fn sum<I: Iterator<Item = SimTime>>(iter: I) -> SimTime {
        iter.fold(SimTime::ZERO, Add::add)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}s", self.as_secs_f64())
    }
}
