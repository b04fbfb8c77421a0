//! Chip-level wake-up call codec.
//!
//! A wake-up call goes on air as one spreading code at the low data rate
//! (the preamble), followed by the 16 address bits and an optional payload
//! of up to six bytes at the high data rate. Each logical bit is one full
//! code interval: a `1` sends the code, a `0` sends its complement.

mod decode;
mod encode;
pub mod golden;
mod mls;
mod noise;

pub use decode::{decode_stream, Decoded, Decoder, DEFAULT_THRESHOLD};
pub use encode::{airtime, encode_frame, Airtime};
pub use mls::{Lfsr, MlsCode, DEFAULT_ORDER, DEFAULT_TAPS};
pub use noise::chip_flip_noise;

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::time::SimTime;

/// Largest payload the receiver FIFO holds.
pub const MAX_PAYLOAD_BYTES: usize = 6;
pub const ADDRESS_BITS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodecError {
    #[error("LFSR order {0} is outside the supported range 2..=24")]
    InvalidOrder(u32),
    #[error("invalid taps {taps:?}: {reason}")]
    InvalidTaps { taps: Vec<u32>, reason: String },
    #[error("taps {taps:?} are not primitive: period {period}, expected {expected}")]
    NotPrimitive {
        taps: Vec<u32>,
        period: usize,
        expected: usize,
    },
    #[error("LFSR seed must be nonzero")]
    ZeroSeed,
    #[error("unsupported data rate {0} bit/s (expected a power of two in 256..=32768)")]
    UnsupportedRate(u32),
    #[error("high data rate {hdr} bit/s is below low data rate {ldr} bit/s")]
    RateOrder { ldr: u32, hdr: u32 },
    #[error("spreading code must have 32 chips, got {0}")]
    CodeLength(usize),
    #[error("payload of {0} bytes exceeds the {MAX_PAYLOAD_BYTES}-byte limit")]
    PayloadTooLong(usize),
    #[error("correlation threshold {0} outside (0.5, 1]")]
    InvalidThreshold(f64),
    #[error("flip probability {0} outside [0, 1]")]
    InvalidFlipProbability(f64),
    #[error("chip {index} has zero duration")]
    ZeroDuration { index: usize },
    #[error("malformed frame: {0}")]
    MalformedFrame(String),
}

/// A chip rate in bit/s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct DataRate(u32);

impl DataRate {
    pub const ALL: [u32; 8] = [256, 512, 1024, 2048, 4096, 8192, 16384, 32768];

    pub fn new(bps: u32) -> Result<Self, CodecError> {
        if Self::ALL.contains(&bps) {
            Ok(DataRate(bps))
        } else {
            Err(CodecError::UnsupportedRate(bps))
        }
    }

    pub fn bps(self) -> u32 {
        self.0
    }

    pub fn chip_duration(self) -> SimTime {
        SimTime::from_chips(1, self.0)
    }
}

impl TryFrom<u32> for DataRate {
    type Error = CodecError;
    fn try_from(v: u32) -> Result<Self, Self::Error> {
        DataRate::new(v)
    }
}

impl From<DataRate> for u32 {
    fn from(r: DataRate) -> u32 {
        r.0
    }
}

impl fmt::Display for DataRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bit/s", self.0)
    }
}

/// Wake-up radio configuration shared by sender and receiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadioConfig {
    ldr: DataRate,
    hdr: DataRate,
    address: u16,
    code: MlsCode,
}

impl RadioConfig {
    pub fn new(ldr: u32, hdr: u32, address: u16) -> Result<Self, CodecError> {
        Self::with_code(ldr, hdr, address, MlsCode::default())
    }

    pub fn with_code(ldr: u32, hdr: u32, address: u16, code: MlsCode) -> Result<Self, CodecError> {
        let ldr = DataRate::new(ldr)?;
        let hdr = DataRate::new(hdr)?;
        if hdr < ldr {
            return Err(CodecError::RateOrder {
                ldr: ldr.bps(),
                hdr: hdr.bps(),
            });
        }
        if code.len() != 32 {
            return Err(CodecError::CodeLength(code.len()));
        }
        Ok(RadioConfig {
            ldr,
            hdr,
            address,
            code,
        })
    }

    pub fn ldr(&self) -> DataRate {
        self.ldr
    }

    pub fn hdr(&self) -> DataRate {
        self.hdr
    }

    pub fn address(&self) -> u16 {
        self.address
    }

    pub fn code(&self) -> &MlsCode {
        &self.code
    }

    pub fn with_address(&self, address: u16) -> Self {
        RadioConfig {
            address,
            ..self.clone()
        }
    }

    /// Lowest chip rate in use.
    pub fn min_rate(&self) -> DataRate {
        self.ldr.min(self.hdr)
    }
}

/// Logical wake-up call.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WucFrame {
    address: u16,
    payload: Vec<u8>,
}

impl WucFrame {
    pub fn new(address: u16, payload: impl Into<Vec<u8>>) -> Result<Self, CodecError> {
        let payload = payload.into();
        if payload.len() > MAX_PAYLOAD_BYTES {
            return Err(CodecError::PayloadTooLong(payload.len()));
        }
        Ok(WucFrame { address, payload })
    }

    pub fn address_only(address: u16) -> Self {
        WucFrame {
            address,
            payload: Vec::new(),
        }
    }

    pub fn address(&self) -> u16 {
        self.address
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    pub fn payload_bits(&self) -> usize {
        self.payload.len() * 8
    }

    /// Logical bits after the preamble, MSB first.
    pub fn body_bits(&self) -> impl Iterator<Item = bool> + '_ {
        let addr = (0..ADDRESS_BITS).map(move |i| (self.address >> (15 - i)) & 1 == 1);
        let payload = self
            .payload
            .iter()
            .flat_map(|b| (0..8).map(move |i| (b >> (7 - i)) & 1 == 1));
        addr.chain(payload)
    }
}

/// One on-air chip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Chip {
    pub on: bool,
    pub duration: SimTime,
}

/// Timed sequence of OOK chips.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChipStream {
    chips: Vec<Chip>,
    total_duration: SimTime,
}

impl ChipStream {
    pub fn new(chips: Vec<Chip>) -> Result<Self, CodecError> {
        if let Some(index) = chips.iter().position(|c| c.duration.is_zero()) {
            return Err(CodecError::ZeroDuration { index });
        }
        let total_duration = chips.iter().map(|c| c.duration).sum();
        Ok(ChipStream {
            chips,
            total_duration,
        })
    }

    /// `count` chips all at `level`, each lasting one chip at `rate`.
    pub fn constant(level: bool, count: usize, rate: DataRate) -> Self {
        let duration = rate.chip_duration();
        ChipStream::new(vec![Chip { on: level, duration }; count]).expect("nonzero chip duration")
    }

    pub fn chips(&self) -> &[Chip] {
        &self.chips
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn total_duration(&self) -> SimTime {
        self.total_duration
    }

    pub fn levels(&self) -> impl Iterator<Item = bool> + '_ {
        self.chips.iter().map(|c| c.on)
    }

    /// Appends another stream after this one.
    pub fn concat(mut self, other: &ChipStream) -> Self {
        self.chips.extend_from_slice(&other.chips);
        self.total_duration += other.total_duration;
        self
    }

    /// Longest run of consecutive off chips, measured in time.
    pub fn longest_off_run(&self) -> SimTime {
        let mut best = SimTime::ZERO;
        let mut run = SimTime::ZERO;
        for chip in &self.chips {
            if chip.on {
                run = SimTime::ZERO;
            } else {
                run += chip.duration;
                best = best.max(run);
            }
        }
        best
    }

    pub(crate) fn map_levels(&self, mut f: impl FnMut(bool) -> bool) -> ChipStream {
        ChipStream {
            chips: self
                .chips
                .iter()
                .map(|c| Chip {
                    on: f(c.on),
                    duration: c.duration,
                })
                .collect(),
            total_duration: self.total_duration,
        }
    }
}
