use super::{Chip, ChipStream, RadioConfig, WucFrame, ADDRESS_BITS};
use crate::time::SimTime;

/// On-air time of a wake-up call split into its two rate regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Airtime {
    /// One code interval at the low data rate.
    pub preamble: SimTime,
    /// Address and payload bits at the high data rate.
    pub body: SimTime,
}

impl Airtime {
    pub fn total(&self) -> SimTime {
        self.preamble + self.body
    }
}

/// Airtime for a frame with `payload_bits` payload bits after the address.
pub fn airtime(cfg: &RadioConfig, payload_bits: usize) -> Airtime {
    let code_len = cfg.code().len() as u64;
    Airtime {
        preamble: SimTime::from_chips(code_len, cfg.ldr().bps()),
        body: SimTime::from_chips(
            (ADDRESS_BITS + payload_bits) as u64 * code_len,
            cfg.hdr().bps(),
        ),
    }
}

pub fn encode_frame(frame: &WucFrame, cfg: &RadioConfig) -> ChipStream {
    let code = cfg.code().chips();
    let ldr_chip = cfg.ldr().chip_duration();
    let hdr_chip = cfg.hdr().chip_duration();

    let body_bits = ADDRESS_BITS + frame.payload_bits();
    let mut chips = Vec::with_capacity(code.len() * (1 + body_bits));
    chips.extend(code.iter().map(|&on| Chip {
        on,
        duration: ldr_chip,
    }));
    for bit in frame.body_bits() {
        chips.extend(code.iter().map(|&c| Chip {
            on: c == bit,
            duration: hdr_chip,
        }));
    }
    ChipStream::new(chips).expect("chip durations are nonzero")
}
