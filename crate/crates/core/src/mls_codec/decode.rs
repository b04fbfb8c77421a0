use super::{ChipStream, CodecError, RadioConfig, WucFrame, ADDRESS_BITS, MAX_PAYLOAD_BYTES};
use crate::time::SimTime;

/// Fraction of matching preamble chips required for detection.
pub const DEFAULT_THRESHOLD: f64 = 0.8;

/// Result of a successful decode.
#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub frame: WucFrame,
    /// Stream time at which the detected preamble starts.
    pub preamble_start: SimTime,
    /// Fraction of preamble chips that matched the code.
    pub preamble_score: f64,
    /// Per-bit correlation against the code, in `-len..=len`. A bit is
    /// decided `1` when its correlation is non-negative.
    pub bit_correlations: Vec<i32>,
}

impl Decoded {
    /// Stream time at which the last decoded bit ends.
    pub fn end(&self, cfg: &RadioConfig) -> SimTime {
        let air = super::airtime(cfg, self.frame.payload_bits());
        self.preamble_start + air.total()
    }
}

/// Sliding correlator over a [`ChipStream`].
///
/// The preamble search slides over every chip boundary of the stream and
/// samples one code interval at the low data rate at chip centers. The frame
/// start is the best-matching offset within one low-rate chip of the first
/// offset whose fraction of matching chips reaches the threshold. Address and payload bits are then hard-decided by the
/// sign of their correlation with the code at the high data rate.
#[derive(Debug, Clone)]
pub struct Decoder<'a> {
    cfg: &'a RadioConfig,
    threshold: f64,
}

impl<'a> Decoder<'a> {
    pub fn new(cfg: &'a RadioConfig, threshold: f64) -> Result<Self, CodecError> {
        if !(threshold > 0.5 && threshold <= 1.0) {
            return Err(CodecError::InvalidThreshold(threshold));
        }
        Ok(Decoder { cfg, threshold })
    }

    pub fn decode(&self, stream: &ChipStream) -> Result<Option<Decoded>, CodecError> {
        let sampler = Sampler::new(stream);
        let code = self.cfg.code().chips();
        let code_len = code.len() as u64;
        let ldr_chip = self.cfg.ldr().chip_duration();
        let hdr_chip = self.cfg.hdr().chip_duration();
        let preamble_len = ldr_chip * code_len;
        let bit_len = hdr_chip * code_len;
        let total = stream.total_duration();

        let needed = (self.threshold * code.len() as f64 - 1e-9).ceil() as usize;
        let matches_at = |start: SimTime| {
            code.iter()
                .enumerate()
                .filter(|&(i, &c)| sampler.level_at(center(start, i, ldr_chip)) == c)
                .count()
        };
        let fits = |start: SimTime| start + preamble_len <= total;
        let Some(first) = sampler
            .starts
            .iter()
            .take_while(|&&s| fits(s))
            .position(|&s| matches_at(s) >= needed)
        else {
            return Ok(None);
        };
        // Every offset less than half a low-rate chip early samples the same
        // chips, so the first crossing can precede the true frame start by
        // several fine chips. Settle on the latest best offset within one chip.
        let window_end = sampler.starts[first] + ldr_chip;
        let (preamble_start, best) = sampler.starts[first..]
            .iter()
            .take_while(|&&s| s < window_end && fits(s))
            .map(|&s| (s, matches_at(s)))
            .fold((sampler.starts[first], 0), |acc, cur| if cur.1 >= acc.1 { cur } else { acc });
        let preamble_score = best as f64 / code.len() as f64;

        let body_start = preamble_start + preamble_len;
        let address_end = body_start + bit_len * ADDRESS_BITS as u64;
        if address_end > total {
            return Err(CodecError::MalformedFrame(format!(
                "address region truncated: stream ends at {} but address needs until {}",
                total, address_end
            )));
        }
        let remaining_bits = ((total - address_end).ticks() / bit_len.ticks()) as usize;
        let payload_bytes = (remaining_bits / 8).min(MAX_PAYLOAD_BYTES);
        let n_bits = ADDRESS_BITS + payload_bytes * 8;

        let bit_correlations: Vec<i32> = (0..n_bits)
            .map(|b| {
                let bit_start = body_start + bit_len * b as u64;
                code.iter()
                    .enumerate()
                    .map(|(i, &c)| {
                        if sampler.level_at(center(bit_start, i, hdr_chip)) == c {
                            1
                        } else {
                            -1
                        }
                    })
                    .sum()
            })
            .collect();
        let bits: Vec<bool> = bit_correlations.iter().map(|&c| c >= 0).collect();

        let address = bits[..ADDRESS_BITS]
            .iter()
            .fold(0u16, |acc, &b| (acc << 1) | b as u16);
        let payload: Vec<u8> = bits[ADDRESS_BITS..]
            .chunks(8)
            .map(|byte| byte.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8))
            .collect();

        Ok(Some(Decoded {
            frame: WucFrame::new(address, payload)?,
            preamble_start,
            preamble_score,
            bit_correlations,
        }))
    }
}

/// Decodes `stream` with `cfg`; `Ok(None)` means no preamble was detected.
pub fn decode_stream(
    stream: &ChipStream,
    cfg: &RadioConfig,
    threshold: f64,
) -> Result<Option<WucFrame>, CodecError> {
    Ok(Decoder::new(cfg, threshold)?.decode(stream)?.map(|d| d.frame))
}

fn center(start: SimTime, index: usize, chip: SimTime) -> SimTime {
    start + chip * index as u64 + SimTime::from_ticks(chip.ticks() / 2)
}

struct Sampler<'s> {
    stream: &'s ChipStream,
    starts: Vec<SimTime>,
}

impl<'s> Sampler<'s> {
    fn new(stream: &'s ChipStream) -> Self {
        let mut t = SimTime::ZERO;
        let starts = stream
            .chips()
            .iter()
            .map(|c| {
                let s = t;
                t += c.duration;
                s
            })
            .collect();
        Sampler { stream, starts }
    }

    /// Level at time `t`; silence outside the stream.
    fn level_at(&self, t: SimTime) -> bool {
        if t >= self.stream.total_duration() {
            return false;
        }
        let idx = self.starts.partition_point(|&s| s <= t);
        idx > 0 && self.stream.chips()[idx - 1].on
    }
}
