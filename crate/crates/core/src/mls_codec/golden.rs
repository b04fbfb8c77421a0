//! Plain-text chip vectors.
//!
//! ```text
//! # wakemod chip vector v1
//! # ldr: 1024
//! # hdr: 32768
//! # address: 0x0000
//! # payload: 01 02 03
//! # taps: 5,3
//! # chips: 608
//! 1
//! 1
//! ...
//! ```
//!
//! Header lines start with `#` and carry `key: value` pairs. Every other
//! non-empty line is one chip, `1` for carrier on and `0` for off. The first
//! code-length chips run at `ldr`, the rest at `hdr`. The payload line lists
//! hex bytes separated by spaces and is empty for address-only frames.

use std::fmt::Write as _;

use super::{encode_frame, ChipStream, CodecError, MlsCode, RadioConfig, WucFrame, DEFAULT_ORDER};

pub const MAGIC: &str = "# wakemod chip vector v1";

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenVector {
    pub cfg: RadioConfig,
    pub frame: WucFrame,
    pub chips: Vec<bool>,
}

#[derive(Debug, thiserror::Error)]
pub enum GoldenError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Codec(#[from] CodecError),
}

impl GoldenVector {
    pub fn from_frame(frame: &WucFrame, cfg: &RadioConfig) -> Self {
        GoldenVector {
            cfg: cfg.clone(),
            frame: frame.clone(),
            chips: encode_frame(frame, cfg).levels().collect(),
        }
    }

    /// Rebuilds the timed stream from the chip levels.
    pub fn stream(&self) -> ChipStream {
        let code_len = self.cfg.code().len();
        let chips = self
            .chips
            .iter()
            .enumerate()
            .map(|(i, &on)| super::Chip {
                on,
                duration: if i < code_len {
                    self.cfg.ldr().chip_duration()
                } else {
                    self.cfg.hdr().chip_duration()
                },
            })
            .collect();
        ChipStream::new(chips).expect("chip durations are nonzero")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let taps: Vec<String> = self.cfg.code().taps().iter().map(u32::to_string).collect();
        let payload: Vec<String> = self.frame.payload().iter().map(|b| format!("{b:02x}")).collect();
        writeln!(out, "{MAGIC}").unwrap();
        writeln!(out, "# ldr: {}", self.cfg.ldr().bps()).unwrap();
        writeln!(out, "# hdr: {}", self.cfg.hdr().bps()).unwrap();
        writeln!(out, "# address: 0x{:04x}", self.frame.address()).unwrap();
        writeln!(out, "# payload: {}", payload.join(" ")).unwrap();
        writeln!(out, "# taps: {}", taps.join(",")).unwrap();
        writeln!(out, "# chips: {}", self.chips.len()).unwrap();
        for &c in &self.chips {
            out.push(if c { '1' } else { '0' });
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, GoldenError> {
        let mut ldr = None;
        let mut hdr = None;
        let mut address = None;
        let mut payload = Vec::new();
        let mut taps = None;
        let mut count = None;
        let mut chips = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |msg: String| GoldenError::Parse { line, msg };
            let l = raw.trim();
            if l.is_empty() || l == MAGIC {
                continue;
            }
            if let Some(header) = l.strip_prefix('#') {
                let Some((key, value)) = header.split_once(':') else {
                    continue;
                };
                let value = value.trim();
                match key.trim() {
                    "ldr" => ldr = Some(value.parse::<u32>().map_err(|e| err(format!("ldr: {e}")))?),
                    "hdr" => hdr = Some(value.parse::<u32>().map_err(|e| err(format!("hdr: {e}")))?),
                    "address" => {
                        let hex = value.trim_start_matches("0x");
                        address = Some(
                            u16::from_str_radix(hex, 16).map_err(|e| err(format!("address: {e}")))?,
                        );
                    }
                    "payload" => {
                        payload = value
                            .split_whitespace()
                            .map(|b| u8::from_str_radix(b, 16))
                            .collect::<Result<_, _>>()
                            .map_err(|e| err(format!("payload: {e}")))?;
                    }
                    "taps" => {
                        taps = Some(
                            value
                                .split(',')
                                .map(|t| t.trim().parse::<u32>())
                                .collect::<Result<Vec<_>, _>>()
                                .map_err(|e| err(format!("taps: {e}")))?,
                        );
                    }
                    "chips" => {
                        count = Some(value.parse::<usize>().map_err(|e| err(format!("chips: {e}")))?)
                    }
                    other => return Err(err(format!("unknown header field `{other}`"))),
                }
                continue;
            }
            match l {
                "1" => chips.push(true),
                "0" => chips.push(false),
                other => return Err(err(format!("expected chip `0` or `1`, found `{other}`"))),
            }
        }

        let missing = |field: &str| GoldenError::Parse {
            line: 0,
            msg: format!("missing header field `{field}`"),
        };
        let code = MlsCode::generate(DEFAULT_ORDER, &taps.ok_or_else(|| missing("taps"))?)?;
        let cfg = RadioConfig::with_code(
            ldr.ok_or_else(|| missing("ldr"))?,
            hdr.ok_or_else(|| missing("hdr"))?,
            0,
            code,
        )?;
        let frame = WucFrame::new(address.ok_or_else(|| missing("address"))?, payload)?;
        if let Some(n) = count {
            if n != chips.len() {
                return Err(GoldenError::Parse {
                    line: 0,
                    msg: format!("header declares {n} chips but {} follow", chips.len()),
                });
            }
        }
        Ok(GoldenVector {
            cfg: cfg.with_address(frame.address()),
            frame,
            chips,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_roundtrip() {
        let cfg = RadioConfig::new(2048, 16384, 0xC0DE).unwrap();
        let frame = WucFrame::new(0xC0DE, vec![0x10, 0xFE]).unwrap();
        let v = GoldenVector::from_frame(&frame, &cfg);
        let parsed = GoldenVector::parse(&v.to_text()).unwrap();
        assert_eq!(parsed, v);
        assert_eq!(parsed.stream(), encode_frame(&frame, &cfg));
    }

    #[test]
    fn rejects_bad_chip_line() {
        let text = format!("{MAGIC}\n# ldr: 1024\n# hdr: 1024\n# address: 0x0001\n# payload: \n# taps: 5,3\n1\n2\n");
        match GoldenVector::parse(&text) {
            Err(GoldenError::Parse { line, .. }) => assert_eq!(line, 8),
            other => panic!("unexpected {other:?}"),
        }
    }
}
