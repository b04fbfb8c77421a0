//! Maximum-length sequences from a Fibonacci LFSR.

use super::CodecError;

/// Feedback taps of the default code, the primitive polynomial x^5 + x^3 + 1.
pub const DEFAULT_TAPS: [u32; 2] = [5, 3];
pub const DEFAULT_ORDER: u32 = 5;

/// Fibonacci LFSR. Stage `i` (1-based) lives in bit `i - 1`; the output is
/// the last stage and the XOR of the tapped stages is shifted into stage 1.
#[derive(Debug, Clone)]
pub struct Lfsr {
    order: u32,
    tap_mask: u32,
    state: u32,
}

impl Lfsr {
    pub fn new(order: u32, taps: &[u32], seed: u32) -> Result<Self, CodecError> {
        if !(2..=24).contains(&order) {
            return Err(CodecError::InvalidOrder(order));
        }
        let mut tap_mask = 0u32;
        for &t in taps {
            if t == 0 || t > order {
                return Err(CodecError::InvalidTaps {
                    taps: taps.to_vec(),
                    reason: format!("tap {t} outside 1..={order}"),
                });
            }
            tap_mask |= 1 << (t - 1);
        }
        if tap_mask & (1 << (order - 1)) == 0 {
            return Err(CodecError::InvalidTaps {
                taps: taps.to_vec(),
                reason: format!("the last stage {order} must be tapped"),
            });
        }
        let state_mask = (1u32 << order) - 1;
        if seed & state_mask == 0 {
            return Err(CodecError::ZeroSeed);
        }
        Ok(Lfsr {
            order,
            tap_mask,
            state: seed & state_mask,
        })
    }

    pub fn state(&self) -> u32 {
        self.state
    }

    /// Emits the current output chip and advances one step.
    pub fn step(&mut self) -> bool {
        let out = (self.state >> (self.order - 1)) & 1 == 1;
        let feedback = (self.state & self.tap_mask).count_ones() & 1;
        let mask = (1u32 << self.order) - 1;
        self.state = ((self.state << 1) | feedback) & mask;
        out
    }

    /// Number of steps until the register returns to its current state.
    pub fn period(&self) -> usize {
        let mut probe = self.clone();
        let start = probe.state;
        let limit = 1usize << self.order;
        for n in 1..=limit {
            probe.step();
            if probe.state == start {
                return n;
            }
        }
        // Unreachable with the last stage tapped: the update is a bijection.
        limit
    }
}

/// One spreading code: a maximum-length sequence of period `2^order - 1`
/// plus a trailing copy of its first chip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MlsCode {
    order: u32,
    taps: Vec<u32>,
    chips: Vec<bool>,
}

impl MlsCode {
    /// Generates the code for `taps` from the all-ones seed. Taps that do not
    /// form a primitive polynomial are rejected by the period check.
    pub fn generate(order: u32, taps: &[u32]) -> Result<Self, CodecError> {
        let seed = (1u32 << order.min(31)).wrapping_sub(1);
        let mut lfsr = Lfsr::new(order, taps, seed)?;
        let expected = (1usize << order) - 1;
        let period = lfsr.period();
        if period != expected {
            return Err(CodecError::NotPrimitive {
                taps: taps.to_vec(),
                period,
                expected,
            });
        }
        let mut chips: Vec<bool> = (0..expected).map(|_| lfsr.step()).collect();
        chips.push(chips[0]);
        let mut taps = taps.to_vec();
        taps.sort_unstable_by(|a, b| b.cmp(a));
        taps.dedup();
        Ok(MlsCode { order, taps, chips })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn taps(&self) -> &[u32] {
        &self.taps
    }

    /// All `2^order` chips sent on air per logical bit.
    pub fn chips(&self) -> &[bool] {
        &self.chips
    }

    /// The `2^order - 1` chip maximum-length core without the padding chip.
    pub fn core(&self) -> &[bool] {
        &self.chips[..self.chips.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    /// Cyclic autocorrelation of the +/-1 mapped core at `shift`.
    pub fn cyclic_autocorrelation(&self, shift: usize) -> i32 {
        let core = self.core();
        let n = core.len();
        (0..n)
            .map(|i| {
                if core[i] == core[(i + shift) % n] {
                    1
                } else {
                    -1
                }
            })
            .sum()
    }
}

impl Default for MlsCode {
    fn default() -> Self {
        MlsCode::generate(DEFAULT_ORDER, &DEFAULT_TAPS).expect("default taps are primitive")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_code_has_32_chips_and_is_balanced() {
        let code = MlsCode::default();
        assert_eq!(code.len(), 32);
        let ones = code.core().iter().filter(|&&c| c).count();
        assert_eq!(ones, 16);
        assert_eq!(code.core().len() - ones, 15);
        assert_eq!(code.chips()[31], code.chips()[0]);
    }

    #[test]
    fn default_code_autocorrelation_is_two_valued() {
        let code = MlsCode::default();
        assert_eq!(code.cyclic_autocorrelation(0), 31);
        for shift in 1..31 {
            assert_eq!(code.cyclic_autocorrelation(shift), -1, "shift {shift}");
        }
    }

    #[test]
    fn non_primitive_taps_are_rejected() {
        // x^5 + x^4 + 1 = (x^2 + x + 1)(x^3 + x + 1)
        match MlsCode::generate(5, &[5, 4]) {
            Err(CodecError::NotPrimitive { period, expected, .. }) => {
                assert_eq!(expected, 31);
                assert_ne!(period, 31);
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn taps_must_include_last_stage() {
        assert!(matches!(
            MlsCode::generate(5, &[3, 2]),
            Err(CodecError::InvalidTaps { .. })
        ));
        assert!(matches!(
            MlsCode::generate(5, &[6, 5]),
            Err(CodecError::InvalidTaps { .. })
        ));
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(
            MlsCode::generate(5, &[5, 3]).unwrap(),
            MlsCode::generate(5, &[3, 5]).unwrap()
        );
    }
}
