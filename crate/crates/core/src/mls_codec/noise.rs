use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ChipStream, CodecError};

/// Inverts each chip independently with probability `flip_prob`.
pub fn chip_flip_noise(
    stream: &ChipStream,
    flip_prob: f64,
    seed: u64,
) -> Result<ChipStream, CodecError> {
    if !(0.0..=1.0).contains(&flip_prob) {
        return Err(CodecError::InvalidFlipProbability(flip_prob));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(stream.map_levels(|on| on ^ rng.gen_bool(flip_prob)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mls_codec::{encode_frame, RadioConfig, WucFrame};

    fn stream() -> ChipStream {
        let cfg = RadioConfig::new(1024, 4096, 0).unwrap();
        encode_frame(&WucFrame::new(0x5A5A, vec![1, 2, 3]).unwrap(), &cfg)
    }

    #[test]
    fn zero_probability_is_identity() {
        let s = stream();
        assert_eq!(chip_flip_noise(&s, 0.0, 9).unwrap(), s);
    }

    #[test]
    fn unit_probability_complements() {
        let s = stream();
        let n = chip_flip_noise(&s, 1.0, 9).unwrap();
        assert!(s.levels().zip(n.levels()).all(|(a, b)| a != b));
        assert_eq!(s.total_duration(), n.total_duration());
    }

    #[test]
    fn invalid_probability() {
        assert!(chip_flip_noise(&stream(), 1.5, 0).is_err());
        assert!(chip_flip_noise(&stream(), -0.1, 0).is_err());
    }

    #[test]
    fn seeded_determinism() {
        let s = stream();
        assert_eq!(
            chip_flip_noise(&s, 0.3, 77).unwrap(),
            chip_flip_noise(&s, 0.3, 77).unwrap()
        );
        assert_ne!(
            chip_flip_noise(&s, 0.3, 77).unwrap(),
            chip_flip_noise(&s, 0.3, 78).unwrap()
        );
    }
}
