// Maximum-length spreading codes: generation, balance, autocorrelation.

use std::error::Error;

use wakemod::mls_codec::{CodecError, Lfsr, MlsCode};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let code = MlsCode::default();
    let chips: String = code.chips().iter().map(|&c| if c { '1' } else { '0' }).collect();
    println!("default code, taps {:?}: {chips}", code.taps());

    // Every primitive order-5 feedback polynomial gives a 31-chip sequence
    // with 16 ones and autocorrelation -1 off-peak.
    for taps in [&[5, 3][..], &[5, 2], &[5, 4, 3, 2], &[5, 4, 2, 1], &[5, 3, 2, 1], &[5, 4, 3, 1]] {
        let code = MlsCode::generate(5, taps)?;
        let ones = code.core().iter().filter(|&&c| c).count();
        let off_peak: Vec<i32> = (1..31).map(|s| code.cyclic_autocorrelation(s)).collect();
        let flat = off_peak.iter().all(|&v| v == -1);
        println!("taps {taps:?}: {ones} ones, peak {}, off-peak flat: {flat}", code.cyclic_autocorrelation(0));
    }

    match MlsCode::generate(5, &[5, 4]) {
        Err(CodecError::NotPrimitive { period, expected, .. }) => {
            println!("taps [5, 4] rejected: period {period} instead of {expected}")
        }
        other => println!("unexpected: {other:?}"),
    }

    let mut lfsr = Lfsr::new(7, &[7, 6], 1)?;
    println!("order-7 register period: {}", lfsr.period());
    let _ = lfsr.step();
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
