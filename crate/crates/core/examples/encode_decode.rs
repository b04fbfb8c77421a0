// Build a wake-up call, look at its chips and airtime, then recover it
// from a noisy copy with the sliding correlator.

use std::error::Error;

use wakemod::mls_codec::{airtime, chip_flip_noise, encode_frame, Decoder};
use wakemod::{RadioConfig, WucFrame};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = RadioConfig::new(1024, 32768, 0xBEEF)?;
    let frame = WucFrame::new(0xBEEF, vec![0x01, 0x02, 0x03])?;
    let stream = encode_frame(&frame, &cfg);
    let air = airtime(&cfg, frame.payload_bits());
    println!(
        "{} chips, preamble {:.3} ms + body {:.3} ms = {:.3} ms",
        stream.len(),
        air.preamble.as_millis_f64(),
        air.body.as_millis_f64(),
        air.total().as_millis_f64()
    );
    println!("longest carrier-off run: {:.3} ms", stream.longest_off_run().as_millis_f64());

    let decoder = Decoder::new(&cfg, 0.7)?;
    for p in [0.0, 0.05, 0.1, 0.2, 0.3] {
        let noisy = chip_flip_noise(&stream, p, 11)?;
        match decoder.decode(&noisy) {
            Ok(Some(d)) => println!(
                "flip {p:.2}: preamble score {:.3}, address 0x{:04x}, payload {:02x?}, weakest bit |corr| {}",
                d.preamble_score,
                d.frame.address(),
                d.frame.payload(),
                d.bit_correlations.iter().map(|c| c.abs()).min().unwrap_or(0)
            ),
            Ok(None) => println!("flip {p:.2}: no preamble"),
            // A late false preamble can leave too little stream for an address.
            Err(e) => println!("flip {p:.2}: {e}"),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
