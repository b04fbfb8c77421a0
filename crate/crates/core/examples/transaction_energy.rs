// Energy and latency of one wake-up, broken down per phase, for a slow and
// a fast preamble.

use std::error::Error;

use wakemod::{PowerModel, RadioConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let model = PowerModel::bundled();
    for (ldr, hdr, payload_bits) in [(1024, 32768, 0), (32768, 32768, 0), (1024, 32768, 48)] {
        let cfg = RadioConfig::new(ldr, hdr, 0x0001)?;
        let t = model.transaction(&cfg, payload_bits, 1.8)?;
        println!("ldr {ldr} / hdr {hdr}, {payload_bits} payload bits:");
        for (side, report) in [("sender", &t.sender), ("receiver", &t.receiver)] {
            println!(
                "  {side}: {:.3} µJ in {:.4} ms",
                report.energy_j * 1e6,
                report.duration.as_millis_f64()
            );
            for phase in &report.phases {
                println!(
                    "    {:<17} {:>10.3} µJ {:>9.4} ms",
                    phase.name,
                    phase.energy_j * 1e6,
                    phase.duration.as_millis_f64()
                );
            }
        }
    }

    // Higher supply voltage buys output power at a steep energy cost.
    let cfg = RadioConfig::new(1024, 32768, 1)?;
    for v in [1.8, 2.5, 3.3] {
        let point = model.tx_operating_point(v)?;
        let sender = model.sender_cost(&cfg, 0, v)?;
        println!("{v} V: {:.2} dBm, sender {:.3} mJ", point.tx_power_dbm, sender.energy_j * 1e3);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
