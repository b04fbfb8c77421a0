// Path loss, received power and modeled delivery ratio over distance.

use std::error::Error;

use wakemod::link_model::{self, LinkParams};
use wakemod::ModelData;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let data = ModelData::bundled();
    for preset in ["paper", "datasheet"] {
        let params = LinkParams::from_data(&data, preset)?;
        println!(
            "preset `{preset}`: sensitivity {} dBm, PDR midpoint {:.3} dB, slope {:.3} dB",
            params.sensitivity_dbm, params.pdr_midpoint_db, params.pdr_slope_db
        );
        for d in [1.0, 10.0, 50.0, 100.0, 115.0, 130.0, 140.0] {
            let s = link_model::sample(d, 2.8, &params)?;
            println!(
                "  {d:>6.1} m  loss {:>6.2} dB  rssi {:>7.2} dBm  margin {:>6.2} dB  pdr {:.3}",
                link_model::path_loss(d, &params)?,
                s.rssi_dbm,
                s.margin_db,
                s.pdr
            );
        }
    }

    // Refit the logistic from two measured points.
    let params = LinkParams::from_data(&data, "paper")?;
    let m100 = link_model::margin(100.0, 2.8, &params)?;
    let m130 = link_model::margin(130.0, 2.8, &params)?;
    let (mid, slope) = link_model::calibrate_pdr(&[(m100, 0.94), (m130, 0.11)])?;
    println!("refit: midpoint {mid:.4} dB, slope {slope:.4} dB");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
