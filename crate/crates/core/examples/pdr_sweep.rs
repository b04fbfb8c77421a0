// Monte-Carlo delivery ratio from full simulated wake-ups, next to the
// model curve.

use std::error::Error;

use wakemod::cli::pdr_sweep;
use wakemod::{LinkParams, ModelData, PowerModel};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let data = ModelData::bundled();
    let power = PowerModel::from_data(&data)?;
    let link = LinkParams::from_data(&data, "paper")?;
    let distances = [10.0, 100.0, 115.0, 125.0, 130.0, 150.0];
    let points = pdr_sweep(&power, &link, &distances, 400, 2.8, 7)?;
    println!("distance_m,pdr_model,pdr_empirical");
    for p in points {
        println!("{},{:.4},{:.4}", p.sample.distance_m, p.sample.pdr, p.empirical());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
