// Load a scenario file, run it, and export the event trace and the energy
// ledger as CSV.

use std::error::Error;

use wakemod::device_sim::scenario::{write_ledger_csv, write_trace_csv, ScenarioConfig};
use wakemod::ModelData;

const SCENARIO: &str = include_str!("data/three_tags.toml");

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let scenario = ScenarioConfig::parse(SCENARIO)?;
    let sim = scenario.run(&ModelData::bundled(), None)?;
    for r in sim.receptions() {
        println!("{} <- {:?}", sim.device(r.receiver).name(), r.outcome);
    }
    let mut trace = Vec::new();
    write_trace_csv(&sim, &mut trace)?;
    print!("{}", String::from_utf8(trace)?);
    let mut ledger = Vec::new();
    write_ledger_csv(&sim, scenario.horizon()?, &mut ledger)?;
    print!("{}", String::from_utf8(ledger)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
