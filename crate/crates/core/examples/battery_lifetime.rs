// Coin-cell lifetime of a wake-up-driven e-ink tag versus update rate.

use std::error::Error;

use wakemod::lifetime::{self, DutyEvent, DutyProfile};
use wakemod::{ModelData, PowerModel};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let data = ModelData::bundled();
    let model = PowerModel::from_data(&data)?;
    let battery = lifetime::battery_from_data(&data, "cr2032")?;
    let tag = lifetime::profile_from_data(&data, &model, "waketag")?;

    for (label, rate) in [("every 10 s", 0.1), ("hourly", 1.0 / 3600.0), ("daily", 1.0 / 86_400.0), ("never", 0.0)] {
        let r = lifetime::lifetime(&battery, &tag.with_rate(rate));
        println!("{label:<11} {:>9.3} days = {:>6.3} years", r.lifetime_days(), r.lifetime_years());
    }

    // A custom profile: a sensor that only listens and handles a short
    // interrupt once a minute.
    let sensor = DutyProfile::new(
        6.88e-6,
        vec![DutyEvent {
            label: "irq".into(),
            energy_j: 15.88e-6,
            rate_hz: 1.0 / 60.0,
        }],
    )?;
    let r = lifetime::lifetime(&battery, &sensor);
    println!("listening sensor: {:.2} years", r.lifetime_years());
    for (source, watts) in &r.breakdown {
        println!("  {source:<6} {:.3} µW", watts * 1e6);
    }

    let rates = lifetime::log_spaced_rates(1e-6, 1.0, 7)?;
    print!("{}", lifetime::sweep_csv(&lifetime::sweep(&battery, &tag, &rates)?));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
