// Drive two modules through the host protocol by hand and watch the event
// trace and the receiver's energy ledger.

use std::error::Error;

use wakemod::device_sim::{CommandResponse, DeliveryMode, DeviceSetup, HostCommand, SimOptions, Simulation};
use wakemod::{LinkParams, ModelData, PowerModel, RadioConfig, SimTime};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let link = LinkParams::from_data(&ModelData::bundled(), "paper")?;
    let options = SimOptions {
        delivery: DeliveryMode::Ideal,
        ..SimOptions::default()
    };
    let mut sim = Simulation::new(PowerModel::bundled(), link, options, 1);
    let gateway = sim.add_device(DeviceSetup::new("gateway", (0.0, 0.0), 1.8));
    let tag = sim.add_device(DeviceSetup::new("tag", (25.0, 0.0), 3.0));

    // Every command starts with SDN low; the module answers and returns to
    // shutdown once the command's measured duration has elapsed.
    sim.pull_sdn_low(tag)?;
    if let CommandResponse::Identity(id) = sim.host_command(tag, HostCommand::WhoAmI)? {
        println!("tag identifies as 0x{id:02x}");
    }
    sim.run_until(SimTime::from_millis_f64(20.0))?;
    for (dev, addr) in [(gateway, 0x0001), (tag, 0x0042)] {
        sim.pull_sdn_low(dev)?;
        sim.host_command(dev, HostCommand::SetupWuR(RadioConfig::new(1024, 32768, addr)?))?;
    }
    sim.run_until(SimTime::from_secs(1))?;

    sim.pull_sdn_low(gateway)?;
    let sent = sim.host_command(
        gateway,
        HostCommand::SendWuC {
            address: 0x0042,
            payload: b"hello!".to_vec(),
            voltage_v: 1.8,
        },
    )?;
    println!("{sent:?}");
    for e in sim.run_until(SimTime::from_secs(2))? {
        println!("{:>12.7} s  {:<8} {:<18} {}", e.time.as_secs_f64(), e.device, e.event, e.detail);
    }

    sim.pull_sdn_low(tag)?;
    if let CommandResponse::IrqReason(regs) = sim.host_command(tag, HostCommand::IrqReason)? {
        println!("tag woke for {:?}, payload {:?}", regs.reason, String::from_utf8_lossy(&regs.payload));
    }
    let horizon = SimTime::from_secs(2);
    for entry in sim.ledger_entries(tag, horizon) {
        println!(
            "  {:>10.6}..{:>10.6} s  {:<14} {:>12.3} µW {:>10.3} µJ",
            entry.start.as_secs_f64(),
            entry.end.as_secs_f64(),
            entry.state,
            entry.power_w * 1e6,
            entry.energy_j * 1e6
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
