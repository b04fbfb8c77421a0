//! Reproduction acceptance suite. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wakemod::cli::{self, Check, TransactionArgs};
use wakemod::device_sim::{DeliveryMode, DeviceSetup, HostCommand, SimOptions, Simulation};
use wakemod::link_model::{self, LinkParams};
use wakemod::mls_codec::{airtime, chip_flip_noise, decode_stream, encode_frame, MlsCode};
use wakemod::{ModelData, PowerModel, RadioConfig, SimTime, WucFrame};

type Outcome = Result<String, String>;

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("timing arithmetic", timing),
        ("transaction reproduction", transaction),
        ("table fidelity", tables),
        ("link consistency", link),
        ("pdr reproduction", pdr),
        ("lifetime reproduction", lifetime_cases),
        ("property suites", properties),
        ("decoder robustness oracle", decoder_oracle),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let result = f();
        let secs = t0.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS {name} ({secs:.2} s) {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({secs:.2} s) {detail}", i + 1)
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn from_checks(checks: &[Check]) -> Outcome {
    match checks.iter().find(|c| !c.passed) {
        None => Ok(format!("{} checks", checks.len())),
        Some(c) => Err(format!("{}: {}", c.name, c.detail)),
    }
}

fn timing() -> Outcome {
    let cfg = RadioConfig::new(1024, 32768, 0).unwrap();
    let air = airtime(&cfg, 0);
    let stream = encode_frame(&WucFrame::address_only(0), &cfg);
    let total = SimTime::from_secs_f64(0.046875);
    let preamble = SimTime::from_secs_f64(0.03125);
    if air.total() == total && air.preamble == preamble && stream.total_duration() == total {
        Ok(format!("total {} preamble {}", air.total(), air.preamble))
    } else {
        Err(format!("total {} preamble {} stream {}", air.total(), air.preamble, stream.total_duration()))
    }
}

fn transaction() -> Outcome {
    let out = cli::cmd_transaction(
        &ModelData::bundled(),
        &TransactionArgs {
            voltage: 1.8,
            ..TransactionArgs::default()
        },
    )
    .map_err(|e| e.to_string())?;
    // Reference comparisons plus analytic/simulated agreement for each side.
    if out.checks.len() != 12 {
        return Err(format!("expected 12 checks, got {}", out.checks.len()));
    }
    from_checks(&out.checks)
}

fn tables() -> Outcome {
    let data = ModelData::bundled();
    let report = cli::cmd_tables(&data).map_err(|e| e.to_string())?.report;
    let mut expected = Vec::new();
    for r in &data.idle_listen {
        expected.push(format!("{} bit/s, {} µW", r.rate_bps, r.power_uw));
    }
    for r in &data.tx {
        expected.push(format!("{} V, {} dBm, {} mW", r.voltage_v, r.tx_power_dbm, r.consumption_mw));
    }
    for r in &data.aux {
        let (e, unit) = match (r.energy_uj, r.energy_mj) {
            (Some(v), None) => (v, "µJ"),
            (None, Some(v)) => (v, "mJ"),
            _ => return Err(format!("aux row {} lacks a single energy", r.op)),
        };
        expected.push(format!("{}, {e} {unit}, {} ms", r.op, r.duration_ms));
    }
    // Re-parse every printed number and compare bit-for-bit with the file.
    let printed: Vec<f64> = report
        .lines()
        .take_while(|l| !l.starts_with("Derived"))
        .filter(|l| l.starts_with("  "))
        .flat_map(|l| {
            l.split([',', ' '])
                .filter_map(|w| w.parse::<f64>().ok())
                .collect::<Vec<_>>()
        })
        .collect();
    let loaded: Vec<f64> = data
        .idle_listen
        .iter()
        .flat_map(|r| [r.rate_bps as f64, r.power_uw])
        .chain(data.tx.iter().flat_map(|r| [r.voltage_v, r.tx_power_dbm, r.consumption_mw]))
        .chain(
            data.aux
                .iter()
                .flat_map(|r| [r.energy_uj.or(r.energy_mj).unwrap_or(f64::NAN), r.duration_ms]),
        )
        .collect();
    if let Some(line) = expected.iter().find(|l| !report.contains(l.as_str())) {
        return Err(format!("missing line `{line}`"));
    }
    let same = printed.len() == loaded.len() && printed.iter().zip(&loaded).all(|(a, b)| a.to_bits() == b.to_bits());
    if !same {
        return Err(format!("printed {printed:?} vs loaded {loaded:?}"));
    }
    Ok(format!("{} rows, {} values bit-exact", expected.len(), printed.len()))
}

fn link() -> Outcome {
    let params = LinkParams::from_data(&ModelData::bundled(), "paper").map_err(|e| e.to_string())?;
    let rssi = link_model::rssi(100.0, 2.8, &params).map_err(|e| e.to_string())?;
    let ok = (rssi - -72.62).abs() <= 0.5 && params.carrier_freq_mhz == 868.35 && params.path_loss_exponent == 2.0;
    let detail = format!("rssi(100 m) = {rssi:.4} dBm");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn pdr() -> Outcome {
    let data = ModelData::bundled();
    let power = PowerModel::from_data(&data).map_err(|e| e.to_string())?;
    let params = LinkParams::from_data(&data, "paper").map_err(|e| e.to_string())?;
    let tx = data.link["paper"].calibration_tx_power_dbm;
    for d in (10..=1000).map(|i| i as f64 / 10.0) {
        let p = link_model::pdr_at(d.max(1.0), tx, &params).map_err(|e| e.to_string())?;
        if p < 0.94 - 1e-9 {
            return Err(format!("model pdr {p} at {d} m"));
        }
    }
    let points = cli::pdr_sweep(&power, &params, &[130.0, 150.0], 10_000, tx, 2024).map_err(|e| e.to_string())?;
    let (at130, at150) = (points[0], points[1]);
    let detail = format!(
        "model >= 0.94 on 1..100 m, empirical {:.4} at 130 m, {} deliveries at 150 m",
        at130.empirical(),
        at150.delivered
    );
    if (at130.empirical() - 0.11).abs() <= 0.01 && at150.delivered == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lifetime_cases() -> Outcome {
    let out = cli::cmd_lifetime(&ModelData::bundled(), &cli::LifetimeArgs::default()).map_err(|e| e.to_string())?;
    let details: Vec<String> = out.checks.iter().map(|c| c.detail.clone()).collect();
    from_checks(&out.checks).map(|_| details.join(", "))
}

const PRIMITIVE_TAPS: [&[u32]; 6] = [&[5, 3], &[5, 2], &[5, 4, 3, 2], &[5, 4, 2, 1], &[5, 3, 2, 1], &[5, 4, 3, 1]];

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rates = [1024u32, 2048, 4096, 8192, 16384, 32768];

    // Codec roundtrip.
    let pairs = 10_000;
    for i in 0..pairs {
        let ldr = rates[rng.gen_range(0..rates.len())];
        let hdr = *rates.iter().filter(|&&r| r >= ldr).nth(rng.gen_range(0..rates.iter().filter(|&&r| r >= ldr).count())).unwrap();
        let taps = PRIMITIVE_TAPS[rng.gen_range(0..PRIMITIVE_TAPS.len())];
        let cfg = RadioConfig::with_code(ldr, hdr, 0, MlsCode::generate(5, taps).unwrap()).unwrap();
        let len = rng.gen_range(0..=6);
        let frame = WucFrame::new(rng.gen(), (0..len).map(|_| rng.gen()).collect::<Vec<u8>>()).unwrap();
        let got = decode_stream(&encode_frame(&frame, &cfg), &cfg, 0.8).map_err(|e| e.to_string())?;
        if got.as_ref() != Some(&frame) {
            return Err(format!("roundtrip #{i} failed for {frame:?} at {ldr}/{hdr}: {got:?}"));
        }
    }

    // Balance and two-valued autocorrelation of every primitive tap set.
    for taps in PRIMITIVE_TAPS {
        let code = MlsCode::generate(5, taps).map_err(|e| e.to_string())?;
        let ones = code.core().iter().filter(|&&c| c).count();
        if ones != 16 {
            return Err(format!("taps {taps:?}: {ones} ones in 31 chips"));
        }
        if code.cyclic_autocorrelation(0) != 31 || (1..31).any(|s| code.cyclic_autocorrelation(s) != -1) {
            return Err(format!("taps {taps:?}: autocorrelation not two-valued"));
        }
    }

    // Ledger tiling and additivity over randomized scenarios.
    let power = PowerModel::bundled();
    let link = LinkParams::from_data(&ModelData::bundled(), "paper").unwrap();
    for s in 0..50u64 {
        let sim = random_scenario(&power, &link, s)?;
        let horizon = SimTime::from_secs(20);
        for dev in sim.devices() {
            let entries = dev.ledger.entries(horizon);
            let tiled = entries.first().map(|e| e.start) == Some(SimTime::ZERO)
                && entries.last().map(|e| e.end) == Some(horizon)
                && entries.windows(2).all(|w| w[0].end == w[1].start)
                && entries.iter().all(|e| e.end > e.start && e.energy_j >= 0.0);
            if !tiled {
                return Err(format!("scenario {s}: ledger of {} does not tile", dev.name()));
            }
            let total = dev.ledger.total_energy(horizon);
            let mid = SimTime::from_secs(7);
            let split = dev.ledger.energy_between(SimTime::ZERO, mid) + dev.ledger.energy_between(mid, horizon);
            if (split - total).abs() > 1e-12 * total.max(1e-9) {
                return Err(format!("scenario {s}: split {split} vs total {total}"));
            }
        }
    }

    // Determinism.
    let a = random_scenario(&power, &link, 99)?;
    let b = random_scenario(&power, &link, 99)?;
    if a.trace() != b.trace() || a.trace().is_empty() {
        return Err("same seed produced different traces".into());
    }
    Ok(format!("{pairs} roundtrips, 6 tap sets, 50 ledgers, {} identical events", a.trace().len()))
}

fn random_scenario(power: &PowerModel, link: &LinkParams, seed: u64) -> Result<Simulation, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let options = SimOptions {
        delivery: DeliveryMode::ChipFlip { flip_prob: 0.05 },
        ..SimOptions::default()
    };
    let mut sim = Simulation::new(power.clone(), link.clone(), options, seed);
    let n = rng.gen_range(2..=4);
    let ids: Vec<_> = (0..n)
        .map(|i| sim.add_device(DeviceSetup::new(format!("d{i}"), (rng.gen_range(0.0..120.0), 0.0), 1.8)))
        .collect();
    for (i, &id) in ids.iter().enumerate() {
        let cfg = RadioConfig::new(1024, 32768, i as u16).unwrap();
        sim.schedule_command(SimTime::from_millis_f64(rng.gen_range(0.0..500.0)), id, HostCommand::SetupWuR(cfg))
            .map_err(|e| e.to_string())?;
    }
    for _ in 0..rng.gen_range(5..30) {
        let id = ids[rng.gen_range(0..n)];
        let at = SimTime::from_millis_f64(rng.gen_range(0.0..19_000.0));
        let cmd = match rng.gen_range(0..4) {
            0 => HostCommand::WhoAmI,
            1 => HostCommand::IrqReason,
            _ => HostCommand::SendWuC {
                address: rng.gen_range(0..n as u16),
                payload: vec![rng.gen(); rng.gen_range(0..=6)],
                voltage_v: 1.8,
            },
        };
        sim.schedule_command(at, id, cmd).map_err(|e| e.to_string())?;
    }
    sim.run_until(SimTime::from_secs(20)).map_err(|e| e.to_string())?;
    Ok(sim)
}

/// Exhaustive maximum-likelihood address decision over all 2^16 candidates,
/// visited in Gray-code order so each step updates the Hamming distance by
/// one bit's contribution.
fn ml_address(body: &[bool], code: &[bool]) -> Vec<u16> {
    let n = code.len();
    // Distance of each bit slot to the code (bit 1) and to its complement (bit 0).
    let per_bit: Vec<(u32, u32)> = (0..16)
        .map(|b| {
            let slot = &body[b * n..(b + 1) * n];
            let d1 = slot.iter().zip(code).filter(|(r, c)| r != c).count() as u32;
            (n as u32 - d1, d1)
        })
        .collect();
    let mut addr: u16 = 0;
    let mut dist: u32 = per_bit.iter().map(|p| p.0).sum();
    let mut best = dist;
    let mut winners = vec![addr];
    for i in 1u32..(1 << 16) {
        let flip = i.trailing_zeros() as usize; // bit position counted from the LSB
        let slot = 15 - flip;
        let (d0, d1) = per_bit[slot];
        if addr & (1 << flip) == 0 {
            dist = dist - d0 + d1;
        } else {
            dist = dist - d1 + d0;
        }
        addr ^= 1 << flip;
        if dist < best {
            best = dist;
            winners.clear();
            winners.push(addr);
        } else if dist == best {
            winners.push(addr);
        }
    }
    winners
}

fn decoder_oracle() -> Outcome {
    let cfg = RadioConfig::new(1024, 32768, 0).unwrap();
    let code = cfg.code().chips().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let trials = 1000;
    let mut agree = 0;
    let mut detected = 0;
    for t in 0..trials {
        let frame = WucFrame::address_only(rng.gen());
        let noisy = chip_flip_noise(&encode_frame(&frame, &cfg), 0.1, t).map_err(|e| e.to_string())?;
        let levels: Vec<bool> = noisy.levels().collect();
        let oracle = ml_address(&levels[code.len()..], &code);
        if let Ok(Some(d)) = decode_stream(&noisy, &cfg, 0.7) {
            detected += 1;
            if oracle.contains(&d.address()) {
                agree += 1;
            }
        }
    }
    let rate = agree as f64 / trials as f64;
    let detail = format!("{agree}/{trials} frames match the ML oracle ({detected} detected)");
    if rate >= 0.95 {
        Ok(detail)
    } else {
        Err(detail)
    }
}
