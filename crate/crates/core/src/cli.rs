//! Command-line front end: argument definitions, reports and reproduction
//! checks. The `wakemod` binary only parses arguments and prints what
//! [`run`] returns.
//!
//! Every subcommand produces a plain-text report, optionally one CSV table,
//! and a list of [`Check`]s. The process exits non-zero when any check
//! fails, so the binary doubles as a reproduction harness.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use thiserror::Error;

use crate::airtime_energy::{CostReport, EnergyError, PowerModel};
use crate::config::{ConfigError, ModelData};
use crate::device_sim::scenario::{write_ledger_csv, write_trace_csv, ScenarioConfig, ScenarioError};
use crate::device_sim::{end_to_end_wakeup, trial_seed, DeliveryMode, ReceptionOutcome, SimError, SimOptions, WakeupSetup};
use crate::lifetime::{self, LifetimeError};
use crate::link_model::{self, LinkError, LinkParams};
use crate::mls_codec::{CodecError, RadioConfig};
use crate::time::{SimTime, TICKS_PER_SECOND};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Lifetime(#[from] LifetimeError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(name = "wakemod", version, about = "Wake-up radio module models and simulator")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Data file replacing the bundled tables, presets and profiles.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base seed for every random draw.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Monte-Carlo trials per point.
    #[arg(long, global = true)]
    pub trials: Option<u32>,
    /// Write the CSV table here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Link preset name.
    #[arg(long, global = true, default_value = "paper")]
    pub preset: String,
}

impl Default for CommonArgs {
    fn default() -> Self {
        CommonArgs {
            config: None,
            seed: 1,
            trials: None,
            out: None,
            preset: "paper".into(),
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Print the loaded power tables and the derived transaction costs.
    Tables,
    /// Empirical versus modeled delivery ratio over distance.
    PdrSweep(PdrSweepArgs),
    /// Analytic and simulated cost of one wake-up transaction.
    Transaction(TransactionArgs),
    /// Battery lifetime for a duty profile.
    Lifetime(LifetimeArgs),
    /// Run a scenario file and export its trace and energy ledger.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args, Default)]
pub struct PdrSweepArgs {
    /// Comma-separated distances in meters.
    #[arg(long, value_delimiter = ',')]
    pub distances: Option<Vec<f64>>,
    /// Transmit power used for every trial.
    #[arg(long, allow_hyphen_values = true)]
    pub tx_power_dbm: Option<f64>,
}

#[derive(Debug, Clone, Args, Default)]
pub struct TransactionArgs {
    /// Preamble rate; with `--hdr` replaces the two reference configurations.
    #[arg(long, requires = "hdr")]
    pub ldr: Option<u32>,
    #[arg(long, requires = "ldr")]
    pub hdr: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub payload_bytes: usize,
    #[arg(long, default_value_t = 1.8)]
    pub voltage: f64,
}

#[derive(Debug, Clone, Args)]
pub struct LifetimeArgs {
    #[arg(long, default_value = "cr2032")]
    pub battery: String,
    #[arg(long, default_value = "waketag")]
    pub profile: String,
    /// Evaluate a single wake-up rate instead of the reference cases.
    #[arg(long)]
    pub rate_hz: Option<f64>,
    /// Sweep range low end; the CSV covers `--sweep-min..=--sweep-max`.
    #[arg(long, default_value_t = 1.0 / 86_400.0 / 30.0)]
    pub sweep_min_hz: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sweep_max_hz: f64,
    #[arg(long, default_value_t = 61)]
    pub points: usize,
}

impl Default for LifetimeArgs {
    fn default() -> Self {
        LifetimeArgs {
            battery: "cr2032".into(),
            profile: "waketag".into(),
            rate_hz: None,
            sweep_min_hz: 1.0 / 86_400.0 / 30.0,
            sweep_max_hz: 1.0,
            points: 61,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Scenario file (TOML).
    pub scenario: PathBuf,
    /// Also write the per-device energy ledger here.
    #[arg(long)]
    pub ledger_out: Option<PathBuf>,
}

/// One reproduction check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub report: String,
    pub csv: Option<String>,
    /// Ledger CSV for `simulate --ledger-out`.
    pub extra_csv: Option<String>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let data = ModelData::load_or_bundled(cli.common.config.as_deref())?;
    match &cli.command {
        Command::Tables => cmd_tables(&data),
        Command::PdrSweep(a) => cmd_pdr_sweep(&data, &cli.common, a),
        Command::Transaction(a) => cmd_transaction(&data, a),
        Command::Lifetime(a) => cmd_lifetime(&data, a),
        Command::Simulate(a) => cmd_simulate(&data, &cli.common, a),
    }
}

/// Reference configurations: slow preamble, and everything at the top rate.
pub fn reference_configs() -> [(&'static str, RadioConfig); 2] {
    [
        ("A", RadioConfig::new(1024, 32768, 0x0001).expect("valid")),
        ("B", RadioConfig::new(32768, 32768, 0x0001).expect("valid")),
    ]
}

/// Published totals for the reference configurations at 1.8 V without
/// payload: (sender J, sender s, receiver J, receiver s).
pub const REFERENCE_TOTALS: [(&str, f64, f64, f64, f64); 2] = [
    ("A", 1.33e-3, 72.58e-3, 17.75e-6, 54.28e-3),
    ("B", 539.12e-6, 42.3e-3, 17.64e-6, 24.00e-3),
];

/// Relative tolerance against published, rounded figures.
pub const REFERENCE_TOLERANCE: f64 = 0.005;
/// Allowed relative disagreement between analytic and simulated costs.
pub const AGREEMENT_TOLERANCE: f64 = 1e-6;

pub fn cmd_tables(data: &ModelData) -> Result<Outcome, CliError> {
    let model = PowerModel::from_data(data)?;
    let mut r = String::new();
    writeln!(r, "a) Idle listening consumption").unwrap();
    for row in model.idle.rows() {
        writeln!(r, "  {} bit/s, {} µW", row.rate_bps, row.power_uw).unwrap();
    }
    writeln!(r, "b) Power consumption and TX power").unwrap();
    for row in model.tx.rows() {
        writeln!(r, "  {} V, {} dBm, {} mW", row.voltage_v, row.tx_power_dbm, row.consumption_mw).unwrap();
    }
    writeln!(r, "c) Auxiliary operations").unwrap();
    for row in model.aux.rows() {
        writeln!(r, "  {}, {} {}, {} ms", row.op, row.energy, row.unit.symbol(), row.duration_ms).unwrap();
    }
    writeln!(r, "Derived transactions (no payload, 1.8 V)").unwrap();
    for (name, cfg) in reference_configs() {
        let t = model.transaction(&cfg, 0, 1.8)?;
        writeln!(
            r,
            "  config {name} ({}/{} bit/s): sender {} / {}, receiver {} / {}",
            cfg.ldr().bps(),
            cfg.hdr().bps(),
            fmt_energy(t.sender.energy_j),
            fmt_ms(t.sender.duration),
            fmt_energy(t.receiver.energy_j),
            fmt_ms(t.receiver.duration)
        )
        .unwrap();
    }
    Ok(Outcome {
        report: r,
        ..Outcome::default()
    })
}

/// Default sweep: short range up to the calibration anchor, then past the
/// cutoff.
pub fn default_distances() -> Vec<f64> {
    vec![1.1, 5.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0, 110.0, 120.0, 130.0, 140.0, 150.0]
}

pub const DEFAULT_SWEEP_TRIALS: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdrPoint {
    pub sample: link_model::LinkSample,
    pub delivered: u32,
    pub trials: u32,
}

impl PdrPoint {
    pub fn empirical(&self) -> f64 {
        self.delivered as f64 / self.trials as f64
    }
}

/// Runs `trials` end-to-end wake-ups per distance. Distances fan out across
/// worker threads; each trial has its own seed derived from
/// `(seed, distance index, trial)`, so results do not depend on scheduling.
pub fn pdr_sweep(
    power: &PowerModel,
    link: &LinkParams,
    distances: &[f64],
    trials: u32,
    tx_power_dbm: f64,
    seed: u64,
) -> Result<Vec<PdrPoint>, CliError> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let cfg = reference_configs()[0].1.clone();
    distances
        .par_iter()
        .enumerate()
        .map(|(i, &d)| {
            let sample = link_model::sample(d, tx_power_dbm, link)?;
            let point_seed = trial_seed(seed, i as u64);
            let delivered = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut setup = WakeupSetup::new(cfg.clone(), Vec::new(), d);
                    setup.voltage_v = 1.8;
                    setup.tx_power_dbm = Some(tx_power_dbm);
                    let out = end_to_end_wakeup(&setup, power, link, SimOptions::default(), trial_seed(point_seed, t as u64))?;
                    Ok(matches!(out.outcome, ReceptionOutcome::Woken { .. }) as u32)
                })
                .sum::<Result<u32, CliError>>()?;
            Ok(PdrPoint {
                sample,
                delivered,
                trials,
            })
        })
        .collect()
}

pub fn cmd_pdr_sweep(data: &ModelData, common: &CommonArgs, args: &PdrSweepArgs) -> Result<Outcome, CliError> {
    let power = PowerModel::from_data(data)?;
    let link = LinkParams::from_data(data, &common.preset)?;
    let tx_power = match args.tx_power_dbm {
        Some(p) => p,
        None => data.link_preset(&common.preset)?.calibration_tx_power_dbm,
    };
    let distances = args.distances.clone().unwrap_or_else(default_distances);
    let trials = common.trials.unwrap_or(DEFAULT_SWEEP_TRIALS);
    let points = pdr_sweep(&power, &link, &distances, trials, tx_power, common.seed)?;

    let mut csv = String::from("distance_m,rssi_dbm,margin_db,pdr_model,pdr_empirical,trials\n");
    let mut report = format!("PDR sweep, preset `{}`, {tx_power} dBm, {trials} trials per point, seed {}\n", common.preset, common.seed);
    let mut checks = Vec::new();
    for p in &points {
        let s = p.sample;
        writeln!(csv, "{},{},{},{},{},{}", s.distance_m, s.rssi_dbm, s.margin_db, s.pdr, p.empirical(), p.trials).unwrap();
        writeln!(
            report,
            "  {:>7.1} m  rssi {:>8.3} dBm  model {:.4}  empirical {:.4} ({}/{})",
            s.distance_m,
            s.rssi_dbm,
            s.pdr,
            p.empirical(),
            p.delivered,
            p.trials
        )
        .unwrap();
        checks.extend(pdr_checks(p, &link));
    }
    Ok(Outcome {
        report,
        csv: Some(csv),
        checks,
        ..Outcome::default()
    })
}

/// Reference checks that apply at a sweep point, if any.
fn pdr_checks(p: &PdrPoint, link: &LinkParams) -> Vec<Check> {
    let d = p.sample.distance_m;
    let n = p.trials as f64;
    let sigma = |q: f64| 3.0 * (q * (1.0 - q) / n).sqrt();
    let emp = p.empirical();
    let mut out = Vec::new();
    if d <= 100.0 {
        out.push(Check::new(
            format!("model pdr at {d} m >= 0.94"),
            p.sample.pdr >= 0.94 - 1e-9,
            format!("{:.6}", p.sample.pdr),
        ));
        let floor = (0.94 - sigma(0.94)).min(0.85);
        out.push(Check::new(
            format!("empirical pdr at {d} m >= {floor:.3}"),
            emp >= floor,
            format!("{emp:.4}"),
        ));
    }
    if (d - 130.0).abs() < 1e-9 {
        let tol = sigma(0.11).max(0.01);
        out.push(Check::new(
            format!("empirical pdr at 130 m = 0.11 ± {tol:.4}"),
            (emp - 0.11).abs() <= tol,
            format!("{emp:.4}"),
        ));
    }
    if link.max_range_cutoff_m.is_some_and(|c| d > c) {
        out.push(Check::new(
            format!("no deliveries at {d} m"),
            p.delivered == 0,
            format!("{} delivered", p.delivered),
        ));
    }
    out
}

/// Analytic report and simulated energies/durations of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TransactionComparison {
    pub analytic: crate::TransactionReport,
    pub sim_sender_j: f64,
    pub sim_sender: SimTime,
    pub sim_receiver_j: f64,
    pub sim_receiver: SimTime,
}

/// Runs the analytic model and an ideal-link simulation of the same
/// transaction.
pub fn compare_transaction(
    power: &PowerModel,
    link: &LinkParams,
    cfg: &RadioConfig,
    payload_bytes: usize,
    voltage: f64,
) -> Result<TransactionComparison, CliError> {
    let analytic = power.transaction(cfg, payload_bytes * 8, voltage)?;
    let mut setup = WakeupSetup::new(cfg.clone(), vec![0xA5; payload_bytes], 1.0);
    setup.voltage_v = voltage;
    let options = SimOptions {
        delivery: DeliveryMode::Ideal,
        ..SimOptions::default()
    };
    let out = end_to_end_wakeup(&setup, power, link, options, 0)?;
    let (Some(rx_j), Some(rx_t)) = (out.receiver_energy_j, out.receiver_duration) else {
        return Err(CliError::Usage(format!("simulated receiver was not woken: {:?}", out.outcome)));
    };
    Ok(TransactionComparison {
        analytic,
        sim_sender_j: out.sender_energy_j,
        sim_sender: out.sender_duration,
        sim_receiver_j: rx_j,
        sim_receiver: rx_t,
    })
}

fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

pub fn cmd_transaction(data: &ModelData, args: &TransactionArgs) -> Result<Outcome, CliError> {
    let power = PowerModel::from_data(data)?;
    let link = LinkParams::from_data(data, "paper").or_else(|_| {
        data.link
            .keys()
            .next()
            .ok_or_else(|| ConfigError::invalid("link", "no link preset"))
            .and_then(|k| LinkParams::from_data(data, k))
    })?;
    let configs: Vec<(String, RadioConfig)> = match (args.ldr, args.hdr) {
        (Some(l), Some(h)) => vec![("custom".into(), RadioConfig::new(l, h, 0x0001)?)],
        _ => reference_configs().into_iter().map(|(n, c)| (n.to_string(), c)).collect(),
    };
    let reference = args.ldr.is_none() && args.payload_bytes == 0 && args.voltage == 1.8;

    let mut report = String::new();
    let mut csv = String::from("config,side,source,energy_j,duration_s\n");
    let mut checks = Vec::new();
    for (name, cfg) in &configs {
        let c = compare_transaction(&power, &link, cfg, args.payload_bytes, args.voltage)?;
        writeln!(
            report,
            "config {name}: ldr {} bit/s, hdr {} bit/s, {} payload bytes, {} V",
            cfg.ldr().bps(),
            cfg.hdr().bps(),
            args.payload_bytes,
            args.voltage
        )
        .unwrap();
        let sides: [(&str, &CostReport, f64, SimTime); 2] = [
            ("sender", &c.analytic.sender, c.sim_sender_j, c.sim_sender),
            ("receiver", &c.analytic.receiver, c.sim_receiver_j, c.sim_receiver),
        ];
        for (side, a, sim_j, sim_t) in sides {
            writeln!(
                report,
                "  {side:<8}  analytic {} / {}   simulated {} / {}",
                fmt_energy(a.energy_j),
                fmt_ms(a.duration),
                fmt_energy(sim_j),
                fmt_ms(sim_t)
            )
            .unwrap();
            for phase in &a.phases {
                writeln!(report, "      {:<16} {:>12} {:>10}", phase.name, fmt_energy(phase.energy_j), fmt_ms(phase.duration)).unwrap();
            }
            writeln!(csv, "{name},{side},analytic,{:e},{}", a.energy_j, a.duration.as_secs_f64()).unwrap();
            writeln!(csv, "{name},{side},simulated,{:e},{}", sim_j, sim_t.as_secs_f64()).unwrap();
            let de = rel_diff(sim_j, a.energy_j);
            let dt = rel_diff(sim_t.as_secs_f64(), a.duration.as_secs_f64());
            checks.push(Check::new(
                format!("config {name} {side}: simulated agrees with analytic"),
                de <= AGREEMENT_TOLERANCE && dt <= AGREEMENT_TOLERANCE,
                format!("energy {de:.2e}, duration {dt:.2e} relative"),
            ));
        }
        if reference {
            if let Some(&(_, sj, st, rj, rt)) = REFERENCE_TOTALS.iter().find(|r| r.0 == name) {
                for (what, got, want) in [
                    ("sender energy", c.analytic.sender.energy_j, sj),
                    ("sender latency", c.analytic.sender.duration.as_secs_f64(), st),
                    ("receiver energy", c.analytic.receiver.energy_j, rj),
                    ("receiver latency", c.analytic.receiver.duration.as_secs_f64(), rt),
                ] {
                    let d = rel_diff(got, want);
                    checks.push(Check::new(
                        format!("config {name} {what} within 0.5% of {want:e}"),
                        d <= REFERENCE_TOLERANCE,
                        format!("{got:e} ({:.3}%)", d * 100.0),
                    ));
                }
            }
        }
    }
    Ok(Outcome {
        report,
        csv: Some(csv),
        checks,
        ..Outcome::default()
    })
}

/// Reference duty cases: label, wake-up rate, accepted lifetime range in
/// seconds.
pub fn lifetime_cases() -> [(&'static str, f64, f64, f64); 4] {
    use lifetime::{SECONDS_PER_DAY as D, SECONDS_PER_YEAR as Y};
    [
        ("0.1 Hz", 0.1, 2.0 * D, 2.2 * D),
        ("hourly", 1.0 / 3600.0, 1.6 * Y, 1.8 * Y),
        ("daily", 1.0 / 86_400.0, 7.6 * Y, 8.4 * Y),
        ("never", 0.0, 9.4 * Y, 9.6 * Y),
    ]
}

pub fn cmd_lifetime(data: &ModelData, args: &LifetimeArgs) -> Result<Outcome, CliError> {
    let power = PowerModel::from_data(data)?;
    let battery = lifetime::battery_from_data(data, &args.battery)?;
    let profile = lifetime::profile_from_data(data, &power, &args.profile)?;
    let mut report = format!(
        "battery `{}`: {:.1} J, self-discharge {:.4} µW; profile `{}`: idle {:.2} µW\n",
        args.battery,
        battery.energy_j(),
        battery.self_discharge_power_w() * 1e6,
        args.profile,
        profile.idle_power_w * 1e6
    );
    let mut checks = Vec::new();
    let cases: Vec<(String, f64, Option<(f64, f64)>)> = match args.rate_hz {
        Some(r) => vec![(format!("{r} Hz"), r, None)],
        None => lifetime_cases()
            .into_iter()
            .map(|(l, r, lo, hi)| (l.to_string(), r, Some((lo, hi))))
            .collect(),
    };
    for (label, rate, range) in cases {
        let rep = lifetime::lifetime(&battery, &profile.with_rate(rate));
        writeln!(
            report,
            "  {label:<8} avg {:>10.4} µW  lifetime {}",
            rep.average_power_w * 1e6,
            fmt_lifetime(rep.lifetime_s)
        )
        .unwrap();
        if let Some((lo, hi)) = range {
            checks.push(Check::new(
                format!("lifetime {label} within reference range"),
                (lo..=hi).contains(&rep.lifetime_s),
                fmt_lifetime(rep.lifetime_s),
            ));
        }
    }
    let rates = lifetime::log_spaced_rates(args.sweep_min_hz, args.sweep_max_hz, args.points)?;
    let points = lifetime::sweep(&battery, &profile, &rates)?;
    Ok(Outcome {
        report,
        csv: Some(lifetime::sweep_csv(&points)),
        checks,
        ..Outcome::default()
    })
}

pub fn cmd_simulate(data: &ModelData, common: &CommonArgs, args: &SimulateArgs) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(&args.scenario).map_err(|source| ConfigError::Io {
        path: args.scenario.display().to_string(),
        source,
    })?;
    let scenario = ScenarioConfig::parse(&text)?;
    // An explicit --seed overrides the file; the default keeps the file's.
    let seed = (common.seed != CommonArgs::default().seed).then_some(common.seed);
    let sim = scenario.run(data, seed)?;
    let horizon = scenario.horizon()?;

    let mut report = format!("{} events up to {}\n", sim.trace().len(), horizon);
    for c in sim.commands() {
        let status = match &c.result {
            Ok(_) => "ok".to_string(),
            Err(e) => format!("rejected: {e}"),
        };
        writeln!(report, "  {} {} {}: {status}", c.time, sim.device(c.device).name(), c.command).unwrap();
    }
    for r in sim.receptions() {
        writeln!(report, "  reception at {} by {}: {:?}", r.stream_start, sim.device(r.receiver).name(), r.outcome).unwrap();
    }
    for d in sim.devices() {
        writeln!(report, "  {} energy {}", d.name(), fmt_energy(d.ledger.total_energy(horizon))).unwrap();
    }
    let mut trace = Vec::new();
    write_trace_csv(&sim, &mut trace).map_err(ScenarioError::from)?;
    let mut ledger = Vec::new();
    write_ledger_csv(&sim, horizon, &mut ledger).map_err(ScenarioError::from)?;
    Ok(Outcome {
        report,
        csv: Some(String::from_utf8(trace).expect("ascii")),
        extra_csv: args.ledger_out.as_ref().map(|_| String::from_utf8(ledger).expect("ascii")),
        checks: Vec::new(),
    })
}

/// Milliseconds with two decimals, rounded half up from exact ticks.
pub fn fmt_ms(t: SimTime) -> String {
    let per_centi = TICKS_PER_SECOND as u128 / 100_000;
    let centi = (t.ticks() as u128 + per_centi / 2) / per_centi;
    format!("{}.{:02} ms", centi / 100, centi % 100)
}

/// Energy in mJ at or above one millijoule, otherwise µJ, two decimals.
pub fn fmt_energy(j: f64) -> String {
    if j.abs() >= 1e-3 {
        format!("{:.2} mJ", j * 1e3)
    } else {
        format!("{:.2} µJ", j * 1e6)
    }
}

fn fmt_lifetime(s: f64) -> String {
    if s.is_infinite() {
        "unbounded".into()
    } else if s < lifetime::SECONDS_PER_YEAR {
        format!("{:.3} days", s / lifetime::SECONDS_PER_DAY)
    } else {
        format!("{:.3} years", s / lifetime::SECONDS_PER_YEAR)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ms_formatting_rounds_half_up_exactly() {
        assert_eq!(fmt_ms(SimTime::from_millis_f64(72.575)), "72.58 ms");
        assert_eq!(fmt_ms(SimTime::from_chips(32, 1024)), "31.25 ms");
        assert_eq!(fmt_ms(SimTime::ZERO), "0.00 ms");
    }

    #[test]
    fn tables_report_reference_lines() {
        let out = cmd_tables(&ModelData::bundled()).unwrap();
        assert!(out.report.contains("1024 bit/s, 6.88 µW"));
        assert!(out.report.contains("sender 1.33 mJ / 72.58 ms, receiver 17.75 µJ / 54.28 ms"));
        assert!(out.report.contains("sender 539.12 µJ / 42.30 ms, receiver 17.64 µJ / 24.00 ms"));
    }

    #[test]
    fn transaction_checks_pass_on_bundled_data() {
        let out = cmd_transaction(&ModelData::bundled(), &TransactionArgs { voltage: 1.8, ..Default::default() }).unwrap();
        assert!(out.all_passed(), "{:#?}", out.checks);
        assert_eq!(out.checks.len(), 2 * (2 + 4));
    }

    #[test]
    fn lifetime_checks_pass_on_bundled_data() {
        let out = cmd_lifetime(&ModelData::bundled(), &LifetimeArgs::default()).unwrap();
        assert!(out.all_passed(), "{:#?}", out.checks);
        assert!(out.csv.unwrap().starts_with("rate_hz,avg_power_w,lifetime_s,lifetime_years\n"));
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
