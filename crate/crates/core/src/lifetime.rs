//! Battery lifetime under a duty profile.
//!
//! The load is an idle floor plus periodic events of fixed energy. The cell
//! loses a fixed fraction of its initial energy per year independent of the
//! load, modeled as a constant drain, so lifetime has the closed form
//! `E0 / (P_load + P_self_discharge)`.

use thiserror::Error;

use crate::airtime_energy::{EnergyError, PowerModel};
use crate::config::{BatteryRaw, ConfigError, ModelData, ProfileRaw};
use crate::mls_codec::RadioConfig;

pub const SECONDS_PER_DAY: f64 = 86_400.0;
/// Julian year.
pub const SECONDS_PER_YEAR: f64 = 365.25 * SECONDS_PER_DAY;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LifetimeError {
    #[error("invalid battery: {0}")]
    InvalidBattery(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid rate range: {0}")]
    InvalidRange(String),
    #[error(transparent)]
    Energy(#[from] EnergyError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Battery {
    pub capacity_mah: f64,
    pub nominal_voltage_v: f64,
    /// Fraction of the initial energy lost per year.
    pub self_discharge: f64,
}

impl Battery {
    pub fn new(capacity_mah: f64, nominal_voltage_v: f64, self_discharge: f64) -> Result<Self, LifetimeError> {
        if !(capacity_mah > 0.0 && capacity_mah.is_finite()) {
            return Err(LifetimeError::InvalidBattery("capacity must be positive".into()));
        }
        if !(nominal_voltage_v > 0.0 && nominal_voltage_v.is_finite()) {
            return Err(LifetimeError::InvalidBattery("nominal voltage must be positive".into()));
        }
        if !(0.0..1.0).contains(&self_discharge) {
            return Err(LifetimeError::InvalidBattery("self-discharge must lie in [0, 1)".into()));
        }
        Ok(Battery {
            capacity_mah,
            nominal_voltage_v,
            self_discharge,
        })
    }

    /// 220 mAh at 3 V with 1 %/year self-discharge.
    pub fn cr2032() -> Self {
        Battery::new(220.0, 3.0, 0.01).expect("valid constants")
    }

    pub fn from_raw(raw: &BatteryRaw) -> Result<Self, LifetimeError> {
        Battery::new(raw.capacity_mah, raw.nominal_voltage_v, raw.self_discharge_per_year)
    }

    /// Stored energy in joules.
    pub fn energy_j(&self) -> f64 {
        self.capacity_mah * 1e-3 * 3600.0 * self.nominal_voltage_v
    }

    pub fn self_discharge_power_w(&self) -> f64 {
        self.self_discharge * self.energy_j() / SECONDS_PER_YEAR
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DutyEvent {
    pub label: String,
    pub energy_j: f64,
    pub rate_hz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DutyProfile {
    pub idle_power_w: f64,
    pub events: Vec<DutyEvent>,
}

impl DutyProfile {
    pub fn new(idle_power_w: f64, events: Vec<DutyEvent>) -> Result<Self, LifetimeError> {
        let p = DutyProfile { idle_power_w, events };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), LifetimeError> {
        if !(self.idle_power_w >= 0.0 && self.idle_power_w.is_finite()) {
            return Err(LifetimeError::InvalidProfile("idle power must be non-negative".into()));
        }
        for e in &self.events {
            if !(e.rate_hz >= 0.0 && e.rate_hz.is_finite()) {
                return Err(LifetimeError::InvalidProfile(format!("rate of `{}` must be non-negative", e.label)));
            }
            if !(e.energy_j >= 0.0 && e.energy_j.is_finite()) {
                return Err(LifetimeError::InvalidProfile(format!("energy of `{}` must be non-negative", e.label)));
            }
        }
        Ok(())
    }

    /// Resolves a profile from the data file; reception events are costed
    /// with the receiver model.
    pub fn from_raw(raw: &ProfileRaw, model: &PowerModel) -> Result<Self, LifetimeError> {
        let mut events = Vec::with_capacity(raw.events.len());
        for e in &raw.events {
            let energy_j = match (e.energy_uj, e.energy_mj, &e.reception) {
                (Some(uj), None, None) => uj * 1e-6,
                (None, Some(mj), None) => mj * 1e-3,
                (None, None, Some(r)) => {
                    let cfg = RadioConfig::new(r.ldr_bps, r.hdr_bps, 0)
                        .map_err(|err| LifetimeError::InvalidProfile(format!("`{}`: {err}", e.label)))?;
                    model.receiver_cost(&cfg, r.payload_bits)?.energy_j
                }
                _ => {
                    return Err(LifetimeError::InvalidProfile(format!(
                        "`{}` needs exactly one of energy_uj, energy_mj, reception",
                        e.label
                    )))
                }
            };
            events.push(DutyEvent {
                label: e.label.clone(),
                energy_j,
                rate_hz: e.rate_hz,
            });
        }
        DutyProfile::new(raw.idle_power_uw * 1e-6, events)
    }

    /// Every event at the same rate.
    pub fn with_rate(&self, rate_hz: f64) -> Self {
        DutyProfile {
            idle_power_w: self.idle_power_w,
            events: self
                .events
                .iter()
                .map(|e| DutyEvent {
                    rate_hz,
                    ..e.clone()
                })
                .collect(),
        }
    }
}

pub fn battery_from_data(data: &ModelData, name: &str) -> Result<Battery, ConfigError> {
    Battery::from_raw(data.battery(name)?).map_err(|e| ConfigError::invalid(format!("battery.{name}"), e.to_string()))
}

pub fn profile_from_data(data: &ModelData, model: &PowerModel, name: &str) -> Result<DutyProfile, ConfigError> {
    DutyProfile::from_raw(data.profile(name)?, model)
        .map_err(|e| ConfigError::invalid(format!("profile.{name}"), e.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LifetimeReport {
    /// `f64::INFINITY` when nothing drains the battery.
    pub lifetime_s: f64,
    pub average_power_w: f64,
    pub self_discharge_power_w: f64,
    /// Average power per source: `idle` first, then each event label.
    pub breakdown: Vec<(String, f64)>,
}

impl LifetimeReport {
    pub fn lifetime_days(&self) -> f64 {
        self.lifetime_s / SECONDS_PER_DAY
    }

    pub fn lifetime_years(&self) -> f64 {
        self.lifetime_s / SECONDS_PER_YEAR
    }

    pub fn is_unbounded(&self) -> bool {
        self.lifetime_s.is_infinite()
    }
}

/// Average load power in watts.
pub fn average_power(profile: &DutyProfile) -> f64 {
    profile
        .events
        .iter()
        .fold(profile.idle_power_w, |acc, e| acc + e.energy_j * e.rate_hz)
}

pub fn lifetime(battery: &Battery, profile: &DutyProfile) -> LifetimeReport {
    let mut breakdown = vec![("idle".to_string(), profile.idle_power_w)];
    breakdown.extend(profile.events.iter().map(|e| (e.label.clone(), e.energy_j * e.rate_hz)));
    let average_power_w = average_power(profile);
    let self_discharge_power_w = battery.self_discharge_power_w();
    let drain = average_power_w + self_discharge_power_w;
    LifetimeReport {
        lifetime_s: if drain > 0.0 {
            battery.energy_j() / drain
        } else {
            f64::INFINITY
        },
        average_power_w,
        self_discharge_power_w,
        breakdown,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub rate_hz: f64,
    pub avg_power_w: f64,
    pub lifetime_s: f64,
}

impl SweepPoint {
    pub fn lifetime_years(&self) -> f64 {
        self.lifetime_s / SECONDS_PER_YEAR
    }
}

/// `points` log-spaced rates from `min_hz` to `max_hz` inclusive.
pub fn log_spaced_rates(min_hz: f64, max_hz: f64, points: usize) -> Result<Vec<f64>, LifetimeError> {
    if !(min_hz > 0.0 && max_hz.is_finite() && max_hz >= min_hz) {
        return Err(LifetimeError::InvalidRange(format!("{min_hz}..{max_hz} Hz")));
    }
    if points < 2 || min_hz == max_hz {
        return Ok(vec![min_hz]);
    }
    let (lo, hi) = (min_hz.ln(), max_hz.ln());
    let step = (hi - lo) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| match i {
            0 => min_hz,
            i if i == points - 1 => max_hz,
            i => (lo + step * i as f64).exp(),
        })
        .collect())
}

/// Lifetime at each rate, every profile event running at that rate. Rates
/// are evaluated in ascending order.
pub fn sweep(battery: &Battery, base: &DutyProfile, rates_hz: &[f64]) -> Result<Vec<SweepPoint>, LifetimeError> {
    let mut rates = rates_hz.to_vec();
    if rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(LifetimeError::InvalidRange("rates must be finite and non-negative".into()));
    }
    rates.sort_by(f64::total_cmp);
    rates.dedup();
    Ok(rates
        .into_iter()
        .map(|rate_hz| {
            let report = lifetime(battery, &base.with_rate(rate_hz));
            SweepPoint {
                rate_hz,
                avg_power_w: report.average_power_w,
                lifetime_s: report.lifetime_s,
            }
        })
        .collect())
}

/// CSV with columns `rate_hz,avg_power_w,lifetime_s,lifetime_years`.
pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("rate_hz,avg_power_w,lifetime_s,lifetime_years\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            p.rate_hz,
            p.avg_power_w,
            p.lifetime_s,
            p.lifetime_years()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn display_only() -> DutyProfile {
        DutyProfile::new(
            7.17e-6,
            vec![DutyEvent {
                label: "display-update".into(),
                energy_j: 132.22e-3,
                rate_hz: 0.0,
            }],
        )
        .unwrap()
    }

    #[test]
    fn average_power_examples() {
        let p = display_only();
        assert_eq!(average_power(&p), 7.17e-6);
        let daily = average_power(&p.with_rate(1.0 / 86_400.0));
        assert!((daily - 8.70032e-6).abs() < 1e-10);
        let fast = average_power(&p.with_rate(0.1));
        assert!((fast - 13.22917e-3).abs() < 1e-8);
    }

    #[test]
    fn cr2032_self_discharge() {
        let b = Battery::cr2032();
        assert!((b.energy_j() - 2376.0).abs() < 1e-9);
        assert!((b.self_discharge_power_w() - 0.7529e-6).abs() < 1e-10);
        let never = lifetime(&b, &display_only());
        assert!((never.lifetime_years() - 9.503).abs() < 1e-3);
    }

    #[test]
    fn zero_drain_is_unbounded() {
        let b = Battery::new(100.0, 3.0, 0.0).unwrap();
        let r = lifetime(&b, &DutyProfile::new(0.0, vec![]).unwrap());
        assert!(r.is_unbounded());
    }

    #[test]
    fn consistency_with_battery_energy() {
        let b = Battery::cr2032();
        let r = lifetime(&b, &display_only().with_rate(1.0 / 3600.0));
        let drained = r.lifetime_s * (r.average_power_w + r.self_discharge_power_w);
        assert!((drained - b.energy_j()).abs() <= 1e-6 * b.energy_j());
        let sum: f64 = r.breakdown.iter().map(|b| b.1).sum();
        assert!((sum - r.average_power_w).abs() <= 1e-15);
    }

    #[test]
    fn invalid_inputs() {
        assert!(Battery::new(0.0, 3.0, 0.01).is_err());
        assert!(Battery::new(220.0, 3.0, 1.0).is_err());
        assert!(DutyProfile::new(-1.0, vec![]).is_err());
        assert!(log_spaced_rates(0.0, 1.0, 5).is_err());
        assert!(sweep(&Battery::cr2032(), &display_only(), &[f64::NAN]).is_err());
    }

    #[test]
    fn log_grid_hits_endpoints() {
        let g = log_spaced_rates(1.0 / 86_400.0, 0.1, 9).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], 1.0 / 86_400.0);
        assert_eq!(g[8], 0.1);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn sweep_is_monotone() {
        let mut rates = log_spaced_rates(1e-7, 1.0, 40).unwrap();
        rates.push(0.0);
        let pts = sweep(&Battery::cr2032(), &display_only(), &rates).unwrap();
        assert_eq!(pts[0].rate_hz, 0.0);
        assert!(pts.windows(2).all(|w| w[1].lifetime_s < w[0].lifetime_s));
        let csv = sweep_csv(&pts);
        assert!(csv.starts_with("rate_hz,avg_power_w,lifetime_s,lifetime_years\n"));
        assert_eq!(csv.lines().count(), pts.len() + 1);
    }
}
