//! Received power and wake-up delivery probability versus distance.
//!
//! Path loss follows the log-distance model anchored on free-space loss at
//! the reference distance. Delivery probability is a logistic function of
//! the link margin (received power minus sensitivity), fitted through
//! measured (distance, PDR) anchors, with an optional hard range cutoff.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::{ConfigError, LinkPresetRaw, ModelData};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinkError {
    #[error("distance {distance} m is below the reference distance {reference} m")]
    BelowReference { distance: f64, reference: f64 },
    #[error("need at least two calibration anchors with distinct margins")]
    TooFewAnchors,
    #[error("anchor pdr {0} must lie strictly inside (0, 1)")]
    DegenerateAnchor(f64),
    #[error("calibration yields non-positive slope; PDR must fall with margin")]
    NonIncreasingFit,
    #[error("invalid link parameter `{field}`: {message}")]
    InvalidParam { field: &'static str, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkParams {
    pub carrier_freq_mhz: f64,
    pub tx_antenna_gain_dbi: f64,
    pub rx_antenna_gain_dbi: f64,
    pub sensitivity_dbm: f64,
    pub path_loss_exponent: f64,
    pub reference_distance_m: f64,
    /// Margin in dB at which PDR is one half.
    pub pdr_midpoint_db: f64,
    /// Logistic scale in dB.
    pub pdr_slope_db: f64,
    /// Beyond this distance nothing is delivered.
    pub max_range_cutoff_m: Option<f64>,
    /// Optional upper bound on PDR for residual losses at short range.
    pub pdr_ceiling: Option<f64>,
}

impl LinkParams {
    pub fn validate(&self) -> Result<(), LinkError> {
        let bad = |field, message: &str| LinkError::InvalidParam {
            field,
            message: message.to_string(),
        };
        if !(self.carrier_freq_mhz > 0.0) {
            return Err(bad("carrier_freq_mhz", "must be positive"));
        }
        if !(self.pdr_slope_db > 0.0) {
            return Err(bad("pdr_slope_db", "must be positive"));
        }
        if !(self.sensitivity_dbm < 0.0) {
            return Err(bad("sensitivity_dbm", "must be negative"));
        }
        if !(self.reference_distance_m > 0.0) {
            return Err(bad("reference_distance_m", "must be positive"));
        }
        if !(self.path_loss_exponent > 0.0) {
            return Err(bad("path_loss_exponent", "must be positive"));
        }
        if let Some(c) = self.pdr_ceiling {
            if !(c > 0.0 && c <= 1.0) {
                return Err(bad("pdr_ceiling", "must lie in (0, 1]"));
            }
        }
        Ok(())
    }

    /// Builds parameters from a named preset, fitting the PDR curve through
    /// the preset's distance anchors when it has any.
    pub fn from_preset(preset: &LinkPresetRaw) -> Result<Self, LinkError> {
        let mut params = LinkParams {
            carrier_freq_mhz: preset.carrier_freq_mhz,
            tx_antenna_gain_dbi: preset.tx_antenna_gain_dbi,
            rx_antenna_gain_dbi: preset.rx_antenna_gain_dbi,
            sensitivity_dbm: preset.sensitivity_dbm,
            path_loss_exponent: preset.path_loss_exponent,
            reference_distance_m: preset.reference_distance_m,
            pdr_midpoint_db: preset.pdr_midpoint_db.unwrap_or(0.0),
            pdr_slope_db: preset.pdr_slope_db.unwrap_or(1.0),
            max_range_cutoff_m: preset.max_range_cutoff_m,
            pdr_ceiling: preset.pdr_ceiling,
        };
        if !preset.anchors.is_empty() {
            let anchors = preset
                .anchors
                .iter()
                .map(|a| Ok((margin(a.distance_m, preset.calibration_tx_power_dbm, &params)?, a.pdr)))
                .collect::<Result<Vec<_>, LinkError>>()?;
            let (mid, slope) = calibrate_pdr(&anchors)?;
            params.pdr_midpoint_db = mid;
            params.pdr_slope_db = slope;
        } else if preset.pdr_midpoint_db.is_none() || preset.pdr_slope_db.is_none() {
            return Err(LinkError::TooFewAnchors);
        }
        params.validate()?;
        Ok(params)
    }

    pub fn from_data(data: &ModelData, preset: &str) -> Result<Self, ConfigError> {
        let raw = data.link_preset(preset)?;
        Self::from_preset(raw).map_err(|e| ConfigError::invalid(format!("link.{preset}"), e.to_string()))
    }

    /// Same parameters without the range cutoff or ceiling.
    pub fn unclamped(&self) -> Self {
        LinkParams {
            max_range_cutoff_m: None,
            pdr_ceiling: None,
            ..self.clone()
        }
    }
}

/// One point of a link sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSample {
    pub distance_m: f64,
    pub rssi_dbm: f64,
    pub margin_db: f64,
    pub pdr: f64,
}

/// Path loss in dB at `distance` metres.
pub fn path_loss(distance: f64, params: &LinkParams) -> Result<f64, LinkError> {
    let d0 = params.reference_distance_m;
    if !(distance >= d0) {
        return Err(LinkError::BelowReference {
            distance,
            reference: d0,
        });
    }
    let f_hz = params.carrier_freq_mhz * 1e6;
    let free_space_d0 = 20.0 * (4.0 * std::f64::consts::PI * d0 * f_hz / SPEED_OF_LIGHT).log10();
    Ok(free_space_d0 + 10.0 * params.path_loss_exponent * (distance / d0).log10())
}

pub fn rssi(distance: f64, tx_power_dbm: f64, params: &LinkParams) -> Result<f64, LinkError> {
    Ok(tx_power_dbm + params.tx_antenna_gain_dbi + params.rx_antenna_gain_dbi
        - path_loss(distance, params)?)
}

/// Received power above sensitivity, in dB.
pub fn margin(distance: f64, tx_power_dbm: f64, params: &LinkParams) -> Result<f64, LinkError> {
    Ok(rssi(distance, tx_power_dbm, params)? - params.sensitivity_dbm)
}

/// Logistic delivery probability at `margin_db`, capped by the ceiling.
pub fn pdr(margin_db: f64, params: &LinkParams) -> f64 {
    let p = 1.0 / (1.0 + (-(margin_db - params.pdr_midpoint_db) / params.pdr_slope_db).exp());
    match params.pdr_ceiling {
        Some(c) => p.min(c),
        None => p,
    }
}

/// Delivery probability at a distance, including the range cutoff.
pub fn pdr_at(distance: f64, tx_power_dbm: f64, params: &LinkParams) -> Result<f64, LinkError> {
    Ok(sample(distance, tx_power_dbm, params)?.pdr)
}

pub fn sample(distance: f64, tx_power_dbm: f64, params: &LinkParams) -> Result<LinkSample, LinkError> {
    let rssi_dbm = rssi(distance, tx_power_dbm, params)?;
    let margin_db = rssi_dbm - params.sensitivity_dbm;
    let beyond = params.max_range_cutoff_m.is_some_and(|c| distance > c);
    Ok(LinkSample {
        distance_m: distance,
        rssi_dbm,
        margin_db,
        pdr: if beyond { 0.0 } else { pdr(margin_db, params) },
    })
}

fn logit(p: f64) -> Result<f64, LinkError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(LinkError::DegenerateAnchor(p));
    }
    Ok((p / (1.0 - p)).ln())
}

/// Fits `(midpoint, slope)` of the logistic through `(margin, pdr)` anchors:
/// exact for two anchors, least squares on the logits for more.
pub fn calibrate_pdr(anchors: &[(f64, f64)]) -> Result<(f64, f64), LinkError> {
    if anchors.len() < 2 {
        return Err(LinkError::TooFewAnchors);
    }
    let pts = anchors
        .iter()
        .map(|&(m, p)| Ok((m, logit(p)?)))
        .collect::<Result<Vec<_>, LinkError>>()?;
    let n = pts.len() as f64;
    let mean_m = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_m).powi(2)).sum();
    if sxx == 0.0 {
        return Err(LinkError::TooFewAnchors);
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_m) * (p.1 - mean_y)).sum();
    // logit(pdr) = (margin - midpoint) / slope = a * margin + b
    let a = sxy / sxx;
    if !(a > 0.0) {
        return Err(LinkError::NonIncreasingFit);
    }
    let b = mean_y - a * mean_m;
    Ok((-b / a, 1.0 / a))
}

/// One Bernoulli delivery draw.
pub fn deliver<R: Rng + ?Sized>(
    distance: f64,
    tx_power_dbm: f64,
    params: &LinkParams,
    rng: &mut R,
) -> Result<bool, LinkError> {
    let p = pdr_at(distance, tx_power_dbm, params)?;
    Ok(p > 0.0 && rng.gen::<f64>() < p)
}

/// Delivery draw reproducible from `(seed, trial)` alone.
pub fn deliver_seeded(
    distance: f64,
    tx_power_dbm: f64,
    params: &LinkParams,
    seed: u64,
    trial: u64,
) -> Result<bool, LinkError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    deliver(distance, tx_power_dbm, params, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper() -> LinkParams {
        LinkParams::from_data(&ModelData::bundled(), "paper").unwrap()
    }

    #[test]
    fn free_space_values() {
        let p = paper();
        // 20 log10(4 pi 100 m * 868.35 MHz / c), evaluated independently.
        assert!((path_loss(100.0, &p).unwrap() - 71.221_679_394).abs() < 1e-6);
        let at_ref = path_loss(1.0, &p).unwrap();
        let direct = 20.0 * (4.0 * std::f64::consts::PI * 868.35e6 / SPEED_OF_LIGHT).log10();
        assert_eq!(at_ref, direct);
        let diff = path_loss(130.0, &p).unwrap() - path_loss(100.0, &p).unwrap();
        assert!((diff - 20.0 * 1.3f64.log10()).abs() < 1e-12);
        assert!((diff - 2.2789).abs() < 1e-4);
    }

    #[test]
    fn rssi_values() {
        let p = paper();
        assert!((rssi(100.0, 2.8, &p).unwrap() + 72.6217).abs() < 1e-4);
        assert!((rssi(1.0, 2.8, &p).unwrap() + 32.6217).abs() < 1e-4);
    }

    #[test]
    fn below_reference_is_rejected() {
        assert!(matches!(path_loss(0.5, &paper()), Err(LinkError::BelowReference { .. })));
    }

    #[test]
    fn calibrated_anchors_roundtrip() {
        let p = paper();
        assert!((pdr_at(100.0, 2.8, &p).unwrap() - 0.94).abs() < 1e-9);
        assert!((pdr_at(130.0, 2.8, &p).unwrap() - 0.11).abs() < 1e-9);
        assert_eq!(pdr_at(130.01, 2.8, &p).unwrap(), 0.0);
        assert!((p.pdr_midpoint_db + 1.2966).abs() < 1e-3);
        assert!((p.pdr_slope_db - 0.4706).abs() < 1e-3);
    }

    #[test]
    fn midpoint_is_one_half() {
        let p = paper();
        assert_eq!(pdr(p.pdr_midpoint_db, &p), 0.5);
    }

    #[test]
    fn calibration_cases() {
        let (m, s) = calibrate_pdr(&[(0.0, 0.5), (1.0, 0.731_058_578_630_004_9)]).unwrap();
        assert!(m.abs() < 1e-9 && (s - 1.0).abs() < 1e-9);
        let (m, s) = calibrate_pdr(&[(0.0, 0.94), (-2.28, 0.11)]).unwrap();
        assert!((m + 1.2956).abs() < 1e-3 && (s - 0.4709).abs() < 1e-3);
        assert_eq!(calibrate_pdr(&[(0.0, 1.0), (1.0, 0.5)]), Err(LinkError::DegenerateAnchor(1.0)));
        assert_eq!(calibrate_pdr(&[(0.0, 0.2)]), Err(LinkError::TooFewAnchors));
        assert_eq!(calibrate_pdr(&[(1.0, 0.2), (1.0, 0.3)]), Err(LinkError::TooFewAnchors));
        assert_eq!(calibrate_pdr(&[(0.0, 0.9), (1.0, 0.3)]), Err(LinkError::NonIncreasingFit));
    }

    #[test]
    fn three_anchor_fit_recovers_curve() {
        let (mid, slope) = (-3.5, 1.7);
        let curve = |m: f64| 1.0 / (1.0 + (-(m - mid) / slope).exp());
        let anchors: Vec<(f64, f64)> = [-6.0, -2.0, 1.5].iter().map(|&m| (m, curve(m))).collect();
        let (fm, fs) = calibrate_pdr(&anchors).unwrap();
        assert!((fm - mid).abs() < 1e-9 && (fs - slope).abs() < 1e-9);
    }

    #[test]
    fn beyond_cutoff_never_delivers() {
        let p = paper();
        for trial in 0..1000 {
            assert!(!deliver_seeded(131.0, 10.0, &p, 5, trial).unwrap());
        }
    }

    #[test]
    fn seeded_draws_repeat() {
        let p = paper();
        let a: Vec<bool> = (0..200).map(|t| deliver_seeded(120.0, 2.8, &p, 3, t).unwrap()).collect();
        let b: Vec<bool> = (0..200).map(|t| deliver_seeded(120.0, 2.8, &p, 3, t).unwrap()).collect();
        assert_eq!(a, b);
        assert!(a.iter().any(|&x| x) && a.iter().any(|&x| !x));
    }

    #[test]
    fn ceiling_caps_short_range() {
        let mut p = paper();
        p.pdr_ceiling = Some(0.94);
        assert_eq!(pdr_at(1.1, 2.8, &p).unwrap(), 0.94);
        p.validate().unwrap();
        p.pdr_ceiling = Some(1.5);
        assert!(p.validate().is_err());
    }
}
