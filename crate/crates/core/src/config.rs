//! Simulation parameters and the flat key-value config file.
//!
//! Defaults reproduce the reference deployment: 6 BSs over a 13 km square,
//! 3 bands of 200 kHz, 600 Hz UNB transmissions repeated 3 times, and
//! 125 kHz interferers. Knobs the reference leaves open (path-loss exponent,
//! shadowing decorrelation distance, interferer burst length) have documented
//! defaults and can be overridden.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::Band;

/// Largest BS count supported; decode indicators are packed into a `u64`.
pub const MAX_BS: usize = 64;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Number of base stations `B`.
    pub num_bs: usize,
    /// Number of multiplexing bands `M`.
    pub num_bands: usize,
    /// Multiplexing band width `W` in Hz.
    pub band_width: f64,
    /// UNB signal bandwidth `w` in Hz.
    pub tx_bandwidth: f64,
    /// Interferer signal bandwidth `w'` in Hz.
    pub interferer_bandwidth: f64,
    /// dBm
    pub tx_power_iot: f64,
    /// dBm
    pub tx_power_interferer: f64,
    /// dBm
    pub noise_power: f64,
    /// Std-dev (dB) of a Gaussian jitter on the per-transmission noise power.
    pub noise_jitter_db: f64,
    /// Repetitions per packet `R`.
    pub repetitions: u32,
    /// UNB packets per device per hour `N`.
    pub packets_per_hour: f64,
    /// Interferer bursts per device per hour `N'`.
    pub interferer_packets_per_hour: f64,
    pub packet_bits: f64,
    /// Interferer burst duration `T'` in seconds; defaults to the UNB duration.
    pub interferer_duration: Option<f64>,
    /// Decoding threshold `tau` in dB. Infinite values are accepted.
    pub sinr_threshold: f64,
    /// Side of the square deployment area in meters.
    pub area_side: f64,
    /// Expected number of IoT devices in the area.
    pub mean_iot_count: f64,
    /// Expected number of interferers in the area.
    pub mean_interferer_count: f64,
    pub pathloss_exponent: f64,
    /// Shadowing standard deviation in dB.
    pub shadowing_std: f64,
    /// Shadowing decorrelation distance in meters.
    pub shadowing_decorrelation: f64,
    /// Rayleigh fading scale; mean fading power equals its square.
    pub fading_scale: f64,
    /// Total training time in seconds, split evenly across bands.
    pub training_duration: f64,
    /// Evaluation traffic horizon in seconds.
    pub sim_horizon: f64,
    pub cross_bs_shadowing_correlated: bool,
    /// Above this many sources shadowing switches from exact Cholesky to a grid field.
    pub exact_shadowing_max_sources: usize,
    pub master_seed: u64,
    /// Path-loss exponent of the location heuristic's correlation proxy.
    pub eta: f64,
    /// One-based band probed by low-overhead training.
    pub probe_band: usize,
    /// Largest `M^B` the exhaustive solvers will enumerate.
    pub enumeration_cap: u64,
    pub local_search_restarts: usize,
    /// Keep BS locations common across `num_bs` sweep values.
    pub nested_topology: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            num_bs: 6,
            num_bands: 3,
            band_width: 200e3,
            tx_bandwidth: 600.0,
            interferer_bandwidth: 125e3,
            tx_power_iot: 14.0,
            tx_power_interferer: 14.0,
            noise_power: -146.0,
            noise_jitter_db: 0.0,
            repetitions: 3,
            packets_per_hour: 3.0,
            interferer_packets_per_hour: 30.0,
            packet_bits: 2080.0,
            interferer_duration: None,
            sinr_threshold: 10.0,
            area_side: 13_000.0,
            mean_iot_count: 5000.0,
            mean_interferer_count: 2000.0,
            pathloss_exponent: 3.5,
            shadowing_std: 9.0,
            shadowing_decorrelation: 200.0,
            fading_scale: 1.0,
            training_duration: 3600.0,
            sim_horizon: 3600.0,
            cross_bs_shadowing_correlated: false,
            exact_shadowing_max_sources: 4000,
            master_seed: 1,
            eta: 1.0,
            probe_band: 1,
            enumeration_cap: 1_000_000,
            local_search_restarts: 20,
            nested_topology: false,
        }
    }
}

impl SimConfig {
    /// UNB transmission duration `T = packet_bits / w`.
    pub fn tx_duration(&self) -> f64 {
        self.packet_bits / self.tx_bandwidth
    }

    pub fn interferer_duration(&self) -> f64 {
        self.interferer_duration.unwrap_or_else(|| self.tx_duration())
    }

    /// Length of one full-training slot.
    pub fn training_slot_duration(&self) -> f64 {
        self.training_duration / self.num_bands as f64
    }

    pub fn total_bandwidth(&self) -> f64 {
        self.num_bands as f64 * self.band_width
    }

    pub fn probe_band(&self) -> Band {
        Band::from_number(self.probe_band).unwrap_or_default()
    }

    /// `M^B`, saturating.
    pub fn assignment_space(&self) -> u128 {
        (self.num_bands as u128).saturating_pow(self.num_bs as u32)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.num_bs == 0 || self.num_bs > MAX_BS {
            return bad(format!("num_bs must be in 1..={MAX_BS}, got {}", self.num_bs));
        }
        if self.num_bands == 0 {
            return bad("num_bands must be at least 1".into());
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if !(self.tx_bandwidth > 0.0 && self.tx_bandwidth < self.band_width) {
            return bad(format!(
                "need 0 < tx_bandwidth < band_width, got {} and {}",
                self.tx_bandwidth, self.band_width
            ));
        }
        if !(self.interferer_bandwidth > 0.0 && self.interferer_bandwidth <= self.band_width) {
            return bad(format!(
                "need 0 < interferer_bandwidth <= band_width, got {}",
                self.interferer_bandwidth
            ));
        }
        let finite = [
            ("tx_power_iot", self.tx_power_iot),
            ("tx_power_interferer", self.tx_power_interferer),
            ("noise_power", self.noise_power),
            ("pathloss_exponent", self.pathloss_exponent),
            ("shadowing_std", self.shadowing_std),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        if self.sinr_threshold.is_nan() {
            return bad("sinr_threshold is NaN".into());
        }
        let positive = [
            ("band_width", self.band_width),
            ("packet_bits", self.packet_bits),
            ("area_side", self.area_side),
            ("shadowing_decorrelation", self.shadowing_decorrelation),
            ("fading_scale", self.fading_scale),
            ("training_duration", self.training_duration),
            ("sim_horizon", self.sim_horizon),
            ("interferer_duration", self.interferer_duration()),
            ("eta", self.eta),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        let non_negative = [
            ("noise_jitter_db", self.noise_jitter_db),
            ("packets_per_hour", self.packets_per_hour),
            ("interferer_packets_per_hour", self.interferer_packets_per_hour),
            ("mean_iot_count", self.mean_iot_count),
            ("mean_interferer_count", self.mean_interferer_count),
            ("shadowing_std", self.shadowing_std),
            ("pathloss_exponent", self.pathloss_exponent),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be non-negative, got {v}"));
            }
        }
        if self.probe_band == 0 || self.probe_band > self.num_bands {
            return bad(format!("probe_band must be in 1..={}", self.num_bands));
        }
        if self.local_search_restarts == 0 {
            return bad("local_search_restarts must be at least 1".into());
        }
        Ok(())
    }

    /// Parses a flat `key = value` document. Unknown keys are rejected and
    /// missing keys keep their defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: SimConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Applies a single `key = value` override, as used by sweeps.
    pub fn with_override(&self, key: &str, value: f64) -> Result<Self> {
        let mut out = self.clone();
        match key {
            "num_bs" => out.num_bs = as_count(key, value)?,
            "num_bands" => out.num_bands = as_count(key, value)?,
            "sinr_threshold" => out.sinr_threshold = value,
            "eta" => out.eta = value,
            "training_duration" => out.training_duration = value,
            "sim_horizon" => out.sim_horizon = value,
            "shadowing_std" => out.shadowing_std = value,
            other => return Err(Error::InvalidConfig(format!("cannot override {other:?}"))),
        }
        out.validate()?;
        Ok(out)
    }
}

fn as_count(key: &str, value: f64) -> Result<usize> {
    if value.fract() != 0.0 || value < 0.0 {
        return Err(Error::InvalidConfig(format!("{key} must be a whole number, got {value}")));
    }
    Ok(value as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = SimConfig::default();
        c.validate().unwrap();
        assert!((c.tx_duration() - 2080.0 / 600.0).abs() < 1e-15);
        assert_eq!(c.interferer_duration(), c.tx_duration());
        assert_eq!(c.area_side * c.area_side, 169e6);
        assert_eq!(c.assignment_space(), 729);
    }

    #[test]
    fn parses_flat_document() {
        let c = SimConfig::from_toml_str(
            "# comment\nnum_bs = 4\nsinr_threshold = -inf\ninterferer_duration = 1.5\n",
        )
        .unwrap();
        assert_eq!(c.num_bs, 4);
        assert_eq!(c.sinr_threshold, f64::NEG_INFINITY);
        assert_eq!(c.interferer_duration(), 1.5);
        assert_eq!(c.num_bands, 3);
    }

    #[test]
    fn rejects_unknown_and_invalid_keys() {
        assert!(SimConfig::from_toml_str("num_bss = 4\n").is_err());
        assert!(SimConfig::from_toml_str("num_bs = 0\n").is_err());
        assert!(SimConfig::from_toml_str("tx_bandwidth = 300000.0\n").is_err());
        assert!(SimConfig::from_toml_str("interferer_bandwidth = 300000.0\n").is_err());
        assert!(SimConfig::from_toml_str("probe_band = 4\n").is_err());
        assert!(SimConfig::from_toml_str("[section]\nnum_bs = 2\n").is_err());
    }

    #[test]
    fn overrides() {
        let c = SimConfig::default().with_override("num_bs", 9.0).unwrap();
        assert_eq!(c.num_bs, 9);
        assert!(SimConfig::default().with_override("num_bs", 2.5).is_err());
        assert!(SimConfig::default().with_override("area_side", 1.0).is_err());
    }
}
