//! Build configuration.
//!
//! Every knob of dataset generation lives here, with defaults matching the
//! documented generation procedure. Configs load from TOML; the manifest
//! embeds a snapshot of the effective config so a build can be reproduced
//! from its output alone.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub sampling: SamplingConfig,
    pub warp: WarpConfig,
    pub roi: RoiConfig,
    pub build: BuildConfig,
}

/// How clean slices are drawn from input volumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    /// Slices drawn per anatomical axis per volume.
    pub per_axis: usize,
    /// Slices whose tissue fraction falls below this are rejected.
    pub min_foreground_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WarpConfig {
    /// Exponent offset of the radial warp.
    pub epsilon: f64,
}

/// Corruption region sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoiConfig {
    pub count_min: usize,
    pub count_max: usize,
    pub radius_min: f64,
    pub radius_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BuildConfig {
    /// Accepted samples per PSNR band.
    pub n_per_bin: usize,
    /// Worker threads; 0 lets the runtime decide.
    pub jobs: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            per_axis: 50,
            min_foreground_fraction: 0.05,
        }
    }
}

impl Default for WarpConfig {
    fn default() -> Self {
        WarpConfig {
            epsilon: crate::warp::DEFAULT_EPSILON,
        }
    }
}

impl Default for RoiConfig {
    fn default() -> Self {
        RoiConfig {
            count_min: 2,
            count_max: 6,
            radius_min: 16.0,
            radius_max: 48.0,
        }
    }
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            n_per_bin: 75,
            jobs: 0,
        }
    }
}

impl Default for Config {
    fn default() -> Self {
        Config {
            sampling: SamplingConfig::default(),
            warp: WarpConfig::default(),
            roi: RoiConfig::default(),
            build: BuildConfig::default(),
        }
    }
}

impl Config {
    pub fn from_toml_str(s: &str) -> Result<Config> {
        let cfg: Config = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Config> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&s)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.sampling.per_axis == 0 {
            return Err(Error::Config("sampling.per_axis must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.sampling.min_foreground_fraction) {
            return Err(Error::Config(
                "sampling.min_foreground_fraction must lie in [0, 1]".into(),
            ));
        }
        if self.warp.epsilon < 0.0 {
            return Err(Error::Config("warp.epsilon must be non-negative".into()));
        }
        if self.roi.count_min == 0 || self.roi.count_min > self.roi.count_max {
            return Err(Error::Config(
                "roi.count_min must be in 1..=roi.count_max".into(),
            ));
        }
        if !(self.roi.radius_min > 0.0 && self.roi.radius_min <= self.roi.radius_max) {
            return Err(Error::Config(
                "roi radius range must satisfy 0 < radius_min <= radius_max".into(),
            ));
        }
        if self.build.n_per_bin == 0 {
            return Err(Error::Config("build.n_per_bin must be positive".into()));
        }
        Ok(())
    }
}
