//! TOML tool configuration: calibration, design defaults, limits and seed.
//! Every key is optional; missing keys take the built-in defaults and
//! unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::berlab::OokParams;
use crate::devicemodels::{Calibration, LnaDesign, MatchingNetwork, MixerDesign};
use crate::error::{Error, Result};
use crate::explorer::{DesignPoint, ExplorerSettings, SweepSpec};
use crate::linkbudget::LinkParams;
use crate::npathsim::NfSettings;

/// Environment variable naming a config file when `--config` is absent.
pub const CONFIG_ENV: &str = "MEDRX_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Defaults {
    pub link: LinkParams,
    pub lna: LnaDesign,
    pub mixer: MixerDesign,
    pub matching: MatchingNetwork,
    pub ook: OokParams,
}

impl Default for Defaults {
    fn default() -> Self {
        Self {
            link: LinkParams::default(),
            lna: LnaDesign::default(),
            mixer: MixerDesign::default(),
            matching: MatchingNetwork::default(),
            ook: OokParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Limits {
    pub max_grid: usize,
    pub max_sim_samples: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_grid: 100_000, max_sim_samples: 1 << 26 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplorerSection {
    /// dB
    pub implementation_loss: f64,
    /// dB
    pub nf_budget: f64,
    /// Design space; its fixed point comes from `defaults`.
    pub axes: Vec<crate::explorer::Axis>,
    pub objectives: Vec<crate::explorer::Objective>,
}

impl Default for ExplorerSection {
    fn default() -> Self {
        let space = SweepSpec::default();
        let s = ExplorerSettings::default();
        Self {
            implementation_loss: s.implementation_loss,
            nf_budget: s.nf_budget,
            axes: space.axes,
            objectives: space.objectives,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToolConfig {
    pub seed: u64,
    pub calibration: Calibration,
    pub defaults: Defaults,
    pub limits: Limits,
    pub explorer: ExplorerSection,
    pub npathsim: NfSettings,
}

impl Default for ToolConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            calibration: Calibration::default(),
            defaults: Defaults::default(),
            limits: Limits::default(),
            explorer: ExplorerSection::default(),
            npathsim: NfSettings::default(),
        }
    }
}

impl ToolConfig {
    /// Parse TOML text over the defaults. A mixer without its own
    /// `rsw_unit` inherits the calibrated one.
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let mut cfg: ToolConfig = raw.clone().try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let mixer_has_rsw = raw
            .get("defaults")
            .and_then(|d| d.get("mixer"))
            .and_then(|m| m.get("rsw_unit"))
            .is_some();
        if !mixer_has_rsw {
            cfg.defaults.mixer.rsw_unit = cfg.calibration.rsw_unit;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// `explicit`, else the environment variable, else built-in defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self> {
        match explicit {
            Some(p) => Self::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
                _ => {
                    let mut cfg = Self::default();
                    cfg.defaults.mixer.rsw_unit = cfg.calibration.rsw_unit;
                    Ok(cfg)
                }
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.calibration.validate()?;
        self.defaults.link.validate()?;
        self.defaults.mixer.validate()?;
        self.defaults.lna.validate(&self.calibration.transistor)?;
        self.defaults.ook.validate()?;
        self.defaults.matching.impedance(self.defaults.link.carrier_freq)?;
        if self.limits.max_grid == 0 || self.limits.max_sim_samples == 0 {
            return Err(Error::domain("limits", "must be positive"));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form of the resolved config.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        format!("{:x}", Sha256::digest(json.as_bytes()))
    }

    pub fn explorer_settings(&self) -> ExplorerSettings {
        ExplorerSettings {
            calibration: self.calibration.clone(),
            implementation_loss: self.explorer.implementation_loss,
            nf_budget: self.explorer.nf_budget,
            max_grid: self.limits.max_grid,
        }
    }

    pub fn design_point(&self) -> DesignPoint {
        let d = &self.defaults;
        DesignPoint { lna: d.lna, mixer: d.mixer, matching: d.matching, link: d.link, data_rate: d.link.data_rate }
    }

    pub fn space(&self) -> SweepSpec {
        SweepSpec {
            axes: self.explorer.axes.clone(),
            fixed: self.design_point(),
            objectives: self.explorer.objectives.clone(),
        }
    }
}
