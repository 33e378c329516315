//! TOML run configuration.
//!
//! Every section is optional and falls back to the documented defaults.
//! Unknown keys are rejected at parse time.
//!
//! ```toml
//! seed = 7
//!
//! [channel]
//! fiber_loss_db_per_km = 0.2
//!
//! [detector]
//! dark_count_prob = 1e-8
//!
//! [protocol]
//! enhancement_factor = 1.51
//!
//! [sweep]
//! start_km = 0.0
//! stop_km = 500.0
//! step_km = 10.0
//!
//! [budget]
//! wavelengths_nm = [1550.0, 2200.0]
//! max_photons_per_pulse = 1e-7
//! components = [{ path = "filter.csv", kind = "attenuation" }]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::attack::OptimizerSettings;
use crate::isolation::{ProfileKind, DEFAULT_RESPONSIVITY_FLOOR_DB};
use crate::keyrate::{ChannelModel, DetectorModel, ProtocolParams};
use crate::modulation::{FastPdModel, LockedLaserResponse, ModulationPattern, PowerMeterModel, SnspdModel};
use crate::validate::{Checker, Validate, Violation};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Keyrate,
    Optimize,
    AttackSweep,
    Modulation,
    Spectrum,
    Budget,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Keyrate => "keyrate",
            Scenario::Optimize => "optimize",
            Scenario::AttackSweep => "attack-sweep",
            Scenario::Modulation => "modulation",
            Scenario::Spectrum => "spectrum",
            Scenario::Budget => "budget",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Scenario the file is meant for; `validate` uses it when present.
    pub scenario: Option<Scenario>,
    pub seed: Option<u64>,
    pub channel: ChannelModel,
    pub detector: DetectorModel,
    pub protocol: ProtocolParams,
    pub optimizer: OptimizerSettings,
    pub sweep: SweepConfig,
    pub modulation: ModulationConfig,
    pub budget: BudgetConfig,
}

/// Distances for the key-rate scenarios: an explicit list, or a range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub distances_km: Option<Vec<f64>>,
    pub start_km: f64,
    pub stop_km: f64,
    pub step_km: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            distances_km: None,
            start_km: 0.0,
            stop_km: 500.0,
            step_km: 10.0,
        }
    }
}

impl SweepConfig {
    pub fn distances(&self) -> Vec<f64> {
        if let Some(d) = &self.distances_km {
            return d.clone();
        }
        if !(self.step_km > 0.0) || self.stop_km < self.start_km {
            return Vec::new();
        }
        let n = ((self.stop_km - self.start_km) / self.step_km + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start_km + i as f64 * self.step_km).collect()
    }
}

impl Validate for SweepConfig {
    fn violations(&self) -> Vec<Violation> {
        let mut c = Checker::new("SweepConfig");
        match &self.distances_km {
            Some(d) => {
                c.check(!d.is_empty(), "distances_km", || "must not be empty".into());
                c.check(d.iter().all(|x| x.is_finite() && *x >= 0.0), "distances_km", || {
                    "every distance must be finite and >= 0".into()
                });
                c.check(d.windows(2).all(|w| w[0] <= w[1]), "distances_km", || {
                    "must be sorted ascending".into()
                });
            }
            None => {
                c.check(self.start_km >= 0.0 && self.start_km.is_finite(), "start_km", || {
                    format!("must be finite and >= 0, got {}", self.start_km)
                });
                c.check(self.step_km > 0.0 && self.step_km.is_finite(), "step_km", || {
                    format!("must be > 0, got {}", self.step_km)
                });
                c.check(
                    self.stop_km >= self.start_km && self.stop_km.is_finite(),
                    "stop_km",
                    || format!("must be finite and >= start_km, got {}", self.stop_km),
                );
            }
        }
        c.finish()
    }
}

/// Calibration of the locked-laser gain against the SNSPD transient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationConfig {
    pub enabled: bool,
    /// Pattern height treated as the largest tested amplitude.
    pub max_height: f64,
    /// Relative transient in binned mean photon number at `max_height`.
    pub target_peak: f64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            max_height: 0.5,
            target_peak: 0.51,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModulationConfig {
    pub pattern: ModulationPattern,
    /// Heights to sweep; the pattern's own height is used when empty.
    pub heights: Vec<f64>,
    pub sample_rate_hz: f64,
    /// Number of modulation periods in the synthesised trace.
    pub periods: u32,
    pub laser: LockedLaserResponse,
    pub calibration: CalibrationConfig,
    pub power_meter: PowerMeterModel,
    pub integration_times_s: Vec<f64>,
    pub windows: u64,
    pub fast_pd: FastPdModel,
    pub snspd: SnspdModel,
    /// Half-width of the carrier passband ahead of the sideband power meter.
    pub reject_halfwidth_hz: f64,
}

impl Default for ModulationConfig {
    fn default() -> Self {
        Self {
            pattern: ModulationPattern::default(),
            heights: (1..=10).map(|i| i as f64 / 20.0).collect(),
            sample_rate_hz: 1e12,
            periods: 1,
            laser: LockedLaserResponse::default(),
            calibration: CalibrationConfig::default(),
            power_meter: PowerMeterModel::default(),
            integration_times_s: vec![25e-6, 50e-6, 100e-6],
            windows: 100_000,
            fast_pd: FastPdModel::default(),
            snspd: SnspdModel::default(),
            reject_halfwidth_hz: 0.5e9,
        }
    }
}

impl ModulationConfig {
    pub fn heights(&self) -> Vec<f64> {
        if self.heights.is_empty() {
            vec![self.pattern.height]
        } else {
            self.heights.clone()
        }
    }
}

impl Validate for ModulationConfig {
    fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        for h in self.heights() {
            v.extend(self.pattern.with_height(h).violations());
        }
        v.dedup();
        v.extend(self.laser.violations());
        v.extend(self.power_meter.violations());
        v.extend(self.fast_pd.violations());
        v.extend(self.snspd.violations());
        let mut c = Checker::new("ModulationConfig");
        if c.finite(self.sample_rate_hz, "sample_rate_hz") {
            c.check(self.sample_rate_hz > 0.0, "sample_rate_hz", || {
                format!("must be > 0, got {}", self.sample_rate_hz)
            });
            let per_lobe = self.pattern.width_s * self.sample_rate_hz;
            c.check(per_lobe >= 10.0 - 1e-9, "sample_rate_hz", || {
                format!("resolves only {per_lobe:.2} samples per lobe; need 10")
            });
            c.check(
                self.sample_rate_hz >= self.fast_pd.sampling_rate_hz,
                "sample_rate_hz",
                || {
                    format!(
                        "must be >= the fast photodiode sampling rate ({} Hz)",
                        self.fast_pd.sampling_rate_hz
                    )
                },
            );
        }
        c.check(self.periods >= 1, "periods", || "must be >= 1".into());
        c.check(self.windows >= 2, "windows", || {
            format!("must be >= 2, got {}", self.windows)
        });
        c.check(
            self.integration_times_s.iter().all(|t| *t > 0.0 && t.is_finite()),
            "integration_times_s",
            || "every integration time must be > 0".into(),
        );
        c.check(self.reject_halfwidth_hz >= 0.0, "reject_halfwidth_hz", || {
            format!("must be >= 0, got {}", self.reject_halfwidth_hz)
        });
        c.check(
            self.reject_halfwidth_hz < 1.0 / self.pattern.period_s,
            "reject_halfwidth_hz",
            || {
                format!(
                    "must be below the first sideband at {} Hz, got {}",
                    1.0 / self.pattern.period_s,
                    self.reject_halfwidth_hz
                )
            },
        );
        if self.calibration.enabled {
            c.check(
                self.calibration.max_height > 0.0 && self.calibration.max_height <= 1.0,
                "calibration.max_height",
                || format!("must lie in (0, 1], got {}", self.calibration.max_height),
            );
            c.check(self.calibration.target_peak > 0.0, "calibration.target_peak", || {
                format!("must be > 0, got {}", self.calibration.target_peak)
            });
        }
        v.extend(c.finish());
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentConfig {
    pub path: PathBuf,
    #[serde(default = "default_component_kind")]
    pub kind: ProfileKind,
}

fn default_component_kind() -> ProfileKind {
    ProfileKind::Attenuation
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetConfig {
    pub wavelengths_nm: Vec<f64>,
    pub pulse_rate_hz: f64,
    /// Required for the budget scenario: there is no agreed default bound.
    pub max_photons_per_pulse: Option<f64>,
    pub components: Vec<ComponentConfig>,
    pub responsivity_floor_db: f64,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self {
            wavelengths_nm: vec![1550.0],
            pulse_rate_hz: 1e9,
            max_photons_per_pulse: None,
            components: Vec::new(),
            responsivity_floor_db: DEFAULT_RESPONSIVITY_FLOOR_DB,
        }
    }
}

impl Validate for BudgetConfig {
    fn violations(&self) -> Vec<Violation> {
        let mut c = Checker::new("BudgetConfig");
        c.check(!self.wavelengths_nm.is_empty(), "wavelengths_nm", || {
            "must not be empty".into()
        });
        c.check(
            self.wavelengths_nm.iter().all(|w| *w > 0.0 && w.is_finite()),
            "wavelengths_nm",
            || "every wavelength must be > 0".into(),
        );
        c.check(
            self.pulse_rate_hz > 0.0 && self.pulse_rate_hz.is_finite(),
            "pulse_rate_hz",
            || format!("must be > 0, got {}", self.pulse_rate_hz),
        );
        match self.max_photons_per_pulse {
            None => c.check(false, "max_photons_per_pulse", || "is required".into()),
            Some(m) => c.check(m > 0.0 && m.is_finite(), "max_photons_per_pulse", || {
                format!("must be > 0, got {m}")
            }),
        }
        c.finish()
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let mut cfg = Self::from_toml_str(&text)?;
        // component paths are relative to the config file
        if let Some(dir) = path.parent() {
            for comp in &mut cfg.budget.components {
                if comp.path.is_relative() {
                    comp.path = dir.join(&comp.path);
                }
            }
        }
        Ok(cfg)
    }

    /// Invariant violations for the sections a scenario reads. With `None`,
    /// every section except the budget target is checked.
    pub fn violations_for(&self, scenario: Option<Scenario>) -> Vec<Violation> {
        let mut v = Vec::new();
        let keyrate = |v: &mut Vec<Violation>| {
            v.extend(self.channel.violations());
            v.extend(self.detector.violations());
            v.extend(self.protocol.violations());
        };
        match scenario {
            Some(Scenario::Keyrate) => {
                keyrate(&mut v);
                v.extend(self.sweep.violations());
            }
            Some(Scenario::Optimize) | Some(Scenario::AttackSweep) => {
                keyrate(&mut v);
                v.extend(self.sweep.violations());
                v.extend(self.optimizer.violations());
            }
            Some(Scenario::Modulation) | Some(Scenario::Spectrum) => v.extend(self.modulation.violations()),
            Some(Scenario::Budget) => v.extend(self.budget.violations()),
            None => {
                keyrate(&mut v);
                v.extend(self.sweep.violations());
                v.extend(self.optimizer.violations());
                v.extend(self.modulation.violations());
            }
        }
        v
    }
}
