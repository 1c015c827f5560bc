//! The rig configuration document (TOML).
//!
//! Every section is optional and falls back to the rig defaults. Unknown
//! keys are rejected, and cross-field rules are checked after parsing.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::fem::{frequency_grid, RayleighDamping, SpatialLoad};
use crate::grasp::{ContactPlant, Feedback, FuzzySystem, GraspInputs, PidGains, SetpointSource, SimOptions};
use crate::motion::AxisSpec;
use crate::statics::{udl_from_masses, BeamSpec, ComponentMassList, UdlLoad, UdlMode};
use crate::testmatrix::{BandwidthSpec, Controller, Scenario, SensorSuite};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BeamConfig {
    pub rod: BeamSpec,
    /// m, statics span; the rod length when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<f64>,
    pub masses: ComponentMassList,
    /// Rods that share the carried weight (physical mode only).
    pub rods_sharing: u32,
    pub udl_mode: UdlMode,
    /// m⁴, replaces the section value in deflection and stress when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_moment_override: Option<f64>,
}

impl Default for BeamConfig {
    fn default() -> Self {
        BeamConfig {
            rod: BeamSpec::guide_rod(),
            span: None,
            masses: ComponentMassList::actuator(),
            rods_sharing: 2,
            udl_mode: UdlMode::Physical,
            second_moment_override: None,
        }
    }
}

impl BeamConfig {
    pub fn span(&self) -> f64 {
        self.span.unwrap_or(self.rod.length())
    }

    pub fn load(&self) -> Result<UdlLoad> {
        udl_from_masses(&self.masses, &self.rod, self.rods_sharing, self.udl_mode)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FemConfig {
    pub n_elements: usize,
    pub n_modes: usize,
    /// Emit each planar mode twice, once per bending plane.
    pub expand_degenerate: bool,
    pub damping: RayleighDamping,
    /// Hz
    pub f_start: f64,
    /// Hz
    pub f_stop: f64,
    /// Hz
    pub f_step: f64,
    /// Harmonic load amplitude; the rod's share of the carried weight when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excitation: Option<SpatialLoad>,
}

impl Default for FemConfig {
    fn default() -> Self {
        FemConfig {
            n_elements: 64,
            n_modes: 5,
            expand_degenerate: true,
            damping: RayleighDamping::default(),
            f_start: 1.0,
            f_stop: 1000.0,
            f_step: 1.0,
            excitation: None,
        }
    }
}

impl FemConfig {
    pub fn grid(&self) -> Result<Vec<f64>> {
        frequency_grid(self.f_start, self.f_stop, self.f_step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AxesConfig {
    pub x: AxisSpec,
    pub y: AxisSpec,
    pub z: AxisSpec,
}

impl Default for AxesConfig {
    fn default() -> Self {
        AxesConfig {
            x: AxisSpec::rig_default(),
            y: AxisSpec::rig_default(),
            z: AxisSpec::rig_default(),
        }
    }
}

impl AxesConfig {
    pub fn as_array(&self) -> [AxisSpec; 3] {
        [self.x, self.y, self.z]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MotionConfig {
    /// s, trajectory sampling step.
    pub dt: f64,
    /// m, default target of the `move` command.
    pub target: [f64; 3],
}

impl Default for MotionConfig {
    fn default() -> Self {
        MotionConfig {
            dt: 1e-3,
            target: [0.3, 0.3, 0.1],
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackKind {
    Direct,
    /// Through the configured force-sensitive resistor.
    #[default]
    Fsr,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControllerConfig {
    pub plant: ContactPlant,
    pub gains: PidGains,
    /// s
    pub dt: f64,
    /// V
    pub output_limits: [f64; 2],
    /// N
    pub noise_std: f64,
    pub feedback: FeedbackKind,
    /// s, length of a standalone grasp run.
    pub duration: f64,
    pub setpoint: SetpointSource,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        let sim = SimOptions::default();
        ControllerConfig {
            plant: ContactPlant::default(),
            gains: PidGains::default(),
            dt: sim.dt,
            output_limits: [sim.output_limits.0, sim.output_limits.1],
            noise_std: 0.0,
            feedback: FeedbackKind::Fsr,
            duration: 1.0,
            setpoint: SetpointSource::Fuzzy(GraspInputs {
                target_position: 0.3,
                relative_depth: 0.15,
                speed: 0.05,
            }),
        }
    }
}

/// Where the fuzzy system comes from: a rule-base file, an inline table, or
/// the shipped default when neither is given.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FuzzyConfig {
    /// Path to a rule-base TOML file, relative to the config file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rulebase: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<FuzzySystem>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RigConfig {
    pub beam: BeamConfig,
    pub fem: FemConfig,
    pub axes: AxesConfig,
    pub motion: MotionConfig,
    pub sensors: SensorSuite,
    pub controller: ControllerConfig,
    pub fuzzy: FuzzyConfig,
    pub scenario: Scenario,
    pub bandwidth: BandwidthSpec,
    #[serde(skip)]
    resolved_fuzzy: FuzzySystem,
}

impl RigConfig {
    /// Parse, resolve the rule base (relative to `base_dir`) and validate.
    pub fn from_toml(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut cfg: RigConfig = toml::from_str(text).map_err(|e| Error::Config(one_line(&e.to_string())))?;
        cfg.resolve(base_dir)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text, path.parent())
    }

    fn resolve(&mut self, base_dir: Option<&Path>) -> Result<()> {
        self.resolved_fuzzy = match (&self.fuzzy.rulebase, &self.fuzzy.system) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("fuzzy: give either rulebase or system, not both".into()));
            }
            (Some(path), None) => {
                let full = match base_dir {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| Error::Config(format!("cannot read rule base {}: {e}", full.display())))?;
                FuzzySystem::from_toml(&text)?
            }
            (None, Some(system)) => system.clone(),
            (None, None) => FuzzySystem::default(),
        };
        Ok(())
    }

    /// Cross-field checks beyond what each section enforces on parse.
    pub fn validate(&self) -> Result<()> {
        if self.beam.rods_sharing == 0 {
            return Err(Error::invalid("rods_sharing", "at least one rod must carry the load"));
        }
        if let Some(span) = self.beam.span {
            ensure_positive("beam span", span)?;
        }
        if let Some(i) = self.beam.second_moment_override {
            ensure_positive("second moment override", i)?;
        }
        if self.fem.n_elements < 2 {
            return Err(Error::invalid("fem.n_elements", "need at least 2 elements"));
        }
        if self.fem.n_modes == 0 {
            return Err(Error::invalid("fem.n_modes", "need at least one mode"));
        }
        self.fem.damping.validate()?;
        self.fem.grid()?;
        if let Some(SpatialLoad::Point { position, .. }) = self.fem.excitation {
            if !(0.0..=self.beam.rod.length()).contains(&position) {
                return Err(Error::invalid("fem.excitation", "point load must lie on the rod"));
            }
        }
        ensure_positive("motion.dt", self.motion.dt)?;
        check_reachable("motion.target", self.motion.target, &self.axes)?;
        self.sensors.validate()?;
        ensure_positive("controller.duration", self.controller.duration)?;
        ensure_non_negative("controller.noise_std", self.controller.noise_std)?;
        let [lo, hi] = self.controller.output_limits;
        if !(lo < hi) {
            return Err(Error::invalid("controller.output_limits", "need lower < upper"));
        }
        ensure_positive("controller.dt", self.controller.dt)?;
        if self.controller.dt >= self.controller.plant.max_stable_dt() {
            return Err(Error::invalid(
                "controller.dt",
                format!(
                    "must be below 0.1·√(m/k) = {:.3e} s",
                    self.controller.plant.max_stable_dt()
                ),
            ));
        }
        self.scenario.validate()?;
        check_reachable("scenario.place_position", self.scenario.place_position, &self.axes)?;
        self.bandwidth.validate()
    }

    pub fn axes(&self) -> [AxisSpec; 3] {
        self.axes.as_array()
    }

    pub fn fuzzy_system(&self) -> &FuzzySystem {
        &self.resolved_fuzzy
    }

    pub fn sim_options(&self, seed: u64) -> SimOptions {
        SimOptions {
            duration: self.controller.duration,
            dt: self.controller.dt,
            feedback: match self.controller.feedback {
                FeedbackKind::Direct => Feedback::Direct,
                FeedbackKind::Fsr => Feedback::Fsr { spec: self.sensors.fsr },
            },
            output_limits: (self.controller.output_limits[0], self.controller.output_limits[1]),
            noise_std: self.controller.noise_std,
            seed,
        }
    }

    pub fn controller(&self) -> Controller {
        Controller {
            plant: self.controller.plant,
            fuzzy: self.resolved_fuzzy.clone(),
            gains: self.controller.gains,
            sim: self.sim_options(0),
        }
    }

    /// The configuration with the fuzzy system inlined, so that it reloads
    /// without the rule-base file.
    pub fn effective(&self) -> RigConfig {
        RigConfig {
            fuzzy: FuzzyConfig {
                rulebase: None,
                system: Some(self.resolved_fuzzy.clone()),
            },
            ..self.clone()
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}

fn check_reachable(what: &'static str, p: [f64; 3], axes: &AxesConfig) -> Result<()> {
    for (axis, v) in axes.as_array().iter().zip(p) {
        if !axis.contains(v) {
            return Err(Error::invalid(what, format!("{p:?} is outside the axis travel")));
        }
    }
    Ok(())
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
