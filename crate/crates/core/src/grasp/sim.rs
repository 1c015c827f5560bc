//! Closed fuzzy-PID force loop around the contact plant.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::fuzzy::{fuzzy_desired_force, FuzzySystem, GraspInputs};
use super::pid::{pid_step, PidGains, PidState};
use super::plant::{ContactPlant, PlantState};
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::sensors::{FsrSpec, NoiseSource};

/// Where the desired force comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetpointSource {
    /// Fixed force, N.
    Constant { force: f64 },
    /// Fuzzy system output for fixed inputs.
    Fuzzy(GraspInputs),
    /// `offset + amplitude·sin(2πft)`, N.
    Sine {
        offset: f64,
        amplitude: f64,
        frequency_hz: f64,
    },
}

/// How the controller sees the contact force.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Feedback {
    /// The true contact force.
    #[default]
    Direct,
    /// Read back through a force-sensitive resistor.
    Fsr { spec: FsrSpec },
}

impl Feedback {
    fn measure(&self, force: f64) -> f64 {
        match self {
            Feedback::Direct => force,
            Feedback::Fsr { spec } => spec.measure(force),
        }
    }
}

/// Optional hook that adjusts PID gains each step.
pub trait GainScheduler {
    fn gains(&self, t: f64, error: f64, base: &PidGains) -> PidGains;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimOptions {
    /// s
    pub duration: f64,
    /// s
    pub dt: f64,
    pub feedback: Feedback,
    /// V, actuator command limits.
    pub output_limits: (f64, f64),
    /// N, standard deviation of measurement noise.
    pub noise_std: f64,
    pub seed: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            duration: 1.0,
            dt: 1e-4,
            feedback: Feedback::Direct,
            output_limits: (-24.0, 24.0),
            noise_std: 0.0,
            seed: 0,
        }
    }
}

/// One trace row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraspSample {
    pub t: f64,
    pub desired: f64,
    pub applied: f64,
    pub contact: f64,
    pub error: f64,
}

pub const TRACE_HEADER: &str = "t_s,desired_n,applied_n,contact_n,error_n";

/// Stepwise closed loop. Each call to [`GraspLoop::step`] records the
/// signals at `t = k·dt` and then advances the plant by one step.
pub struct GraspLoop<'a> {
    plant: ContactPlant,
    gains: PidGains,
    pid: PidState,
    state: PlantState,
    setpoint: SetpointSource,
    fuzzy_force: Option<f64>,
    feedback: Feedback,
    noise: NoiseSource,
    noise_std: f64,
    scheduler: Option<&'a dyn GainScheduler>,
    dt: f64,
    step: u64,
    divergence_limit: f64,
}

impl<'a> GraspLoop<'a> {
    pub fn new(
        plant: &ContactPlant,
        fuzzy: &FuzzySystem,
        gains: &PidGains,
        setpoint: &SetpointSource,
        options: &SimOptions,
    ) -> Result<Self> {
        ensure_positive("time step", options.dt)?;
        if options.dt >= plant.max_stable_dt() {
            return Err(Error::invalid(
                "time step",
                format!("{} s is not below 0.1·√(m/k) = {} s", options.dt, plant.max_stable_dt()),
            ));
        }
        ensure_non_negative("noise std", options.noise_std)?;
        if let Feedback::Fsr { spec } = &options.feedback {
            spec.validate()?;
        }
        match setpoint {
            SetpointSource::Constant { force } if !force.is_finite() => {
                return Err(Error::invalid("setpoint", "force must be finite"));
            }
            SetpointSource::Sine {
                offset,
                amplitude,
                frequency_hz,
            } => {
                if !offset.is_finite() {
                    return Err(Error::invalid("setpoint", "offset must be finite"));
                }
                ensure_non_negative("setpoint amplitude", *amplitude)?;
                ensure_positive("setpoint frequency", *frequency_hz)?;
            }
            _ => {}
        }
        let fuzzy_force = match setpoint {
            SetpointSource::Fuzzy(inputs) => Some(fuzzy_desired_force(inputs, fuzzy)?),
            _ => None,
        };
        let out = fuzzy.output().universe();
        Ok(GraspLoop {
            plant: *plant,
            gains: *gains,
            pid: PidState::new(options.output_limits)?,
            state: PlantState::default(),
            setpoint: *setpoint,
            fuzzy_force,
            feedback: options.feedback,
            noise: NoiseSource::seeded(options.seed),
            noise_std: options.noise_std,
            scheduler: None,
            dt: options.dt,
            step: 0,
            divergence_limit: 10.0 * out[0].abs().max(out[1].abs()),
        })
    }

    pub fn with_scheduler(mut self, scheduler: &'a dyn GainScheduler) -> Self {
        self.scheduler = Some(scheduler);
        self
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    pub fn contact_force(&self) -> f64 {
        self.plant.contact_force(&self.state)
    }

    pub fn desired_force(&self, t: f64) -> f64 {
        match self.setpoint {
            SetpointSource::Constant { force } => force,
            SetpointSource::Fuzzy(_) => self.fuzzy_force.unwrap_or(0.0),
            SetpointSource::Sine {
                offset,
                amplitude,
                frequency_hz,
            } => offset + amplitude * (2.0 * PI * frequency_hz * t).sin(),
        }
    }

    pub fn step(&mut self) -> Result<GraspSample> {
        let t = self.time();
        let desired = self.desired_force(t);
        let contact = self.contact_force();
        let measured = self.noise.perturb(self.feedback.measure(contact), self.noise_std);
        let error = desired - measured;
        let gains = match self.scheduler {
            Some(s) => s.gains(t, error, &self.gains),
            None => self.gains,
        };
        let u = pid_step(&gains, &mut self.pid, error, self.dt);
        let applied = self.plant.actuator_gain() * u;
        if !(applied.abs() <= self.divergence_limit && contact.abs() <= self.divergence_limit) {
            let force = if contact.abs() > applied.abs() {
                contact
            } else {
                applied
            };
            return Err(Error::Unstable { t, force });
        }
        self.state = self.plant.step(&self.state, applied, self.dt);
        self.step += 1;
        Ok(GraspSample {
            t,
            desired,
            applied,
            contact,
            error,
        })
    }
}

/// Run the closed loop for `options.duration` and return the full trace.
pub fn grasp_simulate(
    plant: &ContactPlant,
    fuzzy: &FuzzySystem,
    gains: &PidGains,
    setpoint: &SetpointSource,
    options: &SimOptions,
) -> Result<Vec<GraspSample>> {
    ensure_non_negative("duration", options.duration)?;
    let mut lp = GraspLoop::new(plant, fuzzy, gains, setpoint, options)?;
    let steps = (options.duration / options.dt).round() as u64;
    (0..=steps).map(|_| lp.step()).collect()
}
