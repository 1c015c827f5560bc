//! One-dimensional contact plant: the gripper jaw pressing into a compliant object.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

/// `m·ẍ + c·ẋ + k·x = G·u`, contact force `k·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPlant", into = "RawPlant")]
pub struct ContactPlant {
    object_stiffness: f64,
    object_mass: f64,
    damping: f64,
    friction_coefficient: f64,
    actuator_gain: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlant {
    object_stiffness: f64,
    object_mass: f64,
    damping: f64,
    friction_coefficient: f64,
    actuator_gain: f64,
}

impl TryFrom<RawPlant> for ContactPlant {
    type Error = Error;
    fn try_from(r: RawPlant) -> Result<Self> {
        ContactPlant::new(
            r.object_stiffness,
            r.object_mass,
            r.damping,
            r.friction_coefficient,
            r.actuator_gain,
        )
    }
}

impl From<ContactPlant> for RawPlant {
    fn from(p: ContactPlant) -> Self {
        RawPlant {
            object_stiffness: p.object_stiffness,
            object_mass: p.object_mass,
            damping: p.damping,
            friction_coefficient: p.friction_coefficient,
            actuator_gain: p.actuator_gain,
        }
    }
}

impl Default for ContactPlant {
    fn default() -> Self {
        ContactPlant {
            object_stiffness: 5000.0,
            object_mass: 0.1,
            damping: 200.0,
            friction_coefficient: 0.5,
            actuator_gain: 10.0,
        }
    }
}

/// Jaw displacement into the object and its rate.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PlantState {
    pub x: f64,
    pub v: f64,
}

impl ContactPlant {
    pub fn new(stiffness: f64, mass: f64, damping: f64, friction: f64, actuator_gain: f64) -> Result<Self> {
        ensure_positive("object stiffness", stiffness)?;
        ensure_positive("object mass", mass)?;
        ensure_positive("contact damping", damping)?;
        ensure_positive("friction coefficient", friction)?;
        ensure_positive("actuator gain", actuator_gain)?;
        Ok(ContactPlant {
            object_stiffness: stiffness,
            object_mass: mass,
            damping,
            friction_coefficient: friction,
            actuator_gain,
        })
    }

    pub fn stiffness(&self) -> f64 {
        self.object_stiffness
    }

    pub fn mass(&self) -> f64 {
        self.object_mass
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    pub fn friction_coefficient(&self) -> f64 {
        self.friction_coefficient
    }

    /// N per V of actuator command.
    pub fn actuator_gain(&self) -> f64 {
        self.actuator_gain
    }

    /// Largest accepted integration step, `0.1·√(m/k)`.
    pub fn max_stable_dt(&self) -> f64 {
        0.1 * (self.object_mass / self.object_stiffness).sqrt()
    }

    pub fn contact_force(&self, state: &PlantState) -> f64 {
        self.object_stiffness * state.x
    }

    /// Semi-implicit Euler step under actuator force `force`.
    pub fn step(&self, state: &PlantState, force: f64, dt: f64) -> PlantState {
        let a = (force - self.damping * state.v - self.object_stiffness * state.x) / self.object_mass;
        let v = state.v + a * dt;
        PlantState { x: state.x + v * dt, v }
    }
}
