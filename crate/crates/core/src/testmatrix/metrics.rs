//! Scenario definition and the closed-form gripper metrics.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::statics::GRAVITY;

/// Timed target position, rig frame (x, y horizontal; z downward from home).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Waypoint {
    pub t: f64,
    pub position: [f64; 3],
}

/// A gripper test case: the object, how it is held, and how it arrives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    /// kg
    pub object_mass: f64,
    pub friction_coefficient: f64,
    pub n_contact_surfaces: u32,
    /// m/s², peak acceleration while the object is carried.
    pub motion_accel: f64,
    pub safety_factor: f64,
    /// m/s
    pub conveyor_speed: f64,
    /// Belt direction; normalised on use.
    pub conveyor_direction: [f64; 3],
    /// Target path, linearly interpolated. After the last waypoint the target
    /// keeps moving with the conveyor.
    pub target_path: Vec<Waypoint>,
    /// m, where the object is set down.
    pub place_position: [f64; 3],
    /// m, z retraction after the grasp.
    pub lift_height: f64,
    /// m, offset at which positioning efficiency reaches zero.
    pub normalization_radius: f64,
    /// s, limit on closing the grip once in position.
    pub grasp_timeout: f64,
    /// Fractional headroom of the force setpoint over the required force.
    pub grasp_margin: f64,
    /// m, change in ultrasonic range that counts as a target.
    pub detection_threshold: f64,
    /// s, ultrasonic ping interval.
    pub ping_period: f64,
    /// s, give up if nothing is detected or intercepted within this time.
    pub horizon: f64,
    /// m, ultrasonic sensor location.
    pub sensor_position: [f64; 3],
    pub min_efficiency: f64,
    /// Hz
    pub min_bandwidth: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            object_mass: 0.2,
            friction_coefficient: 0.5,
            n_contact_surfaces: 2,
            motion_accel: 0.5,
            safety_factor: 2.0,
            conveyor_speed: 0.02,
            conveyor_direction: [0.0, 1.0, 0.0],
            target_path: vec![Waypoint {
                t: 0.0,
                position: [0.3, 0.1, 0.25],
            }],
            place_position: [0.5, 0.5, 0.2],
            lift_height: 0.1,
            normalization_radius: 0.01,
            grasp_timeout: 2.0,
            grasp_margin: 0.1,
            detection_threshold: 0.05,
            ping_period: 0.01,
            horizon: 30.0,
            sensor_position: [0.3, 0.0, 0.25],
            min_efficiency: 0.9,
            min_bandwidth: 5.0,
        }
    }
}

impl Scenario {
    /// Stationary object at `position`.
    pub fn stationary(position: [f64; 3]) -> Self {
        Scenario {
            conveyor_speed: 0.0,
            target_path: vec![Waypoint { t: 0.0, position }],
            ..Scenario::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("object mass", self.object_mass)?;
        ensure_positive("friction coefficient", self.friction_coefficient)?;
        if self.n_contact_surfaces == 0 {
            return Err(Error::invalid(
                "n_contact_surfaces",
                "need at least one contact surface",
            ));
        }
        ensure_non_negative("motion acceleration", self.motion_accel)?;
        ensure_positive("safety factor", self.safety_factor)?;
        ensure_non_negative("conveyor speed", self.conveyor_speed)?;
        if norm(self.conveyor_direction) == 0.0 || self.conveyor_direction.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("conveyor direction", "must be a finite non-zero vector"));
        }
        if self.target_path.is_empty() {
            return Err(Error::Empty("target path"));
        }
        for w in self.target_path.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(Error::invalid("target path", "waypoint times must increase"));
            }
        }
        if self
            .target_path
            .iter()
            .any(|w| !w.t.is_finite() || w.position.iter().any(|p| !p.is_finite()))
        {
            return Err(Error::invalid("target path", "must be finite"));
        }
        ensure_non_negative("lift height", self.lift_height)?;
        ensure_positive("normalization radius", self.normalization_radius)?;
        ensure_positive("grasp timeout", self.grasp_timeout)?;
        ensure_non_negative("grasp margin", self.grasp_margin)?;
        ensure_positive("detection threshold", self.detection_threshold)?;
        ensure_positive("ping period", self.ping_period)?;
        ensure_positive("horizon", self.horizon)?;
        if !(0.0..=1.0).contains(&self.min_efficiency) {
            return Err(Error::invalid("min_efficiency", "must lie in [0, 1]"));
        }
        ensure_non_negative("min bandwidth", self.min_bandwidth)
    }

    /// Unit belt direction.
    pub fn direction(&self) -> [f64; 3] {
        let n = norm(self.conveyor_direction);
        self.conveyor_direction.map(|v| v / n)
    }

    /// Belt velocity vector, m/s.
    pub fn conveyor_velocity(&self) -> [f64; 3] {
        self.direction().map(|v| v * self.conveyor_speed)
    }

    /// Target centre of gravity at time `t`.
    pub fn target_at(&self, t: f64) -> [f64; 3] {
        let path = &self.target_path;
        let first = path[0];
        if t <= first.t {
            return first.position;
        }
        for w in path.windows(2) {
            if t <= w[1].t {
                let s = (t - w[0].t) / (w[1].t - w[0].t);
                return std::array::from_fn(|i| w[0].position[i] + s * (w[1].position[i] - w[0].position[i]));
            }
        }
        let last = path[path.len() - 1];
        let v = self.conveyor_velocity();
        std::array::from_fn(|i| last.position[i] + v[i] * (t - last.t))
    }
}

pub(crate) fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    norm([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

/// Friction-grip force needed to hold the object: `m·(g + a)·SF / (µ·n)`.
pub fn required_grasp_force(scenario: &Scenario) -> Result<f64> {
    ensure_positive("object mass", scenario.object_mass)?;
    ensure_non_negative("motion acceleration", scenario.motion_accel)?;
    ensure_positive("safety factor", scenario.safety_factor)?;
    let grip = scenario.friction_coefficient * f64::from(scenario.n_contact_surfaces);
    if !(grip > 0.0 && grip.is_finite()) {
        return Err(Error::invalid("friction grip", "µ·n must be positive"));
    }
    Ok(scenario.object_mass * (GRAVITY + scenario.motion_accel) * scenario.safety_factor / grip)
}

/// `1 − min(1, ‖gripper − target‖ / radius)`.
pub fn positioning_efficiency(gripper_center: [f64; 3], target_cg: [f64; 3], normalization_radius: f64) -> Result<f64> {
    ensure_positive("normalization radius", normalization_radius)?;
    Ok(1.0 - (distance(gripper_center, target_cg) / normalization_radius).min(1.0))
}

/// The three test-matrix metrics and whether each meets its requirement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestMatrixReport {
    /// N, required grasp force.
    pub grasping_force: f64,
    /// Hz, relative to the contact plant standing in for the gripper.
    pub operating_bandwidth: f64,
    pub positioning_efficiency: f64,
    pub grasp_pass: bool,
    pub bandwidth_pass: bool,
    pub efficiency_pass: bool,
}

impl TestMatrixReport {
    pub const CSV_HEADER: &'static str =
        "grasping_force_n,operating_bandwidth_hz,positioning_efficiency,grasp_pass,bandwidth_pass,efficiency_pass";

    pub fn passed(&self) -> bool {
        self.grasp_pass && self.bandwidth_pass && self.efficiency_pass
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{:.6},{:.6},{:.6},{},{},{}",
            self.grasping_force,
            self.operating_bandwidth,
            self.positioning_efficiency,
            self.grasp_pass,
            self.bandwidth_pass,
            self.efficiency_pass
        )
    }

    pub fn kv_lines(&self) -> Vec<(&'static str, String)> {
        vec![
            ("grasping_force_n", format!("{:.6}", self.grasping_force)),
            ("operating_bandwidth_hz", format!("{:.6}", self.operating_bandwidth)),
            ("positioning_efficiency", format!("{:.6}", self.positioning_efficiency)),
            ("grasp_pass", self.grasp_pass.to_string()),
            ("bandwidth_pass", self.bandwidth_pass.to_string()),
            ("efficiency_pass", self.efficiency_pass.to_string()),
        ]
    }
}
