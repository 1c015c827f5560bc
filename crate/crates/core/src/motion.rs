//! Lead-screw stepper axes of the Cartesian gantry.
//!
//! Axis positions are stored as signed microstep counts, so every committed
//! position is an exact multiple of the microstep distance. Motion follows
//! trapezoidal (or triangular, for short moves) velocity profiles; the motor
//! is assumed never to lose steps.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

/// Allowed driver microstep settings.
pub const MICROSTEP_MODES: [u32; 6] = [1, 2, 4, 8, 16, 32];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LeadScrewRaw", into = "LeadScrewRaw")]
pub struct LeadScrewSpec {
    pitch: f64,
    starts: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LeadScrewRaw {
    pitch: f64,
    starts: u32,
    #[serde(default)]
    lead: Option<f64>,
}

impl TryFrom<LeadScrewRaw> for LeadScrewSpec {
    type Error = Error;
    fn try_from(raw: LeadScrewRaw) -> Result<Self> {
        let spec = LeadScrewSpec::new(raw.pitch, raw.starts)?;
        if let Some(lead) = raw.lead {
            if (lead - spec.lead()).abs() > 1e-12 * spec.lead() {
                return Err(Error::invalid(
                    "lead screw",
                    format!(
                        "lead {lead} is inconsistent with {} starts × {} pitch",
                        raw.starts, raw.pitch
                    ),
                ));
            }
        }
        Ok(spec)
    }
}

impl From<LeadScrewSpec> for LeadScrewRaw {
    fn from(s: LeadScrewSpec) -> Self {
        LeadScrewRaw {
            pitch: s.pitch,
            starts: s.starts,
            lead: Some(s.lead()),
        }
    }
}

impl LeadScrewSpec {
    pub fn new(pitch: f64, starts: u32) -> Result<Self> {
        ensure_positive("screw pitch", pitch)?;
        if starts == 0 {
            return Err(Error::invalid("screw starts", "must be at least 1"));
        }
        Ok(Self { pitch, starts })
    }

    /// Four-start trapezoidal screw, 2 mm pitch.
    pub fn rig_default() -> Self {
        Self {
            pitch: 0.002,
            starts: 4,
        }
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn starts(&self) -> u32 {
        self.starts
    }

    /// Travel per revolution.
    pub fn lead(&self) -> f64 {
        f64::from(self.starts) * self.pitch
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepperRaw", into = "StepperRaw")]
pub struct StepperSpec {
    full_steps_per_rev: u32,
    microstepping: u32,
    holding_torque: f64,
    phase_current: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepperRaw {
    full_steps_per_rev: u32,
    microstepping: u32,
    holding_torque: f64,
    phase_current: f64,
}

impl TryFrom<StepperRaw> for StepperSpec {
    type Error = Error;
    fn try_from(r: StepperRaw) -> Result<Self> {
        StepperSpec::new(r.full_steps_per_rev, r.microstepping, r.holding_torque, r.phase_current)
    }
}

impl From<StepperSpec> for StepperRaw {
    fn from(s: StepperSpec) -> Self {
        StepperRaw {
            full_steps_per_rev: s.full_steps_per_rev,
            microstepping: s.microstepping,
            holding_torque: s.holding_torque,
            phase_current: s.phase_current,
        }
    }
}

impl StepperSpec {
    pub fn new(full_steps_per_rev: u32, microstepping: u32, holding_torque: f64, phase_current: f64) -> Result<Self> {
        if full_steps_per_rev == 0 {
            return Err(Error::invalid("full_steps_per_rev", "must be at least 1"));
        }
        if !MICROSTEP_MODES.contains(&microstepping) {
            return Err(Error::invalid(
                "microstepping",
                format!("{microstepping} is not one of {MICROSTEP_MODES:?}"),
            ));
        }
        ensure_positive("holding_torque", holding_torque)?;
        ensure_positive("phase_current", phase_current)?;
        Ok(Self {
            full_steps_per_rev,
            microstepping,
            holding_torque,
            phase_current,
        })
    }

    /// NEMA17, 5.5 kg·cm at 1.5 A/phase, 1.8° steps, 1/16 microstepping.
    pub fn nema17() -> Self {
        Self {
            full_steps_per_rev: 200,
            microstepping: 16,
            holding_torque: 0.53955,
            phase_current: 1.5,
        }
    }

    pub fn full_steps_per_rev(&self) -> u32 {
        self.full_steps_per_rev
    }

    pub fn microstepping(&self) -> u32 {
        self.microstepping
    }

    /// N·m
    pub fn holding_torque(&self) -> f64 {
        self.holding_torque
    }

    pub fn phase_current(&self) -> f64 {
        self.phase_current
    }

    pub fn microsteps_per_rev(&self) -> u32 {
        self.full_steps_per_rev * self.microstepping
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AxisRaw", into = "AxisRaw")]
pub struct AxisSpec {
    screw: LeadScrewSpec,
    motor: StepperSpec,
    travel_min: f64,
    travel_max: f64,
    v_max: f64,
    a_max: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisRaw {
    screw: LeadScrewSpec,
    motor: StepperSpec,
    travel_min: f64,
    travel_max: f64,
    v_max: f64,
    a_max: f64,
}

impl TryFrom<AxisRaw> for AxisSpec {
    type Error = Error;
    fn try_from(r: AxisRaw) -> Result<Self> {
        AxisSpec::new(r.screw, r.motor, r.travel_min, r.travel_max, r.v_max, r.a_max)
    }
}

impl From<AxisSpec> for AxisRaw {
    fn from(a: AxisSpec) -> Self {
        AxisRaw {
            screw: a.screw,
            motor: a.motor,
            travel_min: a.travel_min,
            travel_max: a.travel_max,
            v_max: a.v_max,
            a_max: a.a_max,
        }
    }
}

impl AxisSpec {
    pub fn new(
        screw: LeadScrewSpec,
        motor: StepperSpec,
        travel_min: f64,
        travel_max: f64,
        v_max: f64,
        a_max: f64,
    ) -> Result<Self> {
        if !(travel_min.is_finite() && travel_max.is_finite() && travel_min < travel_max) {
            return Err(Error::invalid(
                "axis travel",
                format!("need min < max, got [{travel_min}, {travel_max}]"),
            ));
        }
        ensure_positive("v_max", v_max)?;
        ensure_positive("a_max", a_max)?;
        Ok(Self {
            screw,
            motor,
            travel_min,
            travel_max,
            v_max,
            a_max,
        })
    }

    /// 600 mm of travel on the default screw and motor.
    pub fn rig_default() -> Self {
        Self {
            screw: LeadScrewSpec::rig_default(),
            motor: StepperSpec::nema17(),
            travel_min: 0.0,
            travel_max: 0.6,
            v_max: 0.1,
            a_max: 0.5,
        }
    }

    pub fn screw(&self) -> &LeadScrewSpec {
        &self.screw
    }

    pub fn motor(&self) -> &StepperSpec {
        &self.motor
    }

    pub fn travel(&self) -> (f64, f64) {
        (self.travel_min, self.travel_max)
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn a_max(&self) -> f64 {
        self.a_max
    }

    /// Linear travel of one microstep.
    pub fn microstep_distance(&self) -> f64 {
        self.screw.lead() / f64::from(self.motor.microsteps_per_rev())
    }

    pub fn contains(&self, position: f64) -> bool {
        (self.travel_min..=self.travel_max).contains(&position)
    }
}

/// Displacement produced by `steps` microsteps.
pub fn steps_to_displacement(steps: i64, axis: &AxisSpec) -> f64 {
    steps as f64 * axis.screw.lead() / f64::from(axis.motor.microsteps_per_rev())
}

/// Nearest microstep count for an absolute position inside the travel range.
pub fn displacement_to_steps(position: f64, axis: &AxisSpec) -> Result<i64> {
    if !axis.contains(position) {
        return Err(Error::OutsideTravel {
            requested: position,
            min: axis.travel_min,
            max: axis.travel_max,
        });
    }
    Ok((position / axis.microstep_distance()).round() as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileShape {
    Trapezoid,
    Triangle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionProfile {
    pub distance: f64,
    pub v_max: f64,
    pub a_max: f64,
    pub t_accel: f64,
    pub t_cruise: f64,
    pub t_total: f64,
    pub shape: ProfileShape,
}

/// Time-optimal profile for `distance` under speed and acceleration limits.
pub fn plan_trapezoid(distance: f64, v_max: f64, a_max: f64) -> Result<MotionProfile> {
    if !(distance.is_finite() && distance >= 0.0) {
        return Err(Error::invalid(
            "move distance",
            format!("must be non-negative, got {distance}"),
        ));
    }
    ensure_positive("v_max", v_max)?;
    ensure_positive("a_max", a_max)?;
    let (t_accel, t_cruise, shape) = if distance > v_max * v_max / a_max {
        let ta = v_max / a_max;
        (ta, (distance - v_max * ta) / v_max, ProfileShape::Trapezoid)
    } else {
        ((distance / a_max).sqrt(), 0.0, ProfileShape::Triangle)
    };
    Ok(MotionProfile {
        distance,
        v_max,
        a_max,
        t_accel,
        t_cruise,
        t_total: 2.0 * t_accel + t_cruise,
        shape,
    })
}

impl MotionProfile {
    /// Peak speed actually reached.
    pub fn peak_velocity(&self) -> f64 {
        self.a_max * self.t_accel
    }

    pub fn velocity_at(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.t_total);
        let vp = self.peak_velocity();
        if t < self.t_accel {
            self.a_max * t
        } else if t <= self.t_accel + self.t_cruise {
            vp
        } else {
            (self.a_max * (self.t_total - t)).max(0.0)
        }
    }

    pub fn position_at(&self, t: f64) -> f64 {
        if t >= self.t_total {
            return self.distance;
        }
        let t = t.max(0.0);
        let vp = self.peak_velocity();
        let d_accel = 0.5 * self.a_max * self.t_accel * self.t_accel;
        if t < self.t_accel {
            0.5 * self.a_max * t * t
        } else if t <= self.t_accel + self.t_cruise {
            d_accel + vp * (t - self.t_accel)
        } else {
            let rem = self.t_total - t;
            self.distance - 0.5 * self.a_max * rem * rem
        }
    }

    /// Closed-form area under the velocity curve.
    pub fn integrated_distance(&self) -> f64 {
        self.peak_velocity() * (self.t_accel + self.t_cruise)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AxisState {
    pub step_count: i64,
    pub velocity: f64,
    pub homed: bool,
}

impl AxisState {
    /// Homed state at the given step count.
    pub fn homed_at(step_count: i64) -> Self {
        Self {
            step_count,
            velocity: 0.0,
            homed: true,
        }
    }

    pub fn position(&self, axis: &AxisSpec) -> f64 {
        steps_to_displacement(self.step_count, axis)
    }
}

/// Drives an axis to `travel_min`, its home.
pub fn home(axis: &AxisSpec) -> AxisState {
    AxisState::homed_at((axis.travel_min / axis.microstep_distance()).ceil() as i64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub step_count: i64,
    pub position: f64,
    pub velocity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub profile: MotionProfile,
    pub final_state: AxisState,
}

/// Plans and integrates a move to `target` at time step `dt`.
///
/// The target is quantised to the nearest microstep and checked against the
/// travel range before any motion. The last sample lands exactly at the
/// profile's end time.
pub fn simulate_move(axis: &AxisSpec, state: &AxisState, target: f64, dt: f64) -> Result<Trajectory> {
    ensure_positive("dt", dt)?;
    let target_steps = displacement_to_steps(target, axis)?;
    simulate_move_steps(axis, state, target_steps, dt)
}

/// As [`simulate_move`] with the target given in microsteps.
pub fn simulate_move_steps(axis: &AxisSpec, state: &AxisState, target_steps: i64, dt: f64) -> Result<Trajectory> {
    ensure_positive("dt", dt)?;
    if !state.homed {
        return Err(Error::invalid("axis state", "axis must be homed before moving"));
    }
    let target_pos = steps_to_displacement(target_steps, axis);
    if !axis.contains(target_pos) {
        return Err(Error::OutsideTravel {
            requested: target_pos,
            min: axis.travel_min,
            max: axis.travel_max,
        });
    }
    let delta = target_steps - state.step_count;
    let dir = delta.signum();
    let ustep = axis.microstep_distance();
    let profile = plan_trapezoid(delta.unsigned_abs() as f64 * ustep, axis.v_max, axis.a_max)?;

    let sample = |t: f64| -> TrajectorySample {
        let travelled = ((profile.position_at(t) / ustep).round() as i64).min(delta.abs());
        let steps = state.step_count + dir * travelled;
        TrajectorySample {
            t,
            step_count: steps,
            position: steps_to_displacement(steps, axis),
            velocity: dir as f64 * profile.velocity_at(t),
        }
    };

    let mut samples = Vec::new();
    let mut k = 0u64;
    loop {
        let t = k as f64 * dt;
        if t >= profile.t_total {
            break;
        }
        samples.push(sample(t));
        k += 1;
    }
    let mut last = sample(profile.t_total);
    last.step_count = target_steps;
    last.position = target_pos;
    last.velocity = 0.0;
    samples.push(last);

    Ok(Trajectory {
        samples,
        profile,
        final_state: AxisState::homed_at(target_steps),
    })
}

/// Identifies one of the three gantry axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisId {
    X,
    Y,
    Z,
}

impl AxisId {
    pub const ALL: [AxisId; 3] = [AxisId::X, AxisId::Y, AxisId::Z];

    pub fn label(self) -> char {
        match self {
            AxisId::X => 'x',
            AxisId::Y => 'y',
            AxisId::Z => 'z',
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Gripper position from the three prismatic axis positions. The z axis
/// carries the gripper and is measured downward from the home plane.
pub fn rig_pose(axes: &[AxisSpec; 3], states: &[AxisState; 3]) -> Result<[f64; 3]> {
    let mut pose = [0.0; 3];
    for id in AxisId::ALL {
        let i = id.index();
        if !states[i].homed {
            return Err(Error::Unhomed(id.label()));
        }
        pose[i] = states[i].position(&axes[i]);
    }
    Ok(pose)
}

/// One row of a multi-axis trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GantrySample {
    pub t: f64,
    pub axis: AxisId,
    pub position: f64,
    pub velocity: f64,
}

/// The three axes of the rig and their live state.
#[derive(Debug, Clone, PartialEq)]
pub struct Gantry {
    pub axes: [AxisSpec; 3],
    pub states: [AxisState; 3],
}

impl Gantry {
    pub fn new(axes: [AxisSpec; 3]) -> Self {
        Self {
            axes,
            states: [AxisState::default(); 3],
        }
    }

    pub fn home_all(&mut self) {
        for i in 0..3 {
            self.states[i] = home(&self.axes[i]);
        }
    }

    pub fn axis(&self, id: AxisId) -> &AxisSpec {
        &self.axes[id.index()]
    }

    pub fn state(&self, id: AxisId) -> &AxisState {
        &self.states[id.index()]
    }

    pub fn pose(&self) -> Result<[f64; 3]> {
        rig_pose(&self.axes, &self.states)
    }

    /// Time each axis needs to reach `target` from its current state.
    pub fn move_durations(&self, target: [f64; 3]) -> Result<[f64; 3]> {
        let mut out = [0.0; 3];
        for id in AxisId::ALL {
            let i = id.index();
            let spec = &self.axes[i];
            let steps = displacement_to_steps(target[i], spec)?;
            let d = (steps - self.states[i].step_count).unsigned_abs() as f64 * spec.microstep_distance();
            out[i] = plan_trapezoid(d, spec.v_max, spec.a_max)?.t_total;
        }
        Ok(out)
    }

    /// Moves all three axes concurrently, each on its own profile, and
    /// commits the final state. Every target is validated before any axis
    /// moves. Rows are ordered by time, then axis.
    pub fn move_to(&mut self, target: [f64; 3], dt: f64) -> Result<Vec<GantrySample>> {
        ensure_positive("dt", dt)?;
        let mut trajectories = Vec::with_capacity(3);
        for id in AxisId::ALL {
            let i = id.index();
            if !self.states[i].homed {
                return Err(Error::Unhomed(id.label()));
            }
            trajectories.push(simulate_move(&self.axes[i], &self.states[i], target[i], dt)?);
        }
        let t_end = trajectories.iter().map(|t| t.profile.t_total).fold(0.0, f64::max);
        let mut rows = Vec::new();
        let mut k = 0u64;
        loop {
            let t = (k as f64 * dt).min(t_end);
            for (id, traj) in AxisId::ALL.into_iter().zip(&trajectories) {
                let s = sample_at(traj, t, dt);
                rows.push(GantrySample {
                    t,
                    axis: id,
                    position: s.position,
                    velocity: s.velocity,
                });
            }
            if t >= t_end {
                break;
            }
            k += 1;
        }
        for (i, traj) in trajectories.into_iter().enumerate() {
            self.states[i] = traj.final_state;
        }
        Ok(rows)
    }

    /// Commits a position directly, as when the axes track a moving target
    /// within their limits. The position is quantised to microsteps.
    pub fn set_position(&mut self, id: AxisId, position: f64, velocity: f64) -> Result<()> {
        let i = id.index();
        if !self.states[i].homed {
            return Err(Error::Unhomed(id.label()));
        }
        let steps = displacement_to_steps(position, &self.axes[i])?;
        self.states[i].step_count = steps;
        self.states[i].velocity = velocity;
        Ok(())
    }
}

/// Sample of a single-axis trajectory at time `t` (holding after the end).
fn sample_at(traj: &Trajectory, t: f64, dt: f64) -> TrajectorySample {
    if t >= traj.profile.t_total {
        let mut s = *traj.samples.last().expect("trajectory has at least one sample");
        s.t = t;
        return s;
    }
    let idx = ((t / dt).round() as usize).min(traj.samples.len() - 1);
    let mut s = traj.samples[idx];
    s.t = t;
    s
}
