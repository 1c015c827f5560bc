//! Conveyor pick-and-place run: detect, intercept, descend, grasp, lift, place.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::bandwidth::{measure_bandwidth, BandwidthSpec};
use super::metrics::{distance, positioning_efficiency, required_grasp_force, Scenario, TestMatrixReport};
use crate::error::{ensure_positive, Error, Result};
use crate::grasp::{
    fuzzy_desired_force, ContactPlant, Feedback, FuzzySystem, GraspInputs, GraspLoop, GraspSample, PidGains,
    SetpointSource, SimOptions,
};
use crate::motion::{AxisId, AxisSpec, Gantry};
use crate::sensors::{
    disturbance_detect, encoder_pulses, encoder_speed, EncoderSpec, FsrSpec, SensorSample, UltrasonicSensor,
    UltrasonicSpec,
};

/// s, resolution of the intercept search.
pub const PLAN_STEP: f64 = 1e-3;
/// s, encoder counting window.
const ENCODER_WINDOW: f64 = 0.1;
/// Grasp-loop steps between recorded FSR samples.
const FSR_DECIMATION: usize = 10;

/// The force controller: plant, fuzzy setpoint system and PID.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Controller {
    pub plant: ContactPlant,
    pub fuzzy: FuzzySystem,
    pub gains: PidGains,
    /// Step, actuator limits and measurement noise; feedback and seed are
    /// set by the run.
    pub sim: SimOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensorSuite {
    pub ultrasonic: UltrasonicSpec,
    pub fsr: FsrSpec,
    pub encoder: EncoderSpec,
}

impl Default for SensorSuite {
    fn default() -> Self {
        SensorSuite {
            ultrasonic: UltrasonicSpec::default(),
            fsr: FsrSpec {
                full_load_force: 50.0,
                ..FsrSpec::default()
            },
            encoder: EncoderSpec::default(),
        }
    }
}

impl SensorSuite {
    pub fn validate(&self) -> Result<()> {
        self.ultrasonic.validate()?;
        self.fsr.validate()?;
        self.encoder.validate()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verbosity {
    #[default]
    Summary,
    Detailed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    pub verbosity: Verbosity,
    pub bandwidth: BandwidthSpec,
    /// s, sampling step of the gantry moves.
    pub motion_dt: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: 0,
            verbosity: Verbosity::Summary,
            bandwidth: BandwidthSpec::default(),
            motion_dt: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Success,
    MissedPick(String),
    GraspTimeout { required: f64, timeout: f64, peak: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub t: f64,
    pub name: &'static str,
    pub detail: String,
}

/// State at the moment the grip first reaches the required force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraspInstant {
    pub t: f64,
    pub gripper: [f64; 3],
    pub target: [f64; 3],
    pub contact: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PickPlaceRun {
    pub outcome: Outcome,
    pub report: TestMatrixReport,
    pub events: Vec<Event>,
    pub sensor_trace: Vec<SensorSample>,
    /// Grasp-loop trace, times relative to the start of the grasp.
    pub grasp_trace: Vec<GraspSample>,
    pub grasp: Option<GraspInstant>,
    /// Contact force when the lift begins.
    pub lift_contact: Option<f64>,
}

impl PickPlaceRun {
    pub fn event_log(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            let _ = write!(out, "t={:.6} event={}", e.t, e.name);
            if !e.detail.is_empty() {
                let _ = write!(out, " {}", e.detail);
            }
            out.push('\n');
        }
        out
    }

    /// The outcome as a scenario error, if it was not a success.
    pub fn failure(&self) -> Option<Error> {
        match &self.outcome {
            Outcome::Success => None,
            Outcome::MissedPick(why) => Some(Error::MissedPick(why.clone())),
            Outcome::GraspTimeout {
                required,
                timeout,
                peak,
            } => Some(Error::GraspTimeout {
                required: *required,
                timeout: *timeout,
                peak: *peak,
            }),
        }
    }
}

struct Log {
    verbosity: Verbosity,
    events: Vec<Event>,
}

impl Log {
    fn push(&mut self, t: f64, name: &'static str, detail: String) {
        self.events.push(Event { t, name, detail });
    }

    fn detail(&mut self, t: f64, name: &'static str, detail: impl FnOnce() -> String) {
        if self.verbosity == Verbosity::Detailed {
            self.push(t, name, detail());
        }
    }
}

fn fmt3(p: [f64; 3]) -> String {
    format!("({:.6},{:.6},{:.6})", p[0], p[1], p[2])
}

/// Run the scenario end to end.
///
/// A missed pick or a grasp that never reaches the required force is an
/// [`Outcome`], not an error; errors are reserved for bad input and
/// numerical failure.
pub fn run_pick_place(
    scenario: &Scenario,
    axes: &[AxisSpec; 3],
    controller: &Controller,
    sensors: &SensorSuite,
    options: &RunOptions,
) -> Result<PickPlaceRun> {
    scenario.validate()?;
    sensors.validate()?;
    ensure_positive("motion dt", options.motion_dt)?;
    let required = required_grasp_force(scenario)?;
    let bandwidth = match measure_bandwidth(
        &controller.plant,
        &controller.fuzzy,
        &controller.gains,
        &options.bandwidth,
        &controller.sim,
    ) {
        Ok(r) => r.bandwidth,
        Err(Error::NoBandwidth) => 0.0,
        Err(e) => return Err(e),
    };

    let mut run = PickPlaceRun {
        outcome: Outcome::Success,
        report: TestMatrixReport {
            grasping_force: required,
            operating_bandwidth: bandwidth,
            positioning_efficiency: 0.0,
            grasp_pass: false,
            bandwidth_pass: bandwidth > 0.0 && bandwidth >= scenario.min_bandwidth,
            efficiency_pass: false,
        },
        events: Vec::new(),
        sensor_trace: Vec::new(),
        grasp_trace: Vec::new(),
        grasp: None,
        lift_contact: None,
    };
    let mut log = Log {
        verbosity: options.verbosity,
        events: Vec::new(),
    };
    let outcome = sequence(
        scenario, axes, controller, sensors, options, required, &mut run, &mut log,
    )?;
    run.outcome = outcome;
    run.events = log.events;
    Ok(run)
}

#[allow(clippy::too_many_arguments)]
fn sequence(
    scenario: &Scenario,
    axes: &[AxisSpec; 3],
    controller: &Controller,
    sensors: &SensorSuite,
    options: &RunOptions,
    required: f64,
    run: &mut PickPlaceRun,
    log: &mut Log,
) -> Result<Outcome> {
    let mut gantry = Gantry::new(*axes);
    gantry.home_all();
    let home = gantry.pose()?;
    log.push(0.0, "homed", format!("pose={}", fmt3(home)));
    log.push(0.0, "required_force", format!("force_n={required:.6}"));

    let missed = |log: &mut Log, t: f64, why: String| {
        log.push(t, "missed_pick", format!("reason=\"{why}\""));
        Ok(Outcome::MissedPick(why))
    };

    let belt = scenario.conveyor_velocity();
    for id in AxisId::ALL {
        let i = id.index();
        if belt[i].abs() > axes[i].v_max() {
            return missed(
                log,
                0.0,
                format!(
                    "conveyor speed {:.6} m/s along {} exceeds axis limit {:.6} m/s",
                    belt[i].abs(),
                    id.label(),
                    axes[i].v_max()
                ),
            );
        }
    }

    // detection
    let mut ranger = UltrasonicSensor::new(sensors.ultrasonic, options.seed)?;
    let baseline = sensors.ultrasonic.max_range;
    let mut k = 0u64;
    let t_detect = loop {
        let t = k as f64 * scenario.ping_period;
        if t > scenario.horizon {
            return missed(log, scenario.horizon, "target never detected".into());
        }
        let range = distance(scenario.sensor_position, scenario.target_at(t)).max(f64::MIN_POSITIVE);
        let reading = ranger.read(range)?;
        run.sensor_trace.push(SensorSample {
            t,
            sensor: "ultrasonic",
            value: reading.unwrap_or(baseline),
            unit: "m",
        });
        log.detail(t, "ping", || match reading {
            Some(r) => format!("range_m={r:.6}"),
            None => "range_m=none".into(),
        });
        if let Some(r) = reading {
            if disturbance_detect(baseline, r, scenario.detection_threshold)? {
                log.push(t, "detected", format!("range_m={r:.6}"));
                break t;
            }
        }
        k += 1;
    };

    // intercept: earliest time the XY move can meet the target
    let z0 = home[2];
    let mut k = 0u64;
    let (t_int, aim, xy_time) = loop {
        let t = t_detect + k as f64 * PLAN_STEP;
        if t > scenario.horizon {
            return missed(
                log,
                scenario.horizon,
                "target left the workspace before intercept".into(),
            );
        }
        k += 1;
        let tgt = scenario.target_at(t);
        if !(0..3).all(|i| axes[i].contains(tgt[i])) {
            continue;
        }
        let d = gantry.move_durations([tgt[0], tgt[1], z0])?;
        let xy = d[0].max(d[1]);
        if xy <= t - t_detect + 1e-12 {
            break (t, tgt, xy);
        }
    };
    log.push(
        t_detect,
        "intercept_planned",
        format!("t_intercept={t_int:.6} aim={}", fmt3(aim)),
    );
    gantry.move_to([aim[0], aim[1], z0], options.motion_dt)?;
    log.push(
        t_detect + xy_time,
        "xy_arrived",
        format!("pose={}", fmt3(gantry.pose()?)),
    );

    let inputs = GraspInputs {
        target_position: dot(aim, scenario.direction()),
        relative_depth: aim[2] - z0,
        speed: scenario.conveyor_speed,
    };
    let fuzzy_force = fuzzy_desired_force(&inputs, &controller.fuzzy)?;

    // descend while tracking the target in x and y
    let z_time = gantry.move_durations([aim[0], aim[1], aim[2]])?[2];
    log.push(t_int, "descend_start", format!("depth_m={:.6}", inputs.relative_depth));
    let mut t = t_int + z_time;
    if track(&mut gantry, scenario, t).is_err() {
        return missed(log, t, "target left the workspace during descent".into());
    }
    log.push(t, "descend_done", format!("pose={}", fmt3(gantry.pose()?)));

    // grasp
    let desired = fuzzy_force.max(required * (1.0 + scenario.grasp_margin));
    log.push(
        t,
        "grasp_start",
        format!("fuzzy_force_n={fuzzy_force:.6} setpoint_n={desired:.6}"),
    );
    let sim = SimOptions {
        feedback: Feedback::Fsr { spec: sensors.fsr },
        seed: options.seed.wrapping_add(1),
        ..controller.sim
    };
    let setpoint = SetpointSource::Constant { force: desired };
    let mut lp = GraspLoop::new(&controller.plant, &controller.fuzzy, &controller.gains, &setpoint, &sim)?;
    let max_steps = (scenario.grasp_timeout / sim.dt).ceil() as usize;
    let mut peak = f64::NEG_INFINITY;
    let mut secured = None;
    for n in 0..=max_steps {
        let s = lp.step()?;
        run.grasp_trace.push(s);
        peak = peak.max(s.contact);
        if n % FSR_DECIMATION == 0 {
            run.sensor_trace.push(SensorSample {
                t: t + s.t,
                sensor: "fsr",
                value: sensors.fsr.measure(s.contact),
                unit: "N",
            });
        }
        if s.contact >= required {
            secured = Some(s);
            break;
        }
    }
    let Some(s) = secured else {
        log.push(t + scenario.grasp_timeout, "grasp_timeout", format!("peak_n={peak:.6}"));
        return Ok(Outcome::GraspTimeout {
            required,
            timeout: scenario.grasp_timeout,
            peak,
        });
    };
    t += s.t;
    if track(&mut gantry, scenario, t).is_err() {
        return missed(log, t, "target left the workspace during the grasp".into());
    }
    let gripper = gantry.pose()?;
    let target = scenario.target_at(t);
    let efficiency = positioning_efficiency(gripper, target, scenario.normalization_radius)?;
    run.grasp = Some(GraspInstant {
        t,
        gripper,
        target,
        contact: s.contact,
    });
    run.report.positioning_efficiency = efficiency;
    run.report.efficiency_pass = efficiency >= scenario.min_efficiency;
    log.push(
        t,
        "grasp_secured",
        format!(
            "contact_n={:.6} gripper={} target={} efficiency={efficiency:.6}",
            s.contact,
            fmt3(gripper),
            fmt3(target)
        ),
    );

    let motor_speed = belt[1].abs() / axes[1].screw().lead();
    let pulses = encoder_pulses(motor_speed, ENCODER_WINDOW, 0.0, &sensors.encoder)?;
    run.sensor_trace.push(SensorSample {
        t,
        sensor: "encoder",
        value: encoder_speed(pulses, ENCODER_WINDOW, &sensors.encoder)?,
        unit: "rev/s",
    });

    // lift, carry, release
    run.lift_contact = Some(s.contact);
    run.report.grasp_pass = s.contact >= required;
    log.push(t, "lift", format!("contact_n={:.6}", s.contact));
    let z_lift = (gripper[2] - scenario.lift_height).max(axes[2].travel().0);
    let lift_time = gantry.move_durations([gripper[0], gripper[1], z_lift])?[2];
    gantry.move_to([gripper[0], gripper[1], z_lift], options.motion_dt)?;
    t += lift_time;
    log.detail(t, "lifted", || format!("z={z_lift:.6}"));
    let carry = gantry.move_durations(scenario.place_position)?;
    let carry_rows = gantry.move_to(scenario.place_position, options.motion_dt)?;
    t += carry.iter().copied().fold(0.0, f64::max);
    log.detail(t, "carry_samples", || format!("rows={}", carry_rows.len()));
    log.push(t, "release", format!("pose={}", fmt3(gantry.pose()?)));
    Ok(Outcome::Success)
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

// Idealised tracking: the axes sit on the target (to the microstep) at time t.
fn track(gantry: &mut Gantry, scenario: &Scenario, t: f64) -> Result<()> {
    let tgt = scenario.target_at(t);
    let v = scenario.conveyor_velocity();
    for id in AxisId::ALL {
        let i = id.index();
        gantry.set_position(id, tgt[i], v[i])?;
    }
    Ok(())
}
