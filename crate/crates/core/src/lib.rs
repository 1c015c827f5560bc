//! Simulation and analysis toolkit for a 3-axis Cartesian end-effector test rig.
//!
//! - [`statics`]: closed-form fixed-fixed rod analysis
//! - [`fem`]: beam finite elements, modal and harmonic analysis
//! - [`motion`]: lead-screw stepper axes, motion profiles, gantry pose
//! - [`sensors`]: ultrasonic, force-sensitive resistor and slotted-disc encoder models
//! - [`grasp`]: Mamdani fuzzy force setpoint with PID force tracking
//! - [`testmatrix`]: gripper metrics and the conveyor pick-and-place run
//! - [`config`]: the rig configuration document

// `!(a < b)` comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod fem;
pub mod grasp;
pub mod motion;
pub mod sensors;
pub mod statics;
pub mod testmatrix;

pub use error::{Error, ErrorClass, Result};
