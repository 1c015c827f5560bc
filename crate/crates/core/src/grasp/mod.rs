//! Fuzzy force setpoint and PID force tracking against a contact plant.
//!
//! The fuzzy system maps target position, remaining depth and conveyor speed
//! to a desired grasp force; a PID drives the actuator voltage so that the
//! contact force follows it.

pub mod fuzzy;
pub mod pid;
pub mod plant;
pub mod sim;

pub use fuzzy::{
    defuzzify_centroid, fuzzify, fuzzy_desired_force, infer, AggregatedSet, FuzzySystem, FuzzyVariable, GraspInputs,
    MembershipFunction, MembershipShape, Rule, Term,
};
pub use pid::{pid_step, PidGains, PidState};
pub use plant::{ContactPlant, PlantState};
pub use sim::{
    grasp_simulate, Feedback, GainScheduler, GraspLoop, GraspSample, SetpointSource, SimOptions, TRACE_HEADER,
};
