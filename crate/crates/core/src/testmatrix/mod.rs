//! Gripper test matrix: grasping force, operating bandwidth and positioning
//! efficiency, plus the conveyor pick-and-place run that exercises all three.

pub mod bandwidth;
pub mod metrics;
pub mod pick_place;

pub use bandwidth::{measure_bandwidth, tracking_error_ratio, BandwidthResult, BandwidthSpec};
pub use metrics::{positioning_efficiency, required_grasp_force, Scenario, TestMatrixReport, Waypoint};
pub use pick_place::{
    run_pick_place, Controller, Event, GraspInstant, Outcome, PickPlaceRun, RunOptions, SensorSuite, Verbosity,
};
