//! Operating bandwidth: highest frequency the force loop tracks within a
//! relative error threshold.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::fem::frequency_grid;
use crate::grasp::{ContactPlant, Feedback, FuzzySystem, GraspLoop, PidGains, SetpointSource, SimOptions};

/// Periods skipped before measuring.
pub const DISCARD_PERIODS: f64 = 5.0;
/// Periods averaged for the RMS error.
pub const MEASURE_PERIODS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BandwidthSpec {
    /// N, amplitude of the zero-mean sinusoidal force setpoint.
    pub amplitude: f64,
    /// Allowed RMS error as a fraction of the setpoint RMS.
    pub error_threshold: f64,
    /// Hz
    pub f_start: f64,
    /// Hz
    pub f_stop: f64,
    /// Hz
    pub f_step: f64,
}

impl Default for BandwidthSpec {
    fn default() -> Self {
        BandwidthSpec {
            amplitude: 5.0,
            error_threshold: 0.5,
            f_start: 0.5,
            f_stop: 50.0,
            f_step: 0.5,
        }
    }
}

impl BandwidthSpec {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("bandwidth amplitude", self.amplitude)?;
        ensure_positive("bandwidth error threshold", self.error_threshold)?;
        self.grid().map(|_| ())
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        frequency_grid(self.f_start, self.f_stop, self.f_step)
    }
}

/// Sweep outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthResult {
    /// Hz
    pub bandwidth: f64,
    /// `(frequency, RMS error / RMS setpoint)` for every frequency tried;
    /// the sweep stops at the first failure.
    pub ratios: Vec<(f64, f64)>,
}

/// Steady-state RMS tracking error relative to the setpoint RMS at one frequency.
///
/// The loop runs with direct force feedback and no measurement noise.
pub fn tracking_error_ratio(
    plant: &ContactPlant,
    fuzzy: &FuzzySystem,
    gains: &PidGains,
    amplitude: f64,
    frequency_hz: f64,
    options: &SimOptions,
) -> Result<f64> {
    ensure_positive("bandwidth amplitude", amplitude)?;
    ensure_positive("frequency", frequency_hz)?;
    let opts = SimOptions {
        feedback: Feedback::Direct,
        noise_std: 0.0,
        ..*options
    };
    let setpoint = SetpointSource::Sine {
        offset: 0.0,
        amplitude,
        frequency_hz,
    };
    let mut lp = GraspLoop::new(plant, fuzzy, gains, &setpoint, &opts)?;
    let per_period = 1.0 / (frequency_hz * opts.dt);
    let discard = (DISCARD_PERIODS * per_period).round() as u64;
    let measure = ((MEASURE_PERIODS * per_period).round() as u64).max(1);
    for _ in 0..discard {
        lp.step()?;
    }
    let mut sum_sq = 0.0;
    for _ in 0..measure {
        let s = lp.step()?;
        sum_sq += s.error * s.error;
    }
    let rms = (sum_sq / measure as f64).sqrt();
    Ok(rms / (amplitude / std::f64::consts::SQRT_2))
}

/// Largest grid frequency up to which every frequency tracks within the threshold.
pub fn measure_bandwidth(
    plant: &ContactPlant,
    fuzzy: &FuzzySystem,
    gains: &PidGains,
    spec: &BandwidthSpec,
    options: &SimOptions,
) -> Result<BandwidthResult> {
    spec.validate()?;
    let grid = spec.grid()?;
    let mut ratios = Vec::new();
    let mut bandwidth = None;
    for &f in &grid {
        let ratio = match tracking_error_ratio(plant, fuzzy, gains, spec.amplitude, f, options) {
            Ok(r) => r,
            Err(Error::Unstable { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        ratios.push((f, ratio));
        if ratio <= spec.error_threshold {
            bandwidth = Some(f);
        } else {
            break;
        }
    }
    match bandwidth {
        Some(bandwidth) => Ok(BandwidthResult { bandwidth, ratios }),
        None => Err(Error::NoBandwidth),
    }
}
