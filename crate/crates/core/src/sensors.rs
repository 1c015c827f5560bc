//! Models of the rig's three sensors: ultrasonic time-of-flight ranging, a
//! force-sensitive resistor in a voltage divider, and a slotted-disc speed
//! encoder. All models are deterministic unless a seeded noise source is
//! attached.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Ultrasonic carrier band, Hz.
pub const ULTRASONIC_BAND: (f64, f64) = (20e3, 200e3);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UltrasonicSpec {
    pub carrier_frequency: f64,
    pub speed_of_sound: f64,
    pub max_range: f64,
    #[serde(default)]
    pub noise_std: f64,
}

impl Default for UltrasonicSpec {
    fn default() -> Self {
        Self {
            carrier_frequency: 40e3,
            speed_of_sound: 343.0,
            max_range: 4.0,
            noise_std: 0.0,
        }
    }
}

impl UltrasonicSpec {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = ULTRASONIC_BAND;
        if !(lo..=hi).contains(&self.carrier_frequency) {
            return Err(Error::invalid(
                "ultrasonic carrier",
                format!("{} Hz outside [{lo}, {hi}] Hz", self.carrier_frequency),
            ));
        }
        ensure_positive("speed_of_sound", self.speed_of_sound)?;
        ensure_positive("max_range", self.max_range)?;
        ensure_non_negative("noise_std", self.noise_std)
    }
}

/// Result of one ultrasonic ping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Echo {
    /// Round-trip time, s.
    Received(f64),
    /// Nothing within range.
    NoEcho,
}

/// Round-trip time `2·d/c` for a reflector at `distance`.
pub fn echo_time(distance: f64, spec: &UltrasonicSpec) -> Result<Echo> {
    ensure_positive("echo distance", distance)?;
    if distance > spec.max_range {
        return Ok(Echo::NoEcho);
    }
    Ok(Echo::Received(2.0 * distance / spec.speed_of_sound))
}

/// Reflector distance `c·t/2` from a round-trip time.
pub fn distance_from_echo(t: f64, spec: &UltrasonicSpec) -> f64 {
    spec.speed_of_sound * t / 2.0
}

/// True when a range reading departs from the undisturbed baseline by more
/// than `threshold`.
pub fn disturbance_detect(baseline: f64, reading: f64, threshold: f64) -> Result<bool> {
    ensure_positive("disturbance threshold", threshold)?;
    Ok((reading - baseline).abs() > threshold)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FsrSpec {
    /// Ω, resistance with nothing pressing on the pad.
    pub r_no_load: f64,
    /// Ω, resistance at `full_load_force`.
    pub r_full_load: f64,
    /// N
    pub full_load_force: f64,
    pub exponent: f64,
    /// m
    pub active_diameter: f64,
}

impl Default for FsrSpec {
    fn default() -> Self {
        Self {
            r_no_load: 1.0e7,
            r_full_load: 2.5e3,
            full_load_force: 10.0,
            exponent: 1.0,
            active_diameter: 0.004,
        }
    }
}

impl FsrSpec {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("r_full_load", self.r_full_load)?;
        if !(self.r_no_load > self.r_full_load) || !self.r_no_load.is_finite() {
            return Err(Error::invalid("fsr", "r_no_load must exceed r_full_load"));
        }
        ensure_positive("full_load_force", self.full_load_force)?;
        ensure_positive("fsr exponent", self.exponent)?;
        ensure_positive("active_diameter", self.active_diameter)
    }

    /// Smallest force on the unclamped part of the curve.
    pub fn min_force(&self) -> f64 {
        self.full_load_force * (self.r_no_load / self.r_full_load).powf(-1.0 / self.exponent)
    }

    /// Force as read back through the sensor: zero when the pad reads open
    /// (no load), saturating at full load.
    pub fn measure(&self, force: f64) -> f64 {
        let force = force.max(0.0);
        match fsr_resistance(force, self) {
            Ok(r) if r < self.r_no_load => fsr_force(r, self).unwrap_or(0.0),
            _ => 0.0,
        }
    }
}

/// Pad resistance under `force`: `r_full·(F/F_full)^(−n)` clamped to
/// `[r_full_load, r_no_load]`.
pub fn fsr_resistance(force: f64, spec: &FsrSpec) -> Result<f64> {
    ensure_non_negative("fsr force", force)?;
    if force == 0.0 {
        return Ok(spec.r_no_load);
    }
    let r = spec.r_full_load * (force / spec.full_load_force).powf(-spec.exponent);
    Ok(r.clamp(spec.r_full_load, spec.r_no_load))
}

/// Inverse of [`fsr_resistance`] on the unclamped range.
pub fn fsr_force(resistance: f64, spec: &FsrSpec) -> Result<f64> {
    if !(spec.r_full_load..=spec.r_no_load).contains(&resistance) {
        return Err(Error::ResistanceOutOfRange {
            resistance,
            min: spec.r_full_load,
            max: spec.r_no_load,
        });
    }
    Ok(spec.full_load_force * (resistance / spec.r_full_load).powf(-1.0 / spec.exponent))
}

/// Divider output with the FSR on the high side: `V·R_d/(R + R_d)`.
/// An infinite `resistance` (open pad) gives 0 V.
pub fn fsr_voltage(resistance: f64, divider_r: f64, v_supply: f64) -> Result<f64> {
    if !(resistance > 0.0) {
        return Err(Error::invalid("fsr resistance", "must be positive"));
    }
    ensure_positive("divider resistance", divider_r)?;
    ensure_positive("supply voltage", v_supply)?;
    if resistance.is_infinite() {
        return Ok(0.0);
    }
    Ok(v_supply * divider_r / (resistance + divider_r))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EncoderSpec {
    pub slots_per_rev: u32,
}

impl Default for EncoderSpec {
    fn default() -> Self {
        Self { slots_per_rev: 20 }
    }
}

impl EncoderSpec {
    pub fn validate(&self) -> Result<()> {
        if self.slots_per_rev == 0 {
            return Err(Error::invalid("slots_per_rev", "must be at least 1"));
        }
        Ok(())
    }

    /// Speed represented by one pulse in a window, rev/s.
    pub fn resolution(&self, window: f64) -> f64 {
        1.0 / (f64::from(self.slots_per_rev) * window)
    }
}

/// Shaft speed in rev/s from a pulse count over `window` seconds.
pub fn encoder_speed(pulses: u64, window: f64, spec: &EncoderSpec) -> Result<f64> {
    ensure_positive("counting window", window)?;
    spec.validate()?;
    Ok(pulses as f64 / (f64::from(spec.slots_per_rev) * window))
}

/// Pulses a slotted disc turning at `speed` rev/s produces in `window`,
/// given the slot phase (fraction of a slot already passed) at window start.
pub fn encoder_pulses(speed: f64, window: f64, phase: f64, spec: &EncoderSpec) -> Result<u64> {
    ensure_non_negative("shaft speed", speed)?;
    ensure_positive("counting window", window)?;
    if !(0.0..1.0).contains(&phase) {
        return Err(Error::invalid("slot phase", "must lie in [0, 1)"));
    }
    Ok((speed * f64::from(spec.slots_per_rev) * window + phase).floor() as u64)
}

/// Seeded additive Gaussian noise. A zero standard deviation returns the
/// input untouched and does not advance the stream.
#[derive(Debug, Clone)]
pub struct NoiseSource {
    rng: ChaCha8Rng,
}

impl NoiseSource {
    pub fn seeded(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn perturb(&mut self, value: f64, std_dev: f64) -> f64 {
        if std_dev <= 0.0 {
            return value;
        }
        let normal = Normal::new(0.0, std_dev).expect("finite positive std dev");
        value + normal.sample(&mut self.rng)
    }
}

/// Ultrasonic ranger with its own noise stream.
#[derive(Debug, Clone)]
pub struct UltrasonicSensor {
    pub spec: UltrasonicSpec,
    noise: NoiseSource,
}

impl UltrasonicSensor {
    pub fn new(spec: UltrasonicSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            spec,
            noise: NoiseSource::seeded(seed),
        })
    }

    /// Range reading for a reflector at `distance`; `None` when no echo returns.
    pub fn read(&mut self, distance: f64) -> Result<Option<f64>> {
        match echo_time(distance, &self.spec)? {
            Echo::Received(t) => {
                let d = distance_from_echo(t, &self.spec);
                Ok(Some(self.noise.perturb(d, self.spec.noise_std)))
            }
            Echo::NoEcho => Ok(None),
        }
    }
}

/// One row of a sensor trace (`t_s,sensor,value,unit`).
#[derive(Debug, Clone, PartialEq)]
pub struct SensorSample {
    pub t: f64,
    pub sensor: &'static str,
    pub value: f64,
    pub unit: &'static str,
}
