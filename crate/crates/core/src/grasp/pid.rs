//! Discrete PID with backward-difference derivative and clamping anti-windup.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGains", into = "RawGains")]
pub struct PidGains {
    kp: f64,
    ki: f64,
    kd: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGains {
    kp: f64,
    #[serde(default)]
    ki: f64,
    #[serde(default)]
    kd: f64,
}

impl TryFrom<RawGains> for PidGains {
    type Error = Error;
    fn try_from(r: RawGains) -> Result<Self> {
        PidGains::new(r.kp, r.ki, r.kd)
    }
}

impl From<PidGains> for RawGains {
    fn from(g: PidGains) -> Self {
        RawGains {
            kp: g.kp,
            ki: g.ki,
            kd: g.kd,
        }
    }
}

impl Default for PidGains {
    fn default() -> Self {
        PidGains {
            kp: 0.5,
            ki: 20.0,
            kd: 0.0,
        }
    }
}

impl PidGains {
    pub fn new(kp: f64, ki: f64, kd: f64) -> Result<Self> {
        ensure_non_negative("kp", kp)?;
        ensure_non_negative("ki", ki)?;
        ensure_non_negative("kd", kd)?;
        Ok(PidGains { kp, ki, kd })
    }

    pub fn kp(&self) -> f64 {
        self.kp
    }

    pub fn ki(&self) -> f64 {
        self.ki
    }

    pub fn kd(&self) -> f64 {
        self.kd
    }
}

/// Controller memory plus the output saturation limits.
#[derive(Debug, Clone, PartialEq)]
pub struct PidState {
    pub integral: f64,
    pub prev_error: Option<f64>,
    output_limits: (f64, f64),
}

impl PidState {
    pub fn new(output_limits: (f64, f64)) -> Result<Self> {
        let (lo, hi) = output_limits;
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::invalid("PID output limits", format!("[{lo}, {hi}]")));
        }
        Ok(PidState {
            integral: 0.0,
            prev_error: None,
            output_limits,
        })
    }

    pub fn unbounded() -> Self {
        PidState {
            integral: 0.0,
            prev_error: None,
            output_limits: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn output_limits(&self) -> (f64, f64) {
        self.output_limits
    }

    pub fn reset(&mut self) {
        self.integral = 0.0;
        self.prev_error = None;
    }
}

/// One controller update: `u = kp·e + ki·∫e + kd·ė`, saturated to the output limits.
///
/// The integral is clamped so that `ki·∫e` alone stays inside the output
/// limits. The derivative is zero on the first call.
pub fn pid_step(gains: &PidGains, state: &mut PidState, error: f64, dt: f64) -> f64 {
    debug_assert!(dt > 0.0);
    let (lo, hi) = state.output_limits;
    state.integral += error * dt;
    if gains.ki > 0.0 {
        state.integral = state.integral.clamp(lo / gains.ki, hi / gains.ki);
    }
    let derivative = state.prev_error.map_or(0.0, |p| (error - p) / dt);
    state.prev_error = Some(error);
    let u = gains.kp * error + gains.ki * state.integral + gains.kd * derivative;
    u.clamp(lo, hi)
}
