//! Steady-state response to sinusoidal loading, `(K − ω²M + iωC)·x = F` with
//! Rayleigh damping `C = αM + βK`.

use std::f64::consts::PI;
use std::thread;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::modal::eigenvalues;
use super::recovery::stress_strain_amplitude;
use super::system::{DofSystem, SpatialLoad};
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RayleighDamping {
    /// Explicit mass (1/s) and stiffness (s) coefficients.
    Coefficients { alpha: f64, beta: f64 },
    /// Damping ratio `ratio` at two anchor frequencies (Hz). Without anchors
    /// the first two natural frequencies of the system are used.
    ModalRatio {
        ratio: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        anchors_hz: Option<[f64; 2]>,
    },
}

impl Default for RayleighDamping {
    fn default() -> Self {
        RayleighDamping::ModalRatio {
            ratio: 0.02,
            anchors_hz: None,
        }
    }
}

impl RayleighDamping {
    pub const UNDAMPED: RayleighDamping = RayleighDamping::Coefficients { alpha: 0.0, beta: 0.0 };

    pub fn validate(&self) -> Result<()> {
        match *self {
            RayleighDamping::Coefficients { alpha, beta } => {
                ensure_non_negative("rayleigh alpha", alpha)?;
                ensure_non_negative("rayleigh beta", beta)
            }
            RayleighDamping::ModalRatio { ratio, anchors_hz } => {
                if !(ratio > 0.0 && ratio < 1.0) {
                    return Err(Error::invalid(
                        "damping ratio",
                        format!("must lie in (0, 1), got {ratio}"),
                    ));
                }
                if let Some([f1, f2]) = anchors_hz {
                    ensure_positive("damping anchor", f1)?;
                    ensure_positive("damping anchor", f2)?;
                    if f1 == f2 {
                        return Err(Error::invalid("damping anchors", "must be distinct"));
                    }
                }
                Ok(())
            }
        }
    }

    /// Resolves to `(α, β)`.
    pub fn coefficients(&self, sys: &DofSystem) -> Result<(f64, f64)> {
        self.validate()?;
        match *self {
            RayleighDamping::Coefficients { alpha, beta } => Ok((alpha, beta)),
            RayleighDamping::ModalRatio { ratio, anchors_hz } => {
                let (w1, w2) = match anchors_hz {
                    Some([f1, f2]) => (2.0 * PI * f1, 2.0 * PI * f2),
                    None => {
                        let vals = eigenvalues(sys)?;
                        if vals.len() < 2 {
                            return Err(Error::invalid("damping", "need two modes to anchor Rayleigh damping"));
                        }
                        (vals[0].sqrt(), vals[1].sqrt())
                    }
                };
                // ζ(ω) = α/(2ω) + βω/2, equal to `ratio` at ω1 and ω2
                Ok((2.0 * ratio * w1 * w2 / (w1 + w2), 2.0 * ratio / (w1 + w2)))
            }
        }
    }
}

/// Damping ratio a Rayleigh pair gives at angular frequency `omega`.
pub fn rayleigh_ratio(alpha: f64, beta: f64, omega: f64) -> f64 {
    alpha / (2.0 * omega) + beta * omega / 2.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicResult {
    pub frequencies: Vec<f64>,
    /// Largest transverse deflection amplitude, m.
    pub peak_displacement: Vec<f64>,
    /// Largest surface bending stress amplitude, Pa.
    pub peak_stress: Vec<f64>,
    pub peak_strain: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
}

impl HarmonicResult {
    /// Frequencies at which the displacement curve has a strict local maximum.
    pub fn resonance_peaks(&self) -> Vec<f64> {
        let d = &self.peak_displacement;
        (1..d.len().saturating_sub(1))
            .filter(|&i| d[i] > d[i - 1] && d[i] > d[i + 1])
            .map(|i| self.frequencies[i])
            .collect()
    }
}

/// Evenly spaced grid `start, start + step, …` up to and including `stop`.
pub fn frequency_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    ensure_positive("grid start", start)?;
    ensure_positive("grid step", step)?;
    if stop < start {
        return Err(Error::invalid("frequency grid", "stop must not precede start"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + step * i as f64).collect())
}

fn validate_grid(f_grid: &[f64]) -> Result<()> {
    if f_grid.is_empty() {
        return Err(Error::Empty("frequency grid"));
    }
    if f_grid.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
        return Err(Error::invalid("frequency grid", "frequencies must be positive"));
    }
    if f_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "frequency grid",
            "frequencies must be strictly ascending",
        ));
    }
    Ok(())
}

/// Sweeps `f_grid` (Hz). Samples are evaluated in parallel and returned in
/// grid order.
pub fn harmonic_response(
    sys: &DofSystem,
    damping: &RayleighDamping,
    force: &SpatialLoad,
    f_grid: &[f64],
) -> Result<HarmonicResult> {
    validate_grid(f_grid)?;
    let (alpha, beta) = damping.coefficients(sys)?;

    if alpha == 0.0 && beta == 0.0 {
        let vals = eigenvalues(sys)?;
        for &f in f_grid {
            let w2 = (2.0 * PI * f).powi(2);
            if vals.iter().any(|&l| (w2 - l).abs() <= 1e-9 * l) {
                return Err(Error::UnboundedResponse { frequency_hz: f });
            }
        }
    }

    let k = sys.reduced_stiffness();
    let m = sys.reduced_mass();
    let f_red = sys.reduce_vector(&sys.load_vector(force)?);
    let rhs = f_red.map(|v| Complex64::new(v, 0.0));

    let solve_one = |f: f64| -> Result<(f64, f64, f64)> {
        let w = 2.0 * PI * f;
        let n = k.nrows();
        let a = DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(
                k[(i, j)] - w * w * m[(i, j)],
                w * (alpha * m[(i, j)] + beta * k[(i, j)]),
            )
        });
        let x = a
            .lu()
            .solve(&rhs)
            .filter(|x| x.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
            .ok_or(Error::UnboundedResponse { frequency_hz: f })?;
        let full: DVector<Complex64> = sys.expand(&x);
        let disp = full.iter().step_by(2).map(|v| v.norm()).fold(0.0, f64::max);
        let peak = stress_strain_amplitude(&full, sys.beam(), sys.mesh());
        Ok((disp, peak.stress, peak.strain))
    };

    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(f_grid.len());
    let chunk = f_grid.len().div_ceil(workers);
    let samples: Vec<Result<(f64, f64, f64)>> = thread::scope(|s| {
        let handles: Vec<_> = f_grid
            .chunks(chunk)
            .map(|part| s.spawn(|| part.iter().map(|&f| solve_one(f)).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("harmonic worker panicked"))
            .collect()
    });

    let mut out = HarmonicResult {
        frequencies: f_grid.to_vec(),
        peak_displacement: Vec::with_capacity(f_grid.len()),
        peak_stress: Vec::with_capacity(f_grid.len()),
        peak_strain: Vec::with_capacity(f_grid.len()),
        alpha,
        beta,
    };
    for s in samples {
        let (d, sigma, eps) = s?;
        out.peak_displacement.push(d);
        out.peak_stress.push(sigma);
        out.peak_strain.push(eps);
    }
    Ok(out)
}
