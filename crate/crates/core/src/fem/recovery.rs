//! Bending stress and strain from a nodal solution.
//!
//! Curvature is evaluated at both ends of every element from the Hermite
//! second derivatives; surface strain is `κ·c` with `c` the outer radius.

use nalgebra::DVector;
use num_complex::Complex64;

use super::element::curvature_operator;
use super::system::Mesh1D;
use crate::statics::BeamSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakStressStrain {
    /// Pa
    pub stress: f64,
    pub strain: f64,
    /// Position along the beam where the peak occurs, m.
    pub position: f64,
}

/// Curvature at the start and end of every element (real solution).
pub fn element_end_curvatures(u: &DVector<f64>, mesh: &Mesh1D) -> Vec<(f64, f64)> {
    (0..mesh.n_elements())
        .map(|e| {
            let h = mesh.element_length(e);
            let ue = [u[2 * e], u[2 * e + 1], u[2 * e + 2], u[2 * e + 3]];
            (
                dot(&curvature_operator(0.0, h), &ue),
                dot(&curvature_operator(1.0, h), &ue),
            )
        })
        .collect()
}

fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Peak surface stress and strain of a static solution.
pub fn stress_strain_recovery(u: &DVector<f64>, beam: &BeamSpec, mesh: &Mesh1D) -> PeakStressStrain {
    let complex = u.map(|v| Complex64::new(v, 0.0));
    stress_strain_amplitude(&complex, beam, mesh)
}

/// Peak stress and strain amplitudes of a harmonic (complex) solution.
pub fn stress_strain_amplitude(u: &DVector<Complex64>, beam: &BeamSpec, mesh: &Mesh1D) -> PeakStressStrain {
    let c = beam.section().outer_radius();
    let e_mod = beam.material().youngs_modulus();
    let mut best = (0.0_f64, 0.0_f64);
    let nodes = mesh.node_positions();
    for e in 0..mesh.n_elements() {
        let h = mesh.element_length(e);
        for (xi, x) in [(0.0, nodes[e]), (1.0, nodes[e + 1])] {
            let b = curvature_operator(xi, h);
            let kappa: Complex64 = (0..4).map(|i| u[2 * e + i] * b[i]).sum();
            let mag = kappa.norm();
            if mag > best.0 {
                best = (mag, x);
            }
        }
    }
    let strain = best.0 * c;
    PeakStressStrain {
        stress: e_mod * strain,
        strain,
        position: best.1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::system::{apply_fixed_fixed, assemble, solve_static, SpatialLoad};
    use crate::statics::{end_moment, second_moment};

    #[test]
    fn zero_displacement_zero_stress() {
        let beam = BeamSpec::guide_rod();
        let mesh = Mesh1D::uniform(8, beam.length()).unwrap();
        let u = DVector::zeros(18);
        let p = stress_strain_recovery(&u, &beam, &mesh);
        assert_eq!(p.stress, 0.0);
        assert_eq!(p.strain, 0.0);
    }

    #[test]
    fn end_to_centre_moment_ratio_tends_to_two() {
        let beam = BeamSpec::guide_rod();
        let w = 19.62;
        let ei = beam.flexural_rigidity();
        let mut prev_gap = f64::INFINITY;
        for n in [4, 8, 16, 32, 64] {
            let mesh = Mesh1D::uniform(n, beam.length()).unwrap();
            let sys = apply_fixed_fixed(assemble(&mesh, &beam).unwrap());
            let u = solve_static(&sys, &SpatialLoad::Uniform { intensity: w }).unwrap();
            let curv = element_end_curvatures(&u, &mesh);
            let m_end = ei * curv[0].0.abs();
            let m_mid = ei * curv[n / 2].0.abs();
            let gap = (m_end / m_mid - 2.0).abs();
            assert!(gap < prev_gap, "n={n}: gap {gap} did not shrink");
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-2);
    }

    #[test]
    fn peak_stress_at_clamped_end_matches_closed_form() {
        let beam = BeamSpec::guide_rod();
        let w = 19.62;
        let l = beam.length();
        let mesh = Mesh1D::uniform(40, l).unwrap();
        let sys = apply_fixed_fixed(assemble(&mesh, &beam).unwrap());
        let u = solve_static(&sys, &SpatialLoad::Uniform { intensity: w }).unwrap();
        let peak = stress_strain_recovery(&u, &beam, &mesh);
        assert!(peak.position == 0.0 || peak.position == l);
        let i = second_moment(beam.section());
        let m = peak.stress * i / beam.section().outer_radius();
        assert!(((m - end_moment(w, l)) / end_moment(w, l)).abs() < 1e-2);
        assert!(((peak.stress / beam.material().youngs_modulus()) - peak.strain).abs() <= 1e-12 * peak.strain);
    }
}
