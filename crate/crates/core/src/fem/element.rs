//! Hermite-cubic Euler-Bernoulli beam element.
//!
//! Element DOFs: `[w1, θ1, w2, θ2]` (transverse deflection and rotation at
//! each end). No shear deformation and no rotary inertia.

use nalgebra::SMatrix;

use crate::error::{ensure_positive, Result};

pub type Matrix4 = SMatrix<f64, 4, 4>;

/// Element stiffness and consistent mass matrices.
pub fn element_matrices(flexural_rigidity: f64, linear_density: f64, length: f64) -> Result<(Matrix4, Matrix4)> {
    ensure_positive("flexural rigidity", flexural_rigidity)?;
    ensure_positive("linear density", linear_density)?;
    ensure_positive("element length", length)?;
    Ok((
        stiffness(flexural_rigidity, length),
        consistent_mass(linear_density, length),
    ))
}

fn stiffness(ei: f64, h: f64) -> Matrix4 {
    let c = ei / (h * h * h);
    let h2 = h * h;
    #[rustfmt::skip]
    let k = Matrix4::from_row_slice(&[
         12.0,      6.0 * h, -12.0,      6.0 * h,
         6.0 * h,   4.0 * h2, -6.0 * h,  2.0 * h2,
        -12.0,     -6.0 * h,  12.0,     -6.0 * h,
         6.0 * h,   2.0 * h2, -6.0 * h,  4.0 * h2,
    ]);
    k * c
}

fn consistent_mass(rho_a: f64, h: f64) -> Matrix4 {
    let c = rho_a * h / 420.0;
    let h2 = h * h;
    #[rustfmt::skip]
    let m = Matrix4::from_row_slice(&[
         156.0,      22.0 * h,   54.0,     -13.0 * h,
          22.0 * h,   4.0 * h2,  13.0 * h,  -3.0 * h2,
          54.0,      13.0 * h,  156.0,     -22.0 * h,
         -13.0 * h,  -3.0 * h2, -22.0 * h,   4.0 * h2,
    ]);
    m * c
}

/// Consistent nodal loads for a uniform transverse load `w` over the element.
pub fn uniform_load_vector(w: f64, h: f64) -> [f64; 4] {
    [w * h / 2.0, w * h * h / 12.0, w * h / 2.0, -w * h * h / 12.0]
}

/// Hermite shape functions at local coordinate `xi ∈ [0, 1]`.
pub fn shape_functions(xi: f64, h: f64) -> [f64; 4] {
    let xi2 = xi * xi;
    let xi3 = xi2 * xi;
    [
        1.0 - 3.0 * xi2 + 2.0 * xi3,
        h * (xi - 2.0 * xi2 + xi3),
        3.0 * xi2 - 2.0 * xi3,
        h * (xi3 - xi2),
    ]
}

/// Second derivatives of the shape functions with respect to x (curvature operator).
pub fn curvature_operator(xi: f64, h: f64) -> [f64; 4] {
    let h2 = h * h;
    [
        (-6.0 + 12.0 * xi) / h2,
        (-4.0 + 6.0 * xi) / h,
        (6.0 - 12.0 * xi) / h2,
        (-2.0 + 6.0 * xi) / h,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{SVector, SymmetricEigen};

    const EI: f64 = 105.4;
    const RHO_A: f64 = 0.2661;

    #[test]
    fn rigid_body_modes_are_strain_free() {
        let h = 0.0175;
        let (k, _) = element_matrices(EI, RHO_A, h).unwrap();
        let translation = SVector::<f64, 4>::new(1.0, 0.0, 1.0, 0.0);
        let rotation = SVector::<f64, 4>::new(-h / 2.0, 1.0, h / 2.0, 1.0);
        let scale = k.abs().max();
        assert!((k * translation).abs().max() < 1e-12 * scale);
        assert!((k * rotation).abs().max() < 1e-12 * scale);
    }

    #[test]
    fn stiffness_has_two_zero_eigenvalues() {
        // rotations expressed as h·θ so the spectrum is well balanced
        let h = 0.05;
        let (k, _) = element_matrices(EI, RHO_A, h).unwrap();
        let s = Matrix4::from_diagonal(&SVector::<f64, 4>::new(1.0, 1.0 / h, 1.0, 1.0 / h));
        let balanced = s * k * s;
        let eig = SymmetricEigen::new(balanced);
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        let top = vals[3];
        assert!(vals[0].abs() < 1e-12 * top);
        assert!(vals[1].abs() < 1e-12 * top);
        assert!(vals[2] > 1e-3 * top);
    }

    #[test]
    fn mass_and_stiffness_symmetric() {
        let (k, m) = element_matrices(EI, RHO_A, 0.1).unwrap();
        assert_eq!(k, k.transpose());
        assert_eq!(m, m.transpose());
    }

    #[test]
    fn translational_mass_sums_to_element_mass() {
        let h = 0.1;
        let (_, m) = element_matrices(EI, RHO_A, h).unwrap();
        let t = SVector::<f64, 4>::new(1.0, 0.0, 1.0, 0.0);
        let total = (t.transpose() * m * t)[(0, 0)];
        assert!((total - RHO_A * h).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_element() {
        assert!(element_matrices(EI, RHO_A, 0.0).is_err());
        assert!(element_matrices(EI, RHO_A, -0.1).is_err());
        assert!(element_matrices(0.0, RHO_A, 0.1).is_err());
    }

    #[test]
    fn shape_functions_interpolate_nodes() {
        let h = 0.3;
        assert_eq!(shape_functions(0.0, h), [1.0, 0.0, 0.0, 0.0]);
        let end = shape_functions(1.0, h);
        assert!(end[0].abs() < 1e-15 && end[1].abs() < 1e-15 && end[3].abs() < 1e-15);
        assert!((end[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn curvature_of_cubic_is_exact() {
        // w(x) = x³ on [0, h]: nodal values w1=0, θ1=0, w2=h³, θ2=3h²; w'' = 6x
        let h = 0.4;
        let u = [0.0, 0.0, h * h * h, 3.0 * h * h];
        for &xi in &[0.0, 0.25, 0.5, 1.0] {
            let b = curvature_operator(xi, h);
            let kappa: f64 = b.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
            assert!((kappa - 6.0 * xi * h).abs() < 1e-12);
        }
    }
}
