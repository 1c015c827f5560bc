//! One-dimensional Euler-Bernoulli finite-element engine for the guide rods:
//! assembly, clamped-clamped static solve, modal analysis and harmonic sweep.

pub mod element;
pub mod harmonic;
pub mod modal;
pub mod recovery;
pub mod system;

pub use element::element_matrices;
pub use harmonic::{frequency_grid, harmonic_response, HarmonicResult, RayleighDamping};
pub use modal::{solve_modal, BendingPlane, ModalResult};
pub use recovery::{stress_strain_amplitude, stress_strain_recovery, PeakStressStrain};
pub use system::{apply_fixed_fixed, assemble, solve_static, DofSystem, Mesh1D, NodalDof, SpatialLoad};

use crate::error::Result;
use crate::statics::BeamSpec;

/// Uniform mesh, assembly and end clamping in one step.
pub fn clamped_rod(beam: &BeamSpec, n_elements: usize) -> Result<DofSystem> {
    let mesh = Mesh1D::uniform(n_elements, beam.length())?;
    Ok(apply_fixed_fixed(assemble(&mesh, beam)?))
}
