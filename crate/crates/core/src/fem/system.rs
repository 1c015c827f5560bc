use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::element::{element_matrices, shape_functions, uniform_load_vector};
use crate::error::{ensure_positive, Error, Result};
use crate::statics::{BeamSpec, UdlLoad};

/// Nodes along the beam axis. First node at 0, last at the beam length.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
}

impl Mesh1D {
    pub fn uniform(n_elements: usize, length: f64) -> Result<Self> {
        if n_elements < 2 {
            return Err(Error::invalid(
                "mesh",
                format!("need at least 2 elements, got {n_elements}"),
            ));
        }
        ensure_positive("mesh length", length)?;
        let nodes = (0..=n_elements)
            .map(|i| length * i as f64 / n_elements as f64)
            .collect();
        Ok(Self { nodes })
    }

    pub fn from_positions(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::invalid("mesh", "need at least 2 elements"));
        }
        if nodes[0] != 0.0 {
            return Err(Error::invalid("mesh", "first node must be at 0"));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::invalid("mesh", "node positions must be strictly increasing"));
        }
        Ok(Self { nodes })
    }

    pub fn n_elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_positions(&self) -> &[f64] {
        &self.nodes
    }

    pub fn length(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn element_length(&self, e: usize) -> f64 {
        self.nodes[e + 1] - self.nodes[e]
    }

    /// Element containing `x` and the local coordinate in `[0, 1]`.
    pub fn locate(&self, x: f64) -> Option<(usize, f64)> {
        if !(0.0..=self.length()).contains(&x) {
            return None;
        }
        let e = match self.nodes.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => i.min(self.n_elements() - 1),
            Err(i) => i - 1,
        };
        Some((e, (x - self.nodes[e]) / self.element_length(e)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodalDof {
    Deflection,
    Rotation,
}

/// Global DOF index of `dof` at `node`.
pub fn dof_index(node: usize, dof: NodalDof) -> usize {
    2 * node
        + match dof {
            NodalDof::Deflection => 0,
            NodalDof::Rotation => 1,
        }
}

/// Transverse load pattern applied to the beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpatialLoad {
    /// Intensity in N/m over the whole span.
    Uniform { intensity: f64 },
    /// Concentrated force in N at `position` metres from the left end.
    Point { position: f64, magnitude: f64 },
}

impl From<UdlLoad> for SpatialLoad {
    fn from(udl: UdlLoad) -> Self {
        SpatialLoad::Uniform {
            intensity: udl.intensity(),
        }
    }
}

/// Assembled global matrices plus the set of constrained DOFs.
#[derive(Debug, Clone)]
pub struct DofSystem {
    mesh: Mesh1D,
    beam: BeamSpec,
    stiffness: DMatrix<f64>,
    mass: DMatrix<f64>,
    constrained: BTreeSet<usize>,
}

/// Global stiffness and consistent mass for `beam` discretised by `mesh`.
pub fn assemble(mesh: &Mesh1D, beam: &BeamSpec) -> Result<DofSystem> {
    let tol = 1e-9 * beam.length();
    if (mesh.length() - beam.length()).abs() > tol {
        return Err(Error::invalid(
            "mesh",
            format!(
                "mesh length {} does not match beam length {}",
                mesh.length(),
                beam.length()
            ),
        ));
    }
    let n = 2 * mesh.n_nodes();
    let mut k = DMatrix::zeros(n, n);
    let mut m = DMatrix::zeros(n, n);
    let ei = beam.flexural_rigidity();
    let rho_a = beam.linear_density();
    for e in 0..mesh.n_elements() {
        let (ke, me) = element_matrices(ei, rho_a, mesh.element_length(e))?;
        let base = 2 * e;
        for i in 0..4 {
            for j in 0..4 {
                k[(base + i, base + j)] += ke[(i, j)];
                m[(base + i, base + j)] += me[(i, j)];
            }
        }
    }
    Ok(DofSystem {
        mesh: mesh.clone(),
        beam: *beam,
        stiffness: k,
        mass: m,
        constrained: BTreeSet::new(),
    })
}

/// Clamps deflection and rotation at both end nodes.
pub fn apply_fixed_fixed(mut sys: DofSystem) -> DofSystem {
    let last = sys.mesh.n_nodes() - 1;
    for node in [0, last] {
        sys.constrained.insert(dof_index(node, NodalDof::Deflection));
        sys.constrained.insert(dof_index(node, NodalDof::Rotation));
    }
    sys
}

impl DofSystem {
    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn beam(&self) -> &BeamSpec {
        &self.beam
    }

    pub fn n_dofs(&self) -> usize {
        self.stiffness.nrows()
    }

    pub fn stiffness(&self) -> &DMatrix<f64> {
        &self.stiffness
    }

    pub fn mass(&self) -> &DMatrix<f64> {
        &self.mass
    }

    pub fn constrained_dofs(&self) -> &BTreeSet<usize> {
        &self.constrained
    }

    pub fn free_dofs(&self) -> Vec<usize> {
        (0..self.n_dofs()).filter(|d| !self.constrained.contains(d)).collect()
    }

    pub fn n_free(&self) -> usize {
        self.n_dofs() - self.constrained.len()
    }

    fn reduce(&self, full: &DMatrix<f64>) -> DMatrix<f64> {
        let free = self.free_dofs();
        DMatrix::from_fn(free.len(), free.len(), |i, j| full[(free[i], free[j])])
    }

    pub fn reduced_stiffness(&self) -> DMatrix<f64> {
        self.reduce(&self.stiffness)
    }

    pub fn reduced_mass(&self) -> DMatrix<f64> {
        self.reduce(&self.mass)
    }

    pub fn reduce_vector(&self, full: &DVector<f64>) -> DVector<f64> {
        let free = self.free_dofs();
        DVector::from_iterator(free.len(), free.iter().map(|&d| full[d]))
    }

    /// Scatters a reduced vector back to all DOFs, zero at constrained ones.
    pub fn expand<T: nalgebra::Scalar + num_traits::Zero>(&self, reduced: &DVector<T>) -> DVector<T> {
        let mut full = DVector::from_element(self.n_dofs(), T::zero());
        for (r, d) in self.free_dofs().into_iter().enumerate() {
            full[d] = reduced[r].clone();
        }
        full
    }

    /// Consistent nodal force vector over all DOFs.
    pub fn load_vector(&self, load: &SpatialLoad) -> Result<DVector<f64>> {
        let mut f = DVector::zeros(self.n_dofs());
        match *load {
            SpatialLoad::Uniform { intensity } => {
                if !intensity.is_finite() {
                    return Err(Error::invalid("load intensity", "must be finite"));
                }
                for e in 0..self.mesh.n_elements() {
                    let fe = uniform_load_vector(intensity, self.mesh.element_length(e));
                    for (i, v) in fe.iter().enumerate() {
                        f[2 * e + i] += v;
                    }
                }
            }
            SpatialLoad::Point { position, magnitude } => {
                let (e, xi) = self
                    .mesh
                    .locate(position)
                    .ok_or_else(|| Error::invalid("point load", format!("position {position} outside the beam")))?;
                let n = shape_functions(xi, self.mesh.element_length(e));
                for (i, v) in n.iter().enumerate() {
                    f[2 * e + i] += magnitude * v;
                }
            }
        }
        Ok(f)
    }
}

/// Deflections of the translational DOFs of a full displacement vector.
pub fn nodal_deflections(u: &DVector<f64>) -> Vec<f64> {
    u.iter().step_by(2).copied().collect()
}

/// Solves `K·u = f` on the free DOFs; returns displacements for all DOFs.
pub fn solve_static(sys: &DofSystem, load: &SpatialLoad) -> Result<DVector<f64>> {
    let f = sys.reduce_vector(&sys.load_vector(load)?);
    let k = sys.reduced_stiffness();
    let chol = k.cholesky().ok_or(Error::SingularSystem)?;
    let u = chol.solve(&f);
    Ok(sys.expand(&u))
}
