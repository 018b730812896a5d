//! Meshing, P1 finite-element assembly, Dirichlet handling and the
//! tridiagonal linear algebra shared by every stepper.

mod assembly;
mod mesh;
mod problem;
mod tridiag;

pub use assembly::{
    add_element_matrix, assemble_advection, assemble_diffusion, assemble_load, assemble_mass,
    assemble_stiffness, galerkin_system,
};
pub use mesh::{Mesh1D, NodalField};
pub use problem::{
    apply_dirichlet, apply_dirichlet_values, project_velocity, BoundaryFn, DirichletBC, InitialCondition, Problem,
    ProjectionRule, Source, TimeGrid, VelocityField,
};
pub use tridiag::{solve_tridiag, TriDiagSystem, Tridiag};
