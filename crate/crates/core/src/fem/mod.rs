//! Fine-scale Q1 finite elements: assembly, Dirichlet elimination, cached
//! sparse Cholesky solves and local restriction to `V_i`.

mod assembly;
mod field;
mod operator;
mod sparse;

pub use assembly::{
    assemble_functional, assemble_functional_full, assemble_stiffness, assemble_stiffness_full, assemble_weighted_mass,
    element_mass, element_stiffness, eliminate, mass_on_window, stiffness_on_window,
};
pub use field::PermeabilityField;
pub use operator::{energy_norm, restrict_local, solve_dirichlet, FineOperator, LocalOperator, NodalVector};
pub use sparse::{CsrMatrix, SparseCholesky};
