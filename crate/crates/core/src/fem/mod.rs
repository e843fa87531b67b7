//! Conforming finite elements: spaces, coefficient fields, assembly,
//! Dirichlet elimination and quadrature norms.

mod assembly;
mod field;
mod norms;
mod quadrature;
mod space;

pub use assembly::{
    apply_dirichlet, assemble_boundary_load, assemble_convection, assemble_diffusion, assemble_load, assemble_mass,
    gram_matrix, zero_dirichlet, zero_dirichlet_entries, Elimination,
};
pub use field::{ScalarField, VectorField};
pub use norms::{error_vs_exact, error_vs_exact_refined, gram_norm, norm, NormKind};
pub use quadrature::{gauss_legendre, triangle_degree4};
pub use space::{FeFunction, FeSpace, Geometry, GAUSS_POINTS_1D};
