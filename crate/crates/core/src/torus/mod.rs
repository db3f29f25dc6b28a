//! Flat-torus magnetic Laplacian `Delta_k + k V` on a Peierls lattice.

mod eigen;
mod lattice;
mod model;

pub use eigen::{
    exact_landau_reference, solve_lowest, solve_lowest_with, EigenResult, Scaling, SolverOptions, RESIDUAL_TOLERANCE,
};
pub use lattice::{build_magnetic_laplacian, CsrMatrix, LandauChain, MagneticLatticeOperator};
pub use model::{PotentialSpec, PotentialTerm, TorusModel};
