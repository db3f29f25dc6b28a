//! Symbol calculus on a single fiber: polynomial and grid symbols, the
//! product `#_A`, and Williamson normal forms.

pub mod forms;
pub mod grid;
pub mod poly;
pub mod product;

pub use forms::{symplectic_frame, williamson_eigenvalues, AntisymmetricForm, MetricForm, SymplecticFrame};
pub use grid::{GridSpec, GridSymbol};
pub use poly::{MultiIndex, PolySymbol};
pub use product::{left_linear, left_xi, moyal_product, sharp_power, symmetrized_product, LeftXi};
