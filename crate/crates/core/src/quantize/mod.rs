//! Weyl quantization in a truncated Hermite basis and its inverse.

pub mod hermite;
pub mod weyl;

pub use hermite::{hermite_table, HermiteBasisSpec, HermiteTable, Taper};
pub use weyl::{weyl_product_grid, weyl_quantize, wigner_symbol, BlockComparison, OperatorMatrix, Quantize};
