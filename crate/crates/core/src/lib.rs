//! Numerical toolkit for the fiberwise symbol calculus of magnetic
//! Laplacians in the large-field limit.
//!
//! * [`star`]: the product `#_A`, Williamson normal forms, polynomial and grid symbols.
//! * [`quantize`]: Weyl quantization into a truncated Hermite basis and back.
//! * [`models`]: resolvent and spectral-projector symbols of the harmonic oscillator.
//! * [`torus`]: Peierls discretization of the magnetic Laplacian on a flat torus.
//! * [`verify`]: cluster, Weyl-law and band checks plus report emission.

pub mod error;
pub mod models;
pub mod quantize;
pub mod star;
pub mod torus;
pub mod verify;

pub use error::{Error, Result};
