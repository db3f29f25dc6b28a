//! Model symbols of the harmonic oscillator and the spectral constructions built on them.

pub mod resolvent;
pub mod spectral;

pub use resolvent::{
    nearest_pole, projector_symbol, projector_value, resolvent_symbol, resolvent_value, residue_projector,
    PoissonSeries, ProjectorQuery, ResidueProjection, ResolventQuery, RESIDUE_SIGN_CONVENTION,
};
pub use spectral::{
    pullback_through_frame, sharp_inverse, spectral_window_symbol, spectrum_of_symbol, SymbolSpectrum,
};
