pub mod star;
pub mod symbols;
pub mod torus;
