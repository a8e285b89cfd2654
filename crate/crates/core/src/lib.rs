//! Laplace transformations of two-dimensional semi-discrete and discrete hyperbolic
//! Schrödinger operators, the 2D Toda lattices they generate, and the direct spectral
//! problem (Floquet multipliers, spectral curves, marked points) for periodic operators.

pub mod cli;
pub mod coeffring;
pub mod disc;
pub mod disc_spectral;
pub mod floquet;
pub mod gen;
pub mod linalg;
pub mod semidisc;
pub mod toda;
