//! Fourier–Galerkin toolkit for anisotropic incompressible flow on the unit torus.

pub mod analysis;
pub mod calculus;
pub mod error;
pub mod galerkin;
pub mod heat;
pub mod spectral;
pub mod viscosity;

pub use error::{Error, Result};
