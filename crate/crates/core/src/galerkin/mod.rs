//! Galerkin approximation: divergence-free basis, projected right-hand side, time stepping.

mod basis;
pub mod scenarios;
mod solver;

pub use basis::{polarizations, BasisMode, GalerkinBasis, Phase};
pub use solver::{
    galerkin_rhs, recover_pressure, solve, stability_cap, step, Forcing, GalerkinSystem, Scheme, SolverConfig,
    SolverState, Stepper, Trajectory,
};
