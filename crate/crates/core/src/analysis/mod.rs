//! Energy residuals, Serrin integral, threshold constants, commutator and multiplication
//! constants, Gronwall bounds and the appendix inequalities.

pub mod commutator;
pub mod diagnostics;
pub mod gronwall;
pub mod inequalities;
pub mod multiplication;
pub mod quadrature;
pub mod threshold;

pub use commutator::{commutator_constant, CommutatorReport};
pub use diagnostics::{energy_residual, serrin_norm, DiagnosticsRecord};
pub use gronwall::{
    gronwall_bound, integral_gronwall_bound, smallness_check, GronwallBound, GronwallProblem, IntegralGronwall,
    SmallnessReport, SmallnessVariant,
};
pub use inequalities::{verify_discrete_young, verify_interpolation, LatticeSequence};
pub use multiplication::{estimate_multiplication_constant, multiplication_ratio};
pub use threshold::{existence_threshold, Regime, SampledFunction, ThresholdConstants, ThresholdReport};
