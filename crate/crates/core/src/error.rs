use thiserror::Error;

use crate::galerkin::SolverState;

/// Errors raised by the spectral toolkit and the solver built on it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("fields live on different lattices ({left} vs {right})")]
    LatticeMismatch { left: String, right: String },

    #[error("coefficient table has {got} entries, lattice expects {expected}")]
    CoefficientCount { expected: usize, got: usize },

    #[error("vector field needs {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },

    #[error("field violates Hermitian symmetry at mode {mode:?} (defect {defect:e})")]
    NotHermitian { mode: Vec<i32>, defect: f64 },

    #[error("nonzero coefficient outside the truncation ball at mode {mode:?}")]
    OutsideBall { mode: Vec<i32> },

    #[error("grid with {points} points per axis aliases lattice radius {radius}; need at least {needed}")]
    Aliasing {
        points: usize,
        radius: usize,
        needed: usize,
    },

    #[error("field has nonzero mean (|mean| = {mean:e}); operation is defined on zero-mean fields")]
    NonzeroMean { mean: f64 },

    #[error("field is not a gradient: worst mode {mode:?} has relative off-parallel residual {residual:e}")]
    NotGradient { mode: Vec<i32>, residual: f64 },

    #[error("tensor is not relaxed-elliptic: a(zeta, zeta) = {value:e} at x = {x:?}, t = {t}, zeta = {zeta:?}")]
    NotRelaxedElliptic {
        zeta: Vec<f64>,
        x: Vec<f64>,
        t: f64,
        value: f64,
    },

    #[error("tensor violates the symmetry conditions ({violations} violations)")]
    TensorNotSymmetric { violations: usize },

    #[error("tensor has not been validated (no ellipticity constant available)")]
    TensorNotValidated,

    #[error("lattice sum diverges: sigma_tilde = {sigma_tilde} must exceed {threshold}")]
    Divergent { sigma_tilde: f64, threshold: f64 },

    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration rejected: {0}")]
    Config(String),

    #[error("numerical blow-up at t = {t}")]
    BlowUp {
        t: f64,
        /// `(t, max |coefficient|)` at each accepted step before the failure.
        max_norm_history: Vec<(f64, f64)>,
        last_good: Box<SolverState>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
