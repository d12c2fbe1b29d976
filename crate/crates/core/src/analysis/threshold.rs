//! Explicit smallness condition guaranteeing a Serrin-type solution on `[0, T*]`.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::heat::heat_integral;
use crate::spectral::{sobolev_norm_sq, SpectralVectorField};
use crate::viscosity::ViscosityTensor;

use super::commutator::commutator_constant;
use super::multiplication::estimate_multiplication_constant;

pub const HEURISTIC_LABEL: &str = "heuristic up to C*";

/// Piecewise linear samples `(t, value)`, held constant outside their span.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SampledFunction {
    points: Vec<(f64, f64)>,
}

impl SampledFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(value: f64) -> Self {
        Self {
            points: vec![(0.0, value)],
        }
    }

    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidArgument("sample times must be strictly increasing".into()));
        }
        if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite() || p.1 < 0.0) {
            return Err(Error::InvalidArgument("samples must be finite and nonnegative".into()));
        }
        Ok(Self { points })
    }

    pub fn value(&self, t: f64) -> f64 {
        match self.points.as_slice() {
            [] => 0.0,
            [(_, v)] => *v,
            pts => {
                if t <= pts[0].0 {
                    return pts[0].1;
                }
                for w in pts.windows(2) {
                    let ((t0, v0), (t1, v1)) = (w[0], w[1]);
                    if t <= t1 {
                        return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
                    }
                }
                pts[pts.len() - 1].1
            }
        }
    }

    /// Exact integral of the interpolant over `[0, t]`.
    pub fn integral_to(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let mut knots: Vec<f64> = vec![0.0];
        knots.extend(self.points.iter().map(|p| p.0).filter(|&x| x > 0.0 && x < t));
        knots.push(t);
        knots
            .windows(2)
            .map(|w| 0.5 * (w[1] - w[0]) * (self.value(w[0]) + self.value(w[1])))
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    ConstantCoeff,
    VariableCoeff,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::ConstantCoeff => "constant_coeff",
            Regime::VariableCoeff => "variable_coeff",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant_coeff" | "constant" => Ok(Regime::ConstantCoeff),
            "variable_coeff" | "variable" => Ok(Regime::VariableCoeff),
            _ => Err(Error::InvalidArgument(format!("unknown regime '{s}'"))),
        }
    }
}

/// Overrides for the constants entering the condition; `None` means "derive from the tensor".
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdConstants {
    pub c_star: f64,
    pub c_tilde_star: f64,
    pub c_a: Option<f64>,
    pub tensor_norm: Option<f64>,
    pub c_bar: Option<f64>,
    pub sigma_tilde: Option<f64>,
    /// Lattice radius for the commutator sum.
    pub commutator_radius: usize,
    /// Random pairs used to report an empirical lower bound for `C*`; 0 skips it.
    pub c_star_trials: usize,
    pub seed: u64,
}

impl Default for ThresholdConstants {
    fn default() -> Self {
        Self {
            c_star: 1.0,
            c_tilde_star: 1.0,
            c_a: None,
            tensor_norm: None,
            c_bar: None,
            sigma_tilde: None,
            commutator_radius: 64,
            c_star_trials: 0,
            seed: 0,
        }
    }
}

/// Default `sigma_n`: half a unit above `max{2, n - 2}`.
pub fn default_sigma_tilde(n: usize) -> f64 {
    2f64.max(n as f64 - 2.0) + 0.5
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdReport {
    pub regime: Regime,
    pub c_a: f64,
    /// Sampled ellipticity constant stored on the tensor, if it was validated.
    pub c_a_sampled: Option<f64>,
    pub c_star: f64,
    pub c_star_lower_bound: Option<f64>,
    pub c_tilde_star: f64,
    pub c_bar: f64,
    pub sigma_tilde: f64,
    pub tensor_norm: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub u0_norm_sq: f64,
    pub t_star: f64,
    pub force_integral: f64,
    pub heat_integral: f64,
    pub lhs: f64,
    pub margin: f64,
    pub t_star_max: f64,
    pub label: &'static str,
}

impl ThresholdReport {
    pub fn satisfied(&self) -> bool {
        self.margin > 0.0
    }
}

/// Left side `int ||f||^2 + (A1 ||u0||^2_{H^{n/2-1}} + A2) int ||K u0||^2_{H^{n/2}}` on `[0, t_star]`.
pub fn threshold_lhs(u0: &SpectralVectorField, f_sq: &SampledFunction, a1: f64, a2: f64, t_star: f64) -> Result<f64> {
    let n = u0.dim() as f64;
    let u0_sq = sobolev_norm_sq(u0, 0.5 * n - 1.0);
    Ok(f_sq.integral_to(t_star) + (a1 * u0_sq + a2) * heat_integral(u0, t_star, 0.5 * n)?)
}

/// Evaluates the condition at `T* = t_final` and bisects for the largest admissible `T*` in `[0, t_final]`.
pub fn existence_threshold(
    u0: &SpectralVectorField,
    f_sq: &SampledFunction,
    a: &ViscosityTensor,
    t_final: f64,
    regime: Regime,
    constants: &ThresholdConstants,
) -> Result<ThresholdReport> {
    if t_final < 0.0 || t_final.is_nan() {
        return Err(Error::NegativeTime(t_final));
    }
    let n = u0.dim();
    if a.dim() != n {
        return Err(Error::ComponentCount {
            expected: a.dim(),
            got: n,
        });
    }
    let c_a_sampled = a.ellipticity_constant().ok();
    let c_a = match constants.c_a {
        Some(v) => v,
        None => a.ellipticity_constant()?,
    };
    if !(c_a > 0.0 && c_a.is_finite()) {
        return Err(Error::InvalidArgument(format!("ellipticity constant must be positive, got {c_a}")));
    }
    let c_star = constants.c_star;
    let sigma_tilde = constants.sigma_tilde.unwrap_or_else(|| default_sigma_tilde(n));
    let half = 0.5 * n as f64;
    let (tensor_norm, c_bar, a2, a3) = match regime {
        Regime::ConstantCoeff => {
            let norm = constants.tensor_norm.unwrap_or_else(|| a.tensor_norms(0.0).sup_norm);
            let a3 = 1.0 / (512.0 * E * c_a * c_a * c_star * c_star);
            (norm, 0.0, norm * norm + 1.0, a3)
        }
        Regime::VariableCoeff => {
            let norm = constants
                .tensor_norm
                .unwrap_or_else(|| a.tensor_norms(sigma_tilde + 1.0).sobolev_frobenius_norm);
            let c_bar = match constants.c_bar {
                Some(v) => v,
                None => commutator_constant(0.0, half - 1.0, sigma_tilde, n, constants.commutator_radius)?.value,
            };
            let ct = constants.c_tilde_star;
            let a3 = 1.0 / (640.0 * c_a * c_a * c_star * c_star)
                * (-1.0 - 20.0 * c_a * c_bar * c_bar * norm * norm * t_final).exp();
            (norm, c_bar, ct * ct * norm * norm + 1.0, a3)
        }
    };
    let a1 = 8.0 * c_star * c_star;
    let c_star_lower_bound = if constants.c_star_trials > 0 {
        let s = half - 0.5;
        let m = u0.lattice().radius().clamp(1, 3);
        Some(estimate_multiplication_constant(s, s, n, m, constants.c_star_trials, constants.seed)?)
    } else {
        None
    };
    let u0_norm_sq = sobolev_norm_sq(u0, half - 1.0);
    let force_integral = f_sq.integral_to(t_final);
    let heat = heat_integral(u0, t_final, half)?;
    let lhs = force_integral + (a1 * u0_norm_sq + a2) * heat;
    let t_star_max = if lhs < a3 {
        t_final
    } else {
        let (mut lo, mut hi) = (0.0, t_final);
        while hi - lo > 1e-6 * hi {
            let mid = 0.5 * (lo + hi);
            if threshold_lhs(u0, f_sq, a1, a2, mid)? < a3 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    Ok(ThresholdReport {
        regime,
        c_a,
        c_a_sampled,
        c_star,
        c_star_lower_bound,
        c_tilde_star: constants.c_tilde_star,
        c_bar,
        sigma_tilde,
        tensor_norm,
        a1,
        a2,
        a3,
        u0_norm_sq,
        t_star: t_final,
        force_integral,
        heat_integral: heat,
        lhs,
        margin: a3 - lhs,
        t_star_max,
        label: HEURISTIC_LABEL,
    })
}
