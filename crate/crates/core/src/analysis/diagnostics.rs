//! Per-step diagnostics, the energy-equality residual and the Serrin integral.

use crate::calculus::DealiasMode;
use crate::error::{Error, Result};
use crate::galerkin::{Forcing, Trajectory};
use crate::spectral::{dual_pairing, sobolev_norm_sq};
use crate::viscosity::ViscosityTensor;

use super::quadrature::trapezoid;

/// Instantaneous quantities at one state.
#[derive(Clone, Debug, PartialEq)]
pub struct Instant {
    pub t: f64,
    pub l2_sq: f64,
    pub h_half_n_sq: f64,
    pub hs_sq: Vec<(f64, f64)>,
    pub dissipation: f64,
    pub force_power: f64,
    pub div_residual: f64,
}

/// One diagnostics row of a trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub l2_sq: f64,
    /// `||u||^2_{H^{n/2}}`.
    pub h_half_n_sq: f64,
    /// Extra `(s, ||u||^2_{H^s})` pairs.
    pub hs_sq: Vec<(f64, f64)>,
    /// `a_T(t; u, u)`.
    pub dissipation: f64,
    /// `<f, u>`.
    pub force_power: f64,
    /// Trapezoid `int_0^t ||u||^2_{H^{n/2}}`.
    pub serrin_cumulative: f64,
    /// `1/2 ||u(t)||^2 - 1/2 ||u(0)||^2 + int a_T - int <f, u>`.
    pub energy_residual_cumulative: f64,
    /// `||div u||_{L2}`.
    pub div_residual: f64,
    /// L2 size of the solenoidal re-projection applied after the step.
    pub projection_correction: f64,
}

/// Running trapezoid sums over a growing list of [`Instant`]s.
pub(crate) struct Accumulator {
    first: Instant,
    last: Instant,
    serrin: f64,
    dissipated: f64,
    work: f64,
}

impl Accumulator {
    pub(crate) fn new(first: Instant) -> Self {
        Self {
            last: first.clone(),
            first,
            serrin: 0.0,
            dissipated: 0.0,
            work: 0.0,
        }
    }

    pub(crate) fn push(&mut self, next: Instant) {
        let h = next.t - self.last.t;
        self.serrin += 0.5 * h * (self.last.h_half_n_sq + next.h_half_n_sq);
        self.dissipated += 0.5 * h * (self.last.dissipation + next.dissipation);
        self.work += 0.5 * h * (self.last.force_power + next.force_power);
        self.last = next;
    }

    pub(crate) fn record(&self, projection_correction: f64) -> DiagnosticsRecord {
        let s = &self.last;
        DiagnosticsRecord {
            t: s.t,
            l2_sq: s.l2_sq,
            h_half_n_sq: s.h_half_n_sq,
            hs_sq: s.hs_sq.clone(),
            dissipation: s.dissipation,
            force_power: s.force_power,
            serrin_cumulative: self.serrin,
            energy_residual_cumulative: 0.5 * (s.l2_sq - self.first.l2_sq) + self.dissipated - self.work,
            div_residual: s.div_residual,
            projection_correction,
        }
    }
}

/// Trapezoid evaluation of `1/2 ||u(t1)||^2 + int a_T - 1/2 ||u(t0)||^2 - int <f, u>`
/// on the stored states; positive means an energy deficit.
pub fn energy_residual(traj: &Trajectory, forcing: &Forcing, a: &ViscosityTensor, t0: f64, t1: f64) -> Result<f64> {
    let (i0, i1) = match (traj.index_of(t0), traj.index_of(t1)) {
        (Some(i0), Some(i1)) if i0 < i1 => (i0, i1),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "interval [{t0}, {t1}] is not a pair of increasing trajectory times"
            )))
        }
    };
    let dealias: DealiasMode = traj.dealias;
    let states = &traj.states[i0..=i1];
    let times: Vec<f64> = states.iter().map(|s| s.t).collect();
    let mut diss = Vec::with_capacity(states.len());
    let mut power = Vec::with_capacity(states.len());
    for s in states {
        diss.push(a.bilinear_form(s.t, &s.u, &s.u, dealias)?);
        power.push(forcing.at(s.t).map_or(0.0, |f| dual_pairing(&f, &s.u)));
    }
    let e0 = 0.5 * sobolev_norm_sq(&states[0].u, 0.0);
    let e1 = 0.5 * sobolev_norm_sq(&states[states.len() - 1].u, 0.0);
    Ok(e1 - e0 + trapezoid(&times, &diss) - trapezoid(&times, &power))
}

/// Trapezoid `int_0^T ||u||^2_{H^{n/2}} dt` over the stored states.
pub fn serrin_norm(traj: &Trajectory) -> f64 {
    let times = traj.times();
    let vals: Vec<f64> = traj
        .states
        .iter()
        .map(|s| sobolev_norm_sq(&s.u, 0.5 * s.u.dim() as f64))
        .collect();
    trapezoid(&times, &vals)
}
