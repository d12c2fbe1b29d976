//! Exact periodic heat semigroup `K(t)` and its closed-form time integrals.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::spectral::{rho_powers, sobolev_norm_sq, Spectral, SpectralVectorField};

/// `int_0^T ||K(t) u0||^2_{H^s} dt` together with the cap `||u0||^2_{H^{s-1}}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatProfile {
    pub s: f64,
    pub t_final: f64,
    pub value: f64,
    pub tail_bound: f64,
}

/// `kappa(xi) = (2 pi |xi|)^2`.
#[inline]
fn kappa(norm_sq: i64) -> f64 {
    TAU * TAU * norm_sq as f64
}

/// Multiplies each mode by `exp(-(2 pi |xi|)^2 t)`.
pub fn heat_evolve(u0: &SpectralVectorField, t: f64) -> Result<SpectralVectorField> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    let lat = u0.lattice().clone();
    Ok(u0.map_coeffs(|s, c| c * (-kappa(lat.norm_sq(s)) * t).exp()))
}

/// `int_0^T (1 - ...)`: per-mode factor `(1 - exp(-2 kappa T)) / (2 kappa)`, or `T` at `xi = 0`.
fn decay_integral(k: f64, t: f64) -> f64 {
    if k == 0.0 {
        t
    } else {
        -(-2.0 * k * t).exp_m1() / (2.0 * k)
    }
}

/// Closed-form `int_0^T ||K u0||^2_{H^s} dt`.
pub fn heat_integral(u0: &SpectralVectorField, t_final: f64, s: f64) -> Result<f64> {
    if t_final < 0.0 || t_final.is_nan() {
        return Err(Error::NegativeTime(t_final));
    }
    let lat = u0.lattice();
    let w = rho_powers(lat, 2.0 * s);
    let mut acc = 0.0;
    for ch in u0.channels() {
        for slot in lat.present_slots() {
            let e = ch[slot].norm_sqr();
            if e != 0.0 {
                acc += w[slot] * e * decay_integral(kappa(lat.norm_sq(slot)), t_final);
            }
        }
    }
    Ok(acc)
}

pub fn heat_profile(u0: &SpectralVectorField, t_final: f64, s: f64) -> Result<HeatProfile> {
    Ok(HeatProfile {
        s,
        t_final,
        value: heat_integral(u0, t_final, s)?,
        tail_bound: sobolev_norm_sq(u0, s - 1.0),
    })
}

/// Largest absolute defect of
/// `1/2 ||v(t)||^2_{H^r} + int_0^t ||grad v||^2_{H^r} - 1/2 ||u0||^2_{H^r}`
/// over `steps` equally spaced times in `[0, T]`, with the integral in closed form.
pub fn verify_heat_energy_identity(u0: &SpectralVectorField, t_final: f64, r: f64, steps: usize) -> Result<f64> {
    if steps < 2 {
        return Err(Error::InvalidArgument("energy identity check needs at least 2 steps".into()));
    }
    if t_final < 0.0 {
        return Err(Error::NegativeTime(t_final));
    }
    let lat = u0.lattice();
    let w = rho_powers(lat, 2.0 * r);
    let initial = 0.5 * sobolev_norm_sq(u0, r);
    let mut worst: f64 = 0.0;
    for i in 0..steps {
        let t = t_final * i as f64 / (steps - 1) as f64;
        let v = heat_evolve(u0, t)?;
        let mut dissipated = 0.0;
        for ch in u0.channels() {
            for slot in lat.present_slots() {
                let k = kappa(lat.norm_sq(slot));
                if k != 0.0 {
                    dissipated += w[slot] * ch[slot].norm_sqr() * k * decay_integral(k, t);
                }
            }
        }
        worst = worst.max((0.5 * sobolev_norm_sq(&v, r) + dissipated - initial).abs());
    }
    Ok(worst)
}
