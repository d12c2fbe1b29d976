//! Residuals of the standard inequalities and identities used throughout the analysis.
//! Every function returns `lhs - rhs` (or a relative version), so a violation is a positive value.

use std::collections::BTreeMap;

use rand::Rng;

use crate::calculus::{advect, divergence, gradient, strain, DealiasMode};
use crate::error::{Error, Result};
use crate::spectral::{
    dual_pairing, nice_size, rho, sobolev_norm, sobolev_norm_sq, to_physical, SpectralScalarField,
    SpectralVectorField,
};
use crate::viscosity::ViscosityTensor;

/// `||g||_{H^s} - ||g||_{H^{s1}}^{theta1} ||g||_{H^{s2}}^{1 - theta1}` with `s = theta1 s1 + (1 - theta1) s2`.
pub fn verify_interpolation<F: crate::spectral::Spectral>(g: &F, s1: f64, s2: f64, theta1: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&theta1) {
        return Err(Error::InvalidArgument(format!("theta1 = {theta1} outside [0, 1]")));
    }
    let theta2 = 1.0 - theta1;
    let s = theta1 * s1 + theta2 * s2;
    Ok(sobolev_norm(g, s) - sobolev_norm(g, s1).powf(theta1) * sobolev_norm(g, s2).powf(theta2))
}

/// Finitely supported real sequence on `Z^n`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LatticeSequence {
    n: usize,
    entries: BTreeMap<Vec<i32>, f64>,
}

impl LatticeSequence {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries(n: usize, entries: impl IntoIterator<Item = (Vec<i32>, f64)>) -> Result<Self> {
        let mut seq = Self::new(n);
        for (k, v) in entries {
            seq.insert(k, v)?;
        }
        Ok(seq)
    }

    /// `count` random entries in `[-1, 1]` at random points of `[-radius, radius]^n`.
    pub fn random<R: Rng + ?Sized>(n: usize, radius: i32, count: usize, rng: &mut R) -> Self {
        let mut seq = Self::new(n);
        for _ in 0..count {
            let k: Vec<i32> = (0..n).map(|_| rng.gen_range(-radius..=radius)).collect();
            *seq.entries.entry(k).or_insert(0.0) += rng.gen_range(-1.0..1.0);
        }
        seq
    }

    pub fn insert(&mut self, k: Vec<i32>, v: f64) -> Result<()> {
        if k.len() != self.n {
            return Err(Error::InvalidArgument(format!("index {k:?} is not in Z^{}", self.n)));
        }
        self.entries.insert(k, v);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: &[i32]) -> f64 {
        self.entries.get(k).copied().unwrap_or(0.0)
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// `l_q` norm; `q = f64::INFINITY` gives the max norm.
    pub fn norm(&self, q: f64) -> f64 {
        if q.is_infinite() {
            return self.entries.values().fold(0.0, |a, v| a.max(v.abs()));
        }
        self.entries.values().map(|v| v.abs().powf(q)).sum::<f64>().powf(1.0 / q)
    }

    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::InvalidArgument("sequences live on different lattices".into()));
        }
        let mut out = Self::new(self.n);
        for (a, x) in &self.entries {
            for (b, y) in &other.entries {
                let k: Vec<i32> = a.iter().zip(b).map(|(p, q)| p + q).collect();
                *out.entries.entry(k).or_insert(0.0) += x * y;
            }
        }
        Ok(out)
    }
}

/// `||u * v||_q - ||u||_1 ||v||_q`.
pub fn verify_discrete_young(u: &LatticeSequence, v: &LatticeSequence, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::InvalidArgument(format!("q = {q} must be at least 1")));
    }
    Ok(u.convolve(v)?.norm(q) - u.norm(1.0) * v.norm(q))
}

/// Relative defect `lhs / rhs - 1` of
/// `rho^s(xi) <= 2^{|s|/2} (2 pi)^{-|s|} rho^{|s|}(eta) rho^s(xi - eta)`.
pub fn petree_residual(s: f64, xi: &[i32], eta: &[i32]) -> f64 {
    let diff: Vec<i32> = xi.iter().zip(eta).map(|(a, b)| a - b).collect();
    let lhs = rho(xi).powf(s);
    let rhs = 2f64.powf(0.5 * s.abs()) / std::f64::consts::TAU.powf(s.abs()) * rho(eta).powf(s.abs()) * rho(&diff).powf(s);
    lhs / rhs - 1.0
}

/// `||grad v||^2 - 2 ||E(v)||^2` in `L2`.
pub fn korn_residual(v: &SpectralVectorField) -> f64 {
    let grad_sq: f64 = v.components().iter().map(|c| sobolev_norm_sq(&gradient(c), 0.0)).sum();
    grad_sq - 2.0 * strain(v).frobenius_norm_sq(0.0)
}

/// Relative defects `(1/2 ||g||^2_{H^s} - ||grad g||^2_{H^{s-1}}, ||grad g||^2_{H^{s-1}} - ||g||^2_{H^s})`
/// for zero-mean `g`.
pub fn norm_equivalence_residuals(g: &SpectralScalarField, s: f64) -> Result<(f64, f64)> {
    if g.mean().abs() > 1e-12 * g.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NonzeroMean { mean: g.mean() });
    }
    let full = sobolev_norm_sq(g, s);
    let grad = sobolev_norm_sq(&gradient(g), s - 1.0);
    let scale = full.max(f64::MIN_POSITIVE);
    Ok(((0.5 * full - grad) / scale, (grad - full) / scale))
}

/// Residuals of the three advection identities, each relative to `||v1|| ||v2||_{H^1} ||v3||`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdvectionResiduals {
    /// `<(v1.grad)v2, v3> + <(div v1) v3 + (v1.grad) v3, v2>`, any `v1`.
    pub general: f64,
    /// `<(v1.grad)v2, v3> + <(v1.grad)v3, v2>`, solenoidal `v1`.
    pub antisymmetry: f64,
    /// `<(v1.grad)v2, v2>`, solenoidal `v1`.
    pub self_pairing: f64,
}

fn triple_mean(a: &SpectralScalarField, b: &SpectralVectorField, c: &SpectralVectorField) -> Result<f64> {
    let points = nice_size(3 * a.lattice().radius().max(b.lattice().radius()) + 1);
    let ga = to_physical(a, points)?;
    let mut acc = vec![0.0; ga.samples().len()];
    for k in 0..b.dim() {
        let gb = to_physical(b.component(k), points)?;
        let gc = to_physical(c.component(k), points)?;
        for ((o, x), y) in acc.iter_mut().zip(gb.samples()).zip(gc.samples()) {
            *o += x * y;
        }
    }
    Ok(ga.samples().iter().zip(&acc).map(|(x, y)| x * y).sum::<f64>() / acc.len() as f64)
}

/// `v1` is used as given for the general identity; its solenoidal part drives the other two.
pub fn advection_residuals(
    v1: &SpectralVectorField,
    v2: &SpectralVectorField,
    v3: &SpectralVectorField,
) -> Result<AdvectionResiduals> {
    let mode = DealiasMode::ExactPad;
    let scale = (sobolev_norm(v1, 0.0) * sobolev_norm(v2, 1.0) * sobolev_norm(v3, 0.0)).max(f64::MIN_POSITIVE);
    let lhs = dual_pairing(&advect(v1, v2, mode)?, v3);
    let general = lhs + triple_mean(&divergence(v1), v3, v2)? + dual_pairing(&advect(v1, v3, mode)?, v2);
    let w = crate::calculus::leray_project(&crate::spectral::project_zero_mean(v1))?;
    let antisymmetry = dual_pairing(&advect(&w, v2, mode)?, v3) + dual_pairing(&advect(&w, v3, mode)?, v2);
    let self_pairing = dual_pairing(&advect(&w, v2, mode)?, v2);
    Ok(AdvectionResiduals {
        general: general / scale,
        antisymmetry: antisymmetry / scale,
        self_pairing: self_pairing / scale,
    })
}

/// Relative defects of `C_A^{-1}/4 ||w||^2_{H^1} <= a_T(w, w) <= ||A|| ||w||^2_{H^1}` for zero-mean `w`.
pub fn coercivity_residuals(a: &ViscosityTensor, w: &SpectralVectorField, t: f64) -> Result<(f64, f64)> {
    let c_a = a.ellipticity_constant()?;
    let norm = a.tensor_norms(0.0).sup_norm;
    let h1 = sobolev_norm_sq(w, 1.0);
    let form = a.bilinear_form(t, w, w, DealiasMode::ExactPad)?;
    let scale = h1.max(f64::MIN_POSITIVE);
    Ok(((0.25 / c_a * h1 - form) / scale, (form - norm * h1) / scale))
}
