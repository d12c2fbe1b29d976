//! Vector calculus on spectral fields: derivatives, Helmholtz split, strain and advection.

use std::f64::consts::TAU;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{
    coeffs_to_samples, ensure_same_lattice, nice_size, samples_to_coeffs, FrequencyLattice, Spectral,
    SpectralScalarField, SpectralVectorField,
};

/// Default relative tolerance for the curl-free test in [`invert_gradient`].
pub const CURL_FREE_TOL: f64 = 1e-8;

/// Relative size below which a mean coefficient counts as roundoff.
const MEAN_TOL: f64 = 1e-12;

/// Grid sizing policy for pseudo-spectral products.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DealiasMode {
    /// `N >= 2 * bandwidth + 1`: every product mode is resolved.
    #[default]
    ExactPad,
    /// `N >= bandwidth + m_out + 1`: aliases miss the retained modes.
    TwoThirds,
}

impl DealiasMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DealiasMode::ExactPad => "exact_pad",
            DealiasMode::TwoThirds => "two_thirds",
        }
    }

    /// Minimum points per axis for a product of total bandwidth `bandwidth`
    /// whose result is kept up to radius `m_out`.
    pub fn min_points(self, bandwidth: usize, m_out: usize) -> usize {
        match self {
            DealiasMode::ExactPad => 2 * bandwidth + 1,
            DealiasMode::TwoThirds => bandwidth + m_out + 1,
        }
    }

    /// Smallest FFT-friendly grid meeting [`Self::min_points`].
    pub fn points(self, bandwidth: usize, m_out: usize) -> usize {
        nice_size(self.min_points(bandwidth, m_out))
    }
}

impl std::str::FromStr for DealiasMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact_pad" => Ok(DealiasMode::ExactPad),
            "two_thirds" => Ok(DealiasMode::TwoThirds),
            other => Err(Error::InvalidArgument(format!("unknown dealias mode `{other}`"))),
        }
    }
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `d g / d x_axis`.
pub fn partial(g: &SpectralScalarField, axis: usize) -> SpectralScalarField {
    let lat = g.lattice().clone();
    let mut out = g.map_coeffs(|s, c| c * Complex64::new(0.0, TAU * lat.mode(s)[axis] as f64));
    out.mark_zero_mean();
    out
}

pub fn divergence(u: &SpectralVectorField) -> SpectralScalarField {
    let lat = u.lattice();
    let coeffs = (0..lat.len())
        .map(|s| {
            let xi = lat.mode(s);
            let dot: Complex64 = u
                .components()
                .iter()
                .zip(xi)
                .map(|(c, &k)| c.coeffs()[s] * k as f64)
                .sum();
            dot * Complex64::new(0.0, TAU)
        })
        .collect();
    SpectralScalarField::from_raw(lat, coeffs, true)
}

/// `||div u||_{L2}`.
pub fn divergence_residual(u: &SpectralVectorField) -> f64 {
    crate::spectral::sobolev_norm(&divergence(u), 0.0)
}

pub fn gradient(q: &SpectralScalarField) -> SpectralVectorField {
    let n = q.lattice().dim();
    let comps = (0..n).map(|k| partial(q, k)).collect();
    let zero_field = q.coeffs().iter().all(|c| c.norm() == 0.0);
    SpectralVectorField::from_components_unchecked(comps, true, zero_field)
}

fn check_zero_mean(f: &SpectralVectorField) -> Result<()> {
    let z = f.lattice().zero_slot();
    let scale = f.max_abs();
    for c in f.components() {
        let mean = c.coeffs()[z].norm();
        if mean > MEAN_TOL * scale {
            return Err(Error::NonzeroMean { mean });
        }
    }
    Ok(())
}

/// Per-mode split `F = F_g + F_sigma` with `F_g(xi) = xi (xi . F(xi)) / |xi|^2`.
pub fn helmholtz_decompose(f: &SpectralVectorField) -> Result<(SpectralVectorField, SpectralVectorField)> {
    check_zero_mean(f)?;
    let lat = f.lattice().clone();
    let n = lat.dim();
    let z = lat.zero_slot();
    let mut grad: Vec<Vec<Complex64>> = vec![vec![zero(); lat.len()]; n];
    let mut sol: Vec<Vec<Complex64>> = vec![vec![zero(); lat.len()]; n];
    for s in lat.present_slots() {
        if s == z {
            continue;
        }
        let xi = lat.mode(s);
        let q = lat.norm_sq(s) as f64;
        let dot: Complex64 = (0..n).map(|k| f.component(k).coeffs()[s] * xi[k] as f64).sum();
        for k in 0..n {
            let g = dot * (xi[k] as f64 / q);
            grad[k][s] = g;
            sol[k][s] = f.component(k).coeffs()[s] - g;
        }
    }
    let wrap = |tables: Vec<Vec<Complex64>>, div_free: bool| {
        SpectralVectorField::from_components_unchecked(
            tables
                .into_iter()
                .map(|c| SpectralScalarField::from_raw(&lat, c, true))
                .collect(),
            true,
            div_free,
        )
    };
    Ok((wrap(grad, false), wrap(sol, true)))
}

/// Leray projector `P_sigma`.
pub fn leray_project(f: &SpectralVectorField) -> Result<SpectralVectorField> {
    Ok(helmholtz_decompose(f)?.1)
}

/// Gradient projector `P_g = I - P_sigma`.
pub fn gradient_project(f: &SpectralVectorField) -> Result<SpectralVectorField> {
    Ok(helmholtz_decompose(f)?.0)
}

/// Zero-mean `q` with `grad q = w`, using the default curl-free tolerance.
pub fn invert_gradient(w: &SpectralVectorField) -> Result<SpectralScalarField> {
    invert_gradient_tol(w, CURL_FREE_TOL)
}

pub fn invert_gradient_tol(w: &SpectralVectorField, tol: f64) -> Result<SpectralScalarField> {
    check_zero_mean(w)?;
    let lat = w.lattice().clone();
    let n = lat.dim();
    let z = lat.zero_slot();
    let scale = w.max_abs();
    let mut coeffs = vec![zero(); lat.len()];
    let mut worst = (0.0, z);
    for s in lat.present_slots() {
        if s == z {
            continue;
        }
        let xi = lat.mode(s);
        let q = lat.norm_sq(s) as f64;
        let dot: Complex64 = (0..n).map(|k| w.component(k).coeffs()[s] * xi[k] as f64).sum();
        let off: f64 = (0..n)
            .map(|k| (w.component(k).coeffs()[s] - dot * (xi[k] as f64 / q)).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off > worst.0 {
            worst = (off, s);
        }
        coeffs[s] = dot / Complex64::new(0.0, TAU * q);
    }
    if scale > 0.0 && worst.0 > tol * scale {
        return Err(Error::NotGradient {
            mode: lat.mode(worst.1).to_vec(),
            residual: worst.0 / scale,
        });
    }
    Ok(SpectralScalarField::from_raw(&lat, coeffs, true))
}

/// Gradient field `w = grad q` with `div w = g`, `q_hat = -g_hat / (4 pi^2 |xi|^2)`.
pub fn invert_divergence(g: &SpectralScalarField) -> Result<SpectralVectorField> {
    let mean = g.mean().abs();
    if mean > MEAN_TOL * g.max_abs() {
        return Err(Error::NonzeroMean { mean });
    }
    let lat = g.lattice().clone();
    let z = lat.zero_slot();
    let q = g.map_coeffs(|s, c| {
        if s == z {
            zero()
        } else {
            -c / (TAU * TAU * lat.norm_sq(s) as f64)
        }
    });
    Ok(gradient(&q))
}

/// Symmetric `n x n` tensor of scalar fields; only the upper triangle is stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricTensorField {
    n: usize,
    entries: Vec<SpectralScalarField>,
}

impl SymmetricTensorField {
    fn index(n: usize, i: usize, j: usize) -> usize {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        a * n - a * (a + 1) / 2 + b
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &SpectralScalarField {
        &self.entries[Self::index(self.n, i, j)]
    }

    pub fn trace(&self) -> SpectralScalarField {
        let mut t = self.get(0, 0).clone();
        for i in 1..self.n {
            t = t.add(self.get(i, i)).expect("shared lattice");
        }
        t
    }

    /// `sum_{i,j} ||E_ij||^2_{H^s}` over the full matrix.
    pub fn frobenius_norm_sq(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                acc += crate::spectral::sobolev_norm_sq(self.get(i, j), s);
            }
        }
        acc
    }
}

/// `E_{j b}(u) = (d_j u_b + d_b u_j) / 2`.
pub fn strain(u: &SpectralVectorField) -> SymmetricTensorField {
    let n = u.dim();
    let mut entries = Vec::with_capacity(n * (n + 1) / 2);
    for j in 0..n {
        for b in j..n {
            let e = partial(u.component(b), j)
                .add(&partial(u.component(j), b))
                .expect("shared lattice")
                .scaled(0.5);
            entries.push(e);
        }
    }
    SymmetricTensorField { n, entries }
}

/// `(v1 . grad) v2` on a physical grid sized by `mode`, truncated to the lattice.
pub fn advect(v1: &SpectralVectorField, v2: &SpectralVectorField, mode: DealiasMode) -> Result<SpectralVectorField> {
    let m = v2.lattice().radius();
    advect_on_grid(v1, v2, mode.points(2 * m, m))
}

pub fn convect(u: &SpectralVectorField, mode: DealiasMode) -> Result<SpectralVectorField> {
    advect(u, u, mode)
}

/// [`advect`] on an explicit grid with `points` samples per axis.
pub fn advect_on_grid(v1: &SpectralVectorField, v2: &SpectralVectorField, points: usize) -> Result<SpectralVectorField> {
    ensure_same_lattice(v1.lattice(), v2.lattice())?;
    let lat = v2.lattice().clone();
    let n = lat.dim();
    let needed = lat.side();
    if points < needed {
        return Err(Error::Aliasing {
            points,
            radius: lat.radius(),
            needed,
        });
    }
    let a: Vec<Vec<f64>> = v1
        .components()
        .iter()
        .map(|c| coeffs_to_samples(&lat, c.coeffs(), points))
        .collect();
    let mut comps = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = vec![0.0; a[0].len()];
        for (j, aj) in a.iter().enumerate() {
            let d = coeffs_to_samples(&lat, partial(v2.component(k), j).coeffs(), points);
            for ((o, x), y) in acc.iter_mut().zip(aj).zip(&d) {
                *o += x * y;
            }
        }
        let coeffs = samples_to_coeffs(&acc, points, &lat);
        comps.push(SpectralScalarField::from_raw(&lat, coeffs, false));
    }
    Ok(SpectralVectorField::from_components_unchecked(comps, false, false))
}

/// Direct convolution of `v1_j` with `d_j v2_k` over all lattice pairs.
pub fn advect_oracle(v1: &SpectralVectorField, v2: &SpectralVectorField) -> Result<SpectralVectorField> {
    ensure_same_lattice(v1.lattice(), v2.lattice())?;
    let lat: FrequencyLattice = v2.lattice().clone();
    let n = lat.dim();
    let present: Vec<usize> = lat.present_slots().collect();
    let mut diff = vec![0i32; n];
    let mut comps = Vec::with_capacity(n);
    for k in 0..n {
        let mut out = vec![zero(); lat.len()];
        for &s in &present {
            let xi = lat.mode(s);
            let mut acc = zero();
            for &t in &present {
                let eta = lat.mode(t);
                for d in 0..n {
                    diff[d] = xi[d] - eta[d];
                }
                let Some(r) = lat.present_slot(&diff) else {
                    continue;
                };
                let b = v2.component(k).coeffs()[t];
                for j in 0..n {
                    acc += v1.component(j).coeffs()[r] * b * Complex64::new(0.0, TAU * eta[j] as f64);
                }
            }
            out[s] = acc;
        }
        comps.push(SpectralScalarField::from_raw(&lat, out, false));
    }
    Ok(SpectralVectorField::from_components_unchecked(comps, false, false))
}

pub fn convect_oracle(u: &SpectralVectorField) -> Result<SpectralVectorField> {
    advect_oracle(u, u)
}
