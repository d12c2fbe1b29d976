//! Periodic Fourier calculus on the unit torus.

mod field;
mod lattice;
mod transform;

pub use field::{Spectral, SpectralScalarField, SpectralVectorField, HERMITIAN_TOL};
pub use lattice::{FrequencyLattice, TruncationShape};
pub use transform::{nice_size, to_physical, to_physical_forced, to_spectral, PhysicalGrid};

pub(crate) use field::ensure_same_lattice;
pub(crate) use transform::{coeffs_to_samples, samples_to_coeffs};

use std::f64::consts::TAU;

pub use rustfft::num_complex::Complex64;

/// `rho(xi) = 2 pi (1 + |xi|^2)^(1/2)`.
pub fn rho(xi: &[i32]) -> f64 {
    rho_from_norm_sq(xi.iter().map(|&c| (c as i64) * (c as i64)).sum())
}

#[inline]
pub fn rho_from_norm_sq(q: i64) -> f64 {
    TAU * (1.0 + q as f64).sqrt()
}

/// `rho(xi)^p` for every slot of the lattice.
pub fn rho_powers(lattice: &FrequencyLattice, p: f64) -> Vec<f64> {
    (0..lattice.len())
        .map(|s| rho_from_norm_sq(lattice.norm_sq(s)).powf(p))
        .collect()
}

/// `(sum_xi rho^{2s} |g_hat|^2)^(1/2)`, summed over components for vector fields.
pub fn sobolev_norm<F: Spectral>(g: &F, s: f64) -> f64 {
    sobolev_norm_sq(g, s).sqrt()
}

pub fn sobolev_norm_sq<F: Spectral>(g: &F, s: f64) -> f64 {
    let w = rho_powers(g.lattice(), 2.0 * s);
    g.channels()
        .iter()
        .map(|ch| ch.iter().zip(&w).map(|(c, w)| w * c.norm_sqr()).sum::<f64>())
        .sum()
}

/// Seminorm: the Sobolev norm with the `xi = 0` term left out.
pub fn sobolev_seminorm<F: Spectral>(g: &F, s: f64) -> f64 {
    let z = g.lattice().zero_slot();
    let w = rho_powers(g.lattice(), 2.0 * s);
    g.channels()
        .iter()
        .map(|ch| {
            ch.iter()
                .zip(&w)
                .enumerate()
                .filter(|(i, _)| *i != z)
                .map(|(_, (c, w))| w * c.norm_sqr())
                .sum::<f64>()
        })
        .sum::<f64>()
        .sqrt()
}

/// `H^s` inner product `sum rho^{2s} g_hat conj(f_hat)` (real for real fields).
pub fn sobolev_inner<F: Spectral>(g: &F, f: &F, s: f64) -> f64 {
    let w = rho_powers(g.lattice(), 2.0 * s);
    g.channels()
        .iter()
        .zip(f.channels())
        .map(|(a, b)| {
            a.iter()
                .zip(b)
                .zip(&w)
                .map(|((x, y), w)| w * (x * y.conj()).re)
                .sum::<f64>()
        })
        .sum()
}

/// Multiplies every coefficient by `rho(xi)^r`.
pub fn bessel_potential<F: Spectral>(g: &F, r: f64) -> F {
    let w = rho_powers(g.lattice(), r);
    g.map_coeffs(|s, c| c * w[s])
}

/// `sum_xi g_hat(xi) f_hat(-xi)`, summed over components. Fields on lattices of
/// different radius are compared on the common modes.
pub fn dual_pairing<F: Spectral>(g: &F, f: &F) -> f64 {
    let (lg, lf) = (g.lattice(), f.lattice());
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in g.channels().iter().zip(f.channels()) {
        if lg == lf {
            for s in lg.present_slots() {
                acc += a[s] * b[lg.negate(s)];
            }
        } else {
            for s in lg.present_slots() {
                let neg: Vec<i32> = lg.mode(s).iter().map(|c| -c).collect();
                if let Some(t) = lf.present_slot(&neg) {
                    acc += a[s] * b[t];
                }
            }
        }
    }
    acc.re
}

/// Zeroes all coefficients with `|xi| > m`.
pub fn truncate_modes<F: Spectral>(g: &F, m: usize) -> F {
    let lat = g.lattice().clone();
    let cut = (m * m) as i64;
    g.map_coeffs(|s, c| if lat.norm_sq(s) <= cut { c } else { Complex64::new(0.0, 0.0) })
}

/// Sets the mean to zero and marks the field zero-mean.
pub fn project_zero_mean<F: Spectral>(g: &F) -> F {
    let z = g.lattice().zero_slot();
    let mut out = g.map_coeffs(|s, c| if s == z { Complex64::new(0.0, 0.0) } else { c });
    out.mark_zero_mean();
    out
}

/// Re-expresses `g` on a lattice of radius `m` (padding with zeros or dropping modes).
pub fn resize_scalar(g: &SpectralScalarField, m: usize) -> SpectralScalarField {
    let src = g.lattice();
    let dst = FrequencyLattice::with_shape(src.dim(), m, src.shape());
    let mut coeffs = vec![Complex64::new(0.0, 0.0); dst.len()];
    for s in dst.present_slots() {
        if let Some(t) = src.present_slot(dst.mode(s)) {
            coeffs[s] = g.coeffs()[t];
        }
    }
    SpectralScalarField::from_raw(&dst, coeffs, g.is_zero_mean())
}

pub fn resize_vector(u: &SpectralVectorField, m: usize) -> SpectralVectorField {
    SpectralVectorField::from_components_unchecked(
        u.components().iter().map(|c| resize_scalar(c, m)).collect(),
        u.is_zero_mean(),
        u.is_divergence_free(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rho_values() {
        assert!((rho(&[0, 0]) - 6.283185307).abs() < 1e-9);
        assert!((rho(&[1, 0]) - 8.885765876).abs() < 1e-9);
        assert!((rho(&[1, 1, 1]) - 12.56637061).abs() < 1e-8);
    }

    #[test]
    fn norms_of_elementary_fields() {
        let lat = FrequencyLattice::new(2, 2);
        let one = SpectralScalarField::constant(&lat, 1.0);
        for s in [-1.0, 0.0, 0.5, 2.0] {
            assert!((sobolev_norm(&one, s) - TAU.powf(s)).abs() < 1e-12 * TAU.powf(s));
        }
        let sine = SpectralScalarField::sin_mode(&lat, &[1, 0], 1.0).unwrap();
        assert!((sobolev_norm(&sine, 0.0) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((dual_pairing(&sine, &sine) - 0.5).abs() < 1e-15);
        assert!((bessel_potential(&one, 1.0).mean() - TAU).abs() < 1e-14);
    }

    #[test]
    fn truncation_and_mean_projection() {
        let lat = FrequencyLattice::new(2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = SpectralScalarField::random(&lat, &mut rng, 0.0, false);
        let t0 = truncate_modes(&g, 0);
        assert_eq!(t0.mean(), g.mean());
        assert_eq!(sobolev_seminorm(&t0, 0.0), 0.0);
        let t1 = truncate_modes(&g, 2);
        assert_eq!(truncate_modes(&t1, 2), t1);
        assert_eq!(truncate_modes(&g, 3), g);
        let p = project_zero_mean(&g);
        assert!(p.is_zero_mean());
        assert_eq!(project_zero_mean(&p), p);
    }

    #[test]
    fn pairing_embeds_smaller_lattice() {
        let small = FrequencyLattice::new(2, 1);
        let big = FrequencyLattice::new(2, 3);
        let a = SpectralScalarField::cos_mode(&small, &[1, 0], 1.0).unwrap();
        let b = SpectralScalarField::cos_mode(&big, &[1, 0], 2.0).unwrap();
        assert!((dual_pairing(&a, &b) - 1.0).abs() < 1e-15);
        assert_eq!(resize_scalar(&a, 3), SpectralScalarField::cos_mode(&big, &[1, 0], 1.0).unwrap());
    }
}
