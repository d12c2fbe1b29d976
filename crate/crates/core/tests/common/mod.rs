#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tns_core::spectral::{FrequencyLattice, SpectralScalarField, SpectralVectorField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn scalar(n: usize, m: usize, seed: u64, zero_mean: bool) -> SpectralScalarField {
    SpectralScalarField::random(&FrequencyLattice::new(n, m), &mut rng(seed), 1.0, zero_mean)
}

pub fn vector(n: usize, m: usize, seed: u64, zero_mean: bool) -> SpectralVectorField {
    let lat = FrequencyLattice::new(n, m);
    let mut r = rng(seed);
    let comps = (0..n).map(|_| SpectralScalarField::random(&lat, &mut r, 1.0, zero_mean)).collect();
    SpectralVectorField::new(comps).unwrap()
}

/// Sum of `|c|^2 (2 pi)^{2s} (1 + |xi|^2)^s` written out mode by mode.
pub fn norm_sq_direct(g: &SpectralScalarField, s: f64) -> f64 {
    let lat = g.lattice();
    lat.present_slots()
        .map(|slot| {
            let q: i64 = lat.mode(slot).iter().map(|&c| (c * c) as i64).sum();
            let w = (2.0 * std::f64::consts::PI).powf(2.0 * s) * (1.0 + q as f64).powf(s);
            w * g.coeffs()[slot].norm_sqr()
        })
        .sum()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn vec_diff_l2(a: &SpectralVectorField, b: &SpectralVectorField) -> f64 {
    tns_core::spectral::sobolev_norm(&a.sub(b).unwrap(), 0.0)
}
