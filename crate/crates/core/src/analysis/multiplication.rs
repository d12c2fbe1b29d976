//! Empirical lower bounds for the pointwise multiplication constant `C_*(s1, s2, n)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::{nice_size, sobolev_norm, to_physical, to_spectral, FrequencyLattice, PhysicalGrid, SpectralScalarField};

/// Sobolev index of the product: `s1` if `s2 > n/2`, `s1 + s2 - n/2` if `s2 < n/2`.
pub fn product_index(s1: f64, s2: f64, n: usize) -> Result<f64> {
    let half = 0.5 * n as f64;
    if s1 > s2 {
        return Err(Error::InvalidArgument(format!("need s1 <= s2, got s1={s1}, s2={s2}")));
    }
    if s1 + s2 <= 0.0 {
        return Err(Error::InvalidArgument(format!("need s1 + s2 > 0, got {}", s1 + s2)));
    }
    if s2 > half {
        Ok(s1)
    } else if s2 < half {
        Ok(s1 + s2 - half)
    } else {
        Err(Error::InvalidArgument(format!("s2 = n/2 = {half} is covered by neither case")))
    }
}

/// Exact product of two band-limited fields on the lattice of radius `m1 + m2`.
pub fn pointwise_product(f1: &SpectralScalarField, f2: &SpectralScalarField) -> Result<SpectralScalarField> {
    let n = f1.lattice().dim();
    if f2.lattice().dim() != n {
        return Err(Error::LatticeMismatch {
            left: f1.lattice().to_string(),
            right: f2.lattice().to_string(),
        });
    }
    let m_out = f1.lattice().radius() + f2.lattice().radius();
    let points = nice_size(2 * m_out + 1);
    let a = to_physical(f1, points)?;
    let b = to_physical(f2, points)?;
    let prod: Vec<f64> = a.samples().iter().zip(b.samples()).map(|(x, y)| x * y).collect();
    to_spectral(&PhysicalGrid::new(n, points, prod)?, m_out)
}

/// `||f1 f2||_{target} / (||f1||_{H^{s1}} ||f2||_{H^{s2}})`.
pub fn multiplication_ratio(f1: &SpectralScalarField, f2: &SpectralScalarField, s1: f64, s2: f64) -> Result<f64> {
    let n = f1.lattice().dim();
    let target = product_index(s1, s2, n)?;
    let denom = sobolev_norm(f1, s1) * sobolev_norm(f2, s2);
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(sobolev_norm(&pointwise_product(f1, f2)?, target) / denom)
}

/// Running maximum of [`multiplication_ratio`] over `trials` seeded random pairs on the radius-`m` lattice.
pub fn estimate_multiplication_constant(s1: f64, s2: f64, n: usize, m: usize, trials: usize, seed: u64) -> Result<f64> {
    product_index(s1, s2, n)?;
    let lat = FrequencyLattice::new(n, m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for _ in 0..trials {
        let d1 = rng.gen_range(0.0..3.0);
        let d2 = rng.gen_range(0.0..3.0);
        let f1 = SpectralScalarField::random(&lat, &mut rng, d1, false);
        let f2 = SpectralScalarField::random(&lat, &mut rng, d2, false);
        best = best.max(multiplication_ratio(&f1, &f2, s1, s2)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn constants_give_closed_form() {
        let lat = FrequencyLattice::new(2, 2);
        let one = SpectralScalarField::constant(&lat, 1.0);
        let r = multiplication_ratio(&one, &one, 0.5, 1.5).unwrap();
        assert!((r - TAU.powf(-1.5)).abs() < 1e-14);
    }

    #[test]
    fn parameter_region() {
        assert!(product_index(1.0, 0.5, 2).is_err());
        assert!(product_index(-1.0, 0.5, 2).is_err());
        assert!(product_index(0.5, 1.0, 2).is_err());
        assert_eq!(product_index(0.5, 0.75, 2).unwrap(), 0.25);
        assert_eq!(estimate_multiplication_constant(0.5, 2.0, 2, 2, 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn monotone_in_trials() {
        let a = estimate_multiplication_constant(0.5, 2.0, 2, 2, 5, 3).unwrap();
        let b = estimate_multiplication_constant(0.5, 2.0, 2, 2, 10, 3).unwrap();
        assert!(b >= a && a > 0.0);
    }
}
