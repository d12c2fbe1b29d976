use rand::Rng;
use rustfft::num_complex::Complex64;

use super::lattice::FrequencyLattice;
use crate::error::{Error, Result};

/// Relative tolerance for the Hermitian-symmetry check at construction.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Fourier coefficients of a real scalar field on the unit torus,
/// `g(x) = sum_xi g_hat(xi) exp(2 pi i x.xi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralScalarField {
    lattice: FrequencyLattice,
    coeffs: Vec<Complex64>,
    zero_mean: bool,
}

impl SpectralScalarField {
    pub fn zeros(lattice: &FrequencyLattice) -> Self {
        Self {
            lattice: lattice.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); lattice.len()],
            zero_mean: true,
        }
    }

    /// Validating constructor: checks length, absent slots and Hermitian symmetry.
    pub fn from_coeffs(lattice: &FrequencyLattice, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != lattice.len() {
            return Err(Error::CoefficientCount {
                expected: lattice.len(),
                got: coeffs.len(),
            });
        }
        for (s, c) in coeffs.iter().enumerate() {
            if !lattice.is_present(s) && c.norm() != 0.0 {
                return Err(Error::OutsideBall {
                    mode: lattice.mode(s).to_vec(),
                });
            }
        }
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for s in 0..coeffs.len() {
            let defect = (coeffs[s] - coeffs[lattice.negate(s)].conj()).norm();
            if defect > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::NotHermitian {
                    mode: lattice.mode(s).to_vec(),
                    defect,
                });
            }
        }
        let zero_mean = coeffs[lattice.zero_slot()].norm() == 0.0;
        Ok(Self {
            lattice: lattice.clone(),
            coeffs,
            zero_mean,
        })
    }

    /// Internal constructor for coefficient tables that are Hermitian by construction.
    pub(crate) fn from_raw(lattice: &FrequencyLattice, coeffs: Vec<Complex64>, zero_mean: bool) -> Self {
        debug_assert_eq!(coeffs.len(), lattice.len());
        Self {
            lattice: lattice.clone(),
            coeffs,
            zero_mean,
        }
    }

    /// Sets `g_hat(xi) = c` and `g_hat(-xi) = conj(c)` on a zero field; `xi = 0` keeps only `Re c`.
    pub fn from_modes(lattice: &FrequencyLattice, terms: &[(&[i32], Complex64)]) -> Result<Self> {
        let mut g = Self::zeros(lattice);
        for (xi, c) in terms {
            g.add_mode(xi, *c)?;
        }
        Ok(g)
    }

    pub fn constant(lattice: &FrequencyLattice, value: f64) -> Self {
        let mut g = Self::zeros(lattice);
        g.coeffs[lattice.zero_slot()] = Complex64::new(value, 0.0);
        g.zero_mean = value == 0.0;
        g
    }

    /// `amp * cos(2 pi xi.x)`.
    pub fn cos_mode(lattice: &FrequencyLattice, xi: &[i32], amp: f64) -> Result<Self> {
        Self::from_modes(lattice, &[(xi, Complex64::new(0.5 * amp, 0.0))])
    }

    /// `amp * sin(2 pi xi.x)`.
    pub fn sin_mode(lattice: &FrequencyLattice, xi: &[i32], amp: f64) -> Result<Self> {
        Self::from_modes(lattice, &[(xi, Complex64::new(0.0, -0.5 * amp))])
    }

    /// Random real field with amplitudes decaying like `(1 + |xi|^2)^(-decay/2)`.
    pub fn random<R: Rng + ?Sized>(lattice: &FrequencyLattice, rng: &mut R, decay: f64, zero_mean: bool) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); lattice.len()];
        let zero = lattice.zero_slot();
        for s in lattice.present_slots() {
            if s > zero {
                continue;
            }
            let w = (1.0 + lattice.norm_sq(s) as f64).powf(-0.5 * decay);
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * w;
            if s == zero {
                if !zero_mean {
                    coeffs[s] = Complex64::new(c.re, 0.0);
                }
            } else {
                coeffs[s] = c;
                coeffs[lattice.negate(s)] = c.conj();
            }
        }
        let zm = coeffs[zero].norm() == 0.0;
        Self::from_raw(lattice, coeffs, zm)
    }

    fn add_mode(&mut self, xi: &[i32], c: Complex64) -> Result<()> {
        let s = self.lattice.present_slot(xi).ok_or_else(|| {
            Error::InvalidArgument(format!("mode {xi:?} is not on lattice {}", self.lattice))
        })?;
        let neg = self.lattice.negate(s);
        if s == neg {
            self.coeffs[s] += Complex64::new(c.re, 0.0);
        } else {
            self.coeffs[s] += c;
            self.coeffs[neg] += c.conj();
        }
        self.zero_mean = self.coeffs[self.lattice.zero_slot()].norm() == 0.0;
        Ok(())
    }

    pub fn lattice(&self) -> &FrequencyLattice {
        &self.lattice
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at `xi`; zero if `xi` is not stored.
    pub fn coeff(&self, xi: &[i32]) -> Complex64 {
        self.lattice
            .slot_of(xi)
            .map(|s| self.coeffs[s])
            .unwrap_or_default()
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[self.lattice.zero_slot()].re
    }

    pub fn is_zero_mean(&self) -> bool {
        self.zero_mean
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Point evaluation by direct Fourier summation.
    pub fn eval_at(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for s in self.lattice.present_slots() {
            let c = self.coeffs[s];
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let phase: f64 = self
                .lattice
                .mode(s)
                .iter()
                .zip(x)
                .map(|(&k, &xi)| k as f64 * xi)
                .sum::<f64>()
                * std::f64::consts::TAU;
            acc += c.re * phase.cos() - c.im * phase.sin();
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        ensure_same_lattice(&self.lattice, &other.lattice)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self::from_raw(&self.lattice, coeffs, self.zero_mean && other.zero_mean))
    }

    pub fn scaled(&self, a: f64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * a).collect();
        Self::from_raw(&self.lattice, coeffs, self.zero_mean)
    }
}

/// Real `n`-component vector field sharing one lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralVectorField {
    components: Vec<SpectralScalarField>,
    zero_mean: bool,
    divergence_free: bool,
}

impl SpectralVectorField {
    pub fn new(components: Vec<SpectralScalarField>) -> Result<Self> {
        let lattice = components
            .first()
            .map(|c| c.lattice().clone())
            .ok_or(Error::ComponentCount { expected: 1, got: 0 })?;
        if components.len() != lattice.dim() {
            return Err(Error::ComponentCount {
                expected: lattice.dim(),
                got: components.len(),
            });
        }
        for c in &components[1..] {
            ensure_same_lattice(&lattice, c.lattice())?;
        }
        let zero_mean = components.iter().all(|c| c.is_zero_mean());
        Ok(Self {
            components,
            zero_mean,
            divergence_free: false,
        })
    }

    pub fn zeros(lattice: &FrequencyLattice) -> Self {
        Self {
            components: (0..lattice.dim()).map(|_| SpectralScalarField::zeros(lattice)).collect(),
            zero_mean: true,
            divergence_free: true,
        }
    }

    pub(crate) fn from_components_unchecked(components: Vec<SpectralScalarField>, zero_mean: bool, divergence_free: bool) -> Self {
        Self {
            components,
            zero_mean,
            divergence_free,
        }
    }

    pub fn lattice(&self) -> &FrequencyLattice {
        self.components[0].lattice()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, k: usize) -> &SpectralScalarField {
        &self.components[k]
    }

    pub fn components(&self) -> &[SpectralScalarField] {
        &self.components
    }

    pub fn into_components(self) -> Vec<SpectralScalarField> {
        self.components
    }

    pub fn is_zero_mean(&self) -> bool {
        self.zero_mean
    }

    /// Advisory flag; see [`crate::calculus::divergence_residual`] for the actual check.
    pub fn is_divergence_free(&self) -> bool {
        self.divergence_free
    }

    /// Re-checks `xi . u_hat(xi) = 0` for every mode (relative to the largest coefficient)
    /// and sets the flag accordingly.
    pub fn recheck_divergence_free(&mut self, tol: f64) -> bool {
        let lat = self.lattice().clone();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let ok = (0..lat.len()).all(|s| {
            let xi = lat.mode(s);
            let dot: Complex64 = self
                .components
                .iter()
                .zip(xi)
                .map(|(c, &k)| c.coeffs()[s] * k as f64)
                .sum();
            dot.norm() <= tol * scale
        });
        self.divergence_free = ok;
        self.zero_mean = self.components.iter().all(|c| c.coeffs()[lat.zero_slot()].norm() == 0.0);
        ok
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    pub fn has_non_finite(&self) -> bool {
        self.components
            .iter()
            .any(|c| c.coeffs().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_components_unchecked(
            comps,
            self.zero_mean && other.zero_mean,
            self.divergence_free && other.divergence_free,
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self::from_components_unchecked(
            self.components.iter().map(|c| c.scaled(a)).collect(),
            self.zero_mean,
            self.divergence_free,
        )
    }

    /// `self += a * x` in place; lattices must agree.
    pub fn axpy(&mut self, a: f64, x: &Self) {
        debug_assert_eq!(self.lattice(), x.lattice());
        for (c, xc) in self.components.iter_mut().zip(&x.components) {
            for (z, w) in c.coeffs_mut().iter_mut().zip(xc.coeffs()) {
                *z += w * a;
            }
        }
        self.zero_mean &= x.zero_mean;
        self.divergence_free &= x.divergence_free;
    }
}

pub(crate) fn ensure_same_lattice(a: &FrequencyLattice, b: &FrequencyLattice) -> Result<()> {
    if a != b {
        return Err(Error::LatticeMismatch {
            left: a.to_string(),
            right: b.to_string(),
        });
    }
    Ok(())
}

/// Common view over scalar and vector spectral fields: a list of coefficient
/// channels on one lattice.
pub trait Spectral: Clone {
    fn lattice(&self) -> &FrequencyLattice;
    fn channels(&self) -> Vec<&[Complex64]>;
    /// Applies `f(slot, coefficient)` to every coefficient of every channel; flags are kept.
    fn map_coeffs<F: Fn(usize, Complex64) -> Complex64>(&self, f: F) -> Self;
    fn mark_zero_mean(&mut self);
}

impl Spectral for SpectralScalarField {
    fn lattice(&self) -> &FrequencyLattice {
        &self.lattice
    }

    fn channels(&self) -> Vec<&[Complex64]> {
        vec![&self.coeffs]
    }

    fn map_coeffs<F: Fn(usize, Complex64) -> Complex64>(&self, f: F) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(s, &c)| f(s, c)).collect();
        Self::from_raw(&self.lattice, coeffs, self.zero_mean)
    }

    fn mark_zero_mean(&mut self) {
        self.zero_mean = true;
    }
}

impl Spectral for SpectralVectorField {
    fn lattice(&self) -> &FrequencyLattice {
        self.components[0].lattice()
    }

    fn channels(&self) -> Vec<&[Complex64]> {
        self.components.iter().map(|c| c.coeffs()).collect()
    }

    fn map_coeffs<F: Fn(usize, Complex64) -> Complex64>(&self, f: F) -> Self {
        Self::from_components_unchecked(
            self.components.iter().map(|c| c.map_coeffs(&f)).collect(),
            self.zero_mean,
            self.divergence_free,
        )
    }

    fn mark_zero_mean(&mut self) {
        self.zero_mean = true;
        for c in &mut self.components {
            c.mark_zero_mean();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_non_hermitian_tables() {
        let lat = FrequencyLattice::new(2, 1);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); lat.len()];
        coeffs[lat.slot_of(&[1, 0]).unwrap()] = Complex64::new(1.0, 0.0);
        let err = SpectralScalarField::from_coeffs(&lat, coeffs).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { .. }));
    }

    #[test]
    fn rejects_out_of_ball_entries() {
        let lat = FrequencyLattice::new(2, 1);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); lat.len()];
        coeffs[lat.slot_of(&[1, 1]).unwrap()] = Complex64::new(1.0, 0.0);
        coeffs[lat.slot_of(&[-1, -1]).unwrap()] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            SpectralScalarField::from_coeffs(&lat, coeffs),
            Err(Error::OutsideBall { .. })
        ));
    }

    #[test]
    fn random_field_is_hermitian() {
        let lat = FrequencyLattice::new(3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = SpectralScalarField::random(&lat, &mut rng, 1.0, true);
        let again = SpectralScalarField::from_coeffs(&lat, g.coeffs().to_vec()).unwrap();
        assert!(again.is_zero_mean());
    }

    #[test]
    fn point_evaluation_of_sine() {
        let lat = FrequencyLattice::new(2, 2);
        let g = SpectralScalarField::sin_mode(&lat, &[1, 0], 2.0).unwrap();
        let v = g.eval_at(&[0.125, 0.3]);
        assert!((v - 2.0 * (std::f64::consts::TAU * 0.125).sin()).abs() < 1e-14);
    }
}
