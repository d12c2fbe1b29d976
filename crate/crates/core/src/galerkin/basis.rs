use std::f64::consts::SQRT_2;

use rustfft::num_complex::Complex64;

use crate::spectral::{rho, FrequencyLattice, SpectralScalarField, SpectralVectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    Cos,
    Sin,
}

/// `w = sqrt(2) p cos(2 pi xi.x)` or `sqrt(2) p sin(2 pi xi.x)` with `p . xi = 0`, `|p| = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisMode {
    pub xi: Vec<i32>,
    pub polarization: Vec<f64>,
    pub polarization_index: usize,
    pub phase: Phase,
    /// `rho(xi)`, the eigenvalue of `Lambda`.
    pub eigenvalue: f64,
}

/// Orthonormal real divergence-free trigonometric basis of the truncated solenoidal space.
#[derive(Clone, Debug)]
pub struct GalerkinBasis {
    lattice: FrequencyLattice,
    modes: Vec<BasisMode>,
}

/// Representative of `{xi, -xi}`: first nonzero coordinate positive.
fn is_representative(xi: &[i32]) -> bool {
    xi.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

/// `n - 1` orthonormal vectors spanning `xi^perp` (Gram-Schmidt on `e_1, .., e_n`).
pub fn polarizations(xi: &[i32]) -> Vec<Vec<f64>> {
    let n = xi.len();
    let q: f64 = xi.iter().map(|&c| (c * c) as f64).sum();
    let mut basis: Vec<Vec<f64>> = vec![xi.iter().map(|&c| c as f64 / q.sqrt()).collect()];
    for e in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[e] = 1.0;
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= d * y;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    basis.split_off(1)
}

impl GalerkinBasis {
    pub fn new(n: usize, m: usize) -> Self {
        assert!(n >= 2 && m >= 1, "basis needs n >= 2 and m >= 1");
        let lattice = FrequencyLattice::new(n, m);
        let mut reps: Vec<usize> = lattice
            .present_slots()
            .filter(|&s| is_representative(lattice.mode(s)))
            .collect();
        reps.sort_by(|&a, &b| {
            lattice
                .norm_sq(a)
                .cmp(&lattice.norm_sq(b))
                .then_with(|| lattice.mode(a).cmp(lattice.mode(b)))
        });
        let mut modes = Vec::with_capacity(2 * (n - 1) * reps.len());
        for s in reps {
            let xi = lattice.mode(s).to_vec();
            let eigenvalue = rho(&xi);
            for (pi, p) in polarizations(&xi).into_iter().enumerate() {
                for phase in [Phase::Cos, Phase::Sin] {
                    modes.push(BasisMode {
                        xi: xi.clone(),
                        polarization: p.clone(),
                        polarization_index: pi,
                        phase,
                        eigenvalue,
                    });
                }
            }
        }
        Self { lattice, modes }
    }

    pub fn lattice(&self) -> &FrequencyLattice {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[BasisMode] {
        &self.modes
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.modes.iter().map(|w| w.eigenvalue).collect()
    }

    /// Coefficient of `w` at `+xi` (the one at `-xi` is its conjugate).
    fn amplitude(w: &BasisMode) -> Complex64 {
        match w.phase {
            Phase::Cos => Complex64::new(1.0 / SQRT_2, 0.0),
            Phase::Sin => Complex64::new(0.0, -1.0 / SQRT_2),
        }
    }

    /// The basis function as a spectral field.
    pub fn field(&self, l: usize) -> SpectralVectorField {
        self.from_coordinates_sparse(&[(l, 1.0)])
    }

    fn from_coordinates_sparse(&self, terms: &[(usize, f64)]) -> SpectralVectorField {
        let lat = &self.lattice;
        let n = lat.dim();
        let mut tables = vec![vec![Complex64::new(0.0, 0.0); lat.len()]; n];
        for &(l, eta) in terms {
            let w = &self.modes[l];
            let s = lat.slot_of(&w.xi).expect("basis mode on lattice");
            let neg = lat.negate(s);
            let c = Self::amplitude(w) * eta;
            for k in 0..n {
                tables[k][s] += c * w.polarization[k];
                tables[k][neg] += c.conj() * w.polarization[k];
            }
        }
        SpectralVectorField::from_components_unchecked(
            tables
                .into_iter()
                .map(|t| SpectralScalarField::from_raw(lat, t, true))
                .collect(),
            true,
            true,
        )
    }

    /// `u = sum eta_l w_l`.
    pub fn from_coordinates(&self, eta: &[f64]) -> SpectralVectorField {
        let terms: Vec<(usize, f64)> = eta.iter().cloned().enumerate().collect();
        self.from_coordinates_sparse(&terms)
    }

    /// `eta_l = <u, w_l>`.
    pub fn coordinates(&self, u: &SpectralVectorField) -> Vec<f64> {
        let lat = u.lattice();
        self.modes
            .iter()
            .map(|w| {
                let Some(s) = lat.present_slot(&w.xi) else {
                    return 0.0;
                };
                let z: Complex64 = (0..lat.dim())
                    .map(|k| u.component(k).coeffs()[s] * w.polarization[k])
                    .sum();
                match w.phase {
                    Phase::Cos => SQRT_2 * z.re,
                    Phase::Sin => -SQRT_2 * z.im,
                }
            })
            .collect()
    }

    /// Matrix of `(w_j, w_k)_{L2}` computed from the fields.
    pub fn gram_matrix(&self) -> Vec<Vec<f64>> {
        let fields: Vec<SpectralVectorField> = (0..self.len()).map(|l| self.field(l)).collect();
        fields
            .iter()
            .map(|a| fields.iter().map(|b| crate::spectral::dual_pairing(a, b)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::divergence;
    use crate::spectral::{bessel_potential, Spectral};

    #[test]
    fn counts() {
        assert_eq!(GalerkinBasis::new(2, 1).len(), 4);
        for (n, m) in [(2, 3), (3, 2)] {
            let b = GalerkinBasis::new(n, m);
            assert_eq!(b.len(), (n - 1) * b.lattice().nonzero_mode_count());
        }
    }

    #[test]
    fn orthonormal_solenoidal_eigenfunctions() {
        let b = GalerkinBasis::new(3, 2);
        let g = b.gram_matrix();
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((v - expect).abs() < 1e-12);
            }
        }
        for l in 0..b.len() {
            let w = b.field(l);
            assert!(divergence(&w).max_abs() < 1e-14);
            let lw = bessel_potential(&w, 1.0);
            let ev = b.modes()[l].eigenvalue;
            let diff = lw.sub(&w.scaled(ev)).unwrap();
            assert!(diff.channels().iter().all(|c| c.iter().all(|z| z.norm() < 1e-12)));
        }
        let ev = b.eigenvalues();
        assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn coordinates_round_trip() {
        let b = GalerkinBasis::new(2, 3);
        let eta: Vec<f64> = (0..b.len()).map(|i| (i as f64 * 0.37).sin()).collect();
        let u = b.from_coordinates(&eta);
        let back = b.coordinates(&u);
        for (x, y) in eta.iter().zip(&back) {
            assert!((x - y).abs() < 1e-14);
        }
    }
}
