use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::field::SpectralScalarField;
use super::lattice::FrequencyLattice;
use crate::error::{Error, Result};

/// Real samples on the uniform grid `x_j = j / N` in each axis, first axis slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalGrid {
    n: usize,
    points: usize,
    samples: Vec<f64>,
}

impl PhysicalGrid {
    pub fn new(n: usize, points: usize, samples: Vec<f64>) -> Result<Self> {
        let expected = points.pow(n as u32);
        if samples.len() != expected {
            return Err(Error::CoefficientCount {
                expected,
                got: samples.len(),
            });
        }
        Ok(Self { n, points, samples })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(n: usize, points: usize, f: F) -> Self {
        let total = points.pow(n as u32);
        let mut x = vec![0.0; n];
        let samples = (0..total)
            .map(|idx| {
                grid_point(n, points, idx, &mut x);
                f(&x)
            })
            .collect();
        Self { n, points, samples }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Coordinates of sample `idx`.
    pub fn coordinate(&self, idx: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        grid_point(self.n, self.points, idx, &mut x);
        x
    }

    pub fn mean_square(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum::<f64>() / self.samples.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

fn grid_point(n: usize, points: usize, mut idx: usize, x: &mut [f64]) {
    for axis in (0..n).rev() {
        x[axis] = (idx % points) as f64 / points as f64;
        idx /= points;
    }
}

/// Smallest `2^a 3^b 5^c` that is at least `min`.
pub fn nice_size(min: usize) -> usize {
    let mut k = min.max(1);
    loop {
        let mut r = k;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return k;
        }
        k += 1;
    }
}

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry((len, inverse))
            .or_insert_with(|| {
                let dir = if inverse { FftDirection::Inverse } else { FftDirection::Forward };
                FftPlanner::new().plan_fft(len, dir)
            })
            .clone()
    })
}

/// Unnormalized n-dimensional FFT in place over a cube of side `points`.
fn fft_nd(data: &mut [Complex64], n: usize, points: usize, inverse: bool) {
    let fft = plan(points, inverse);
    let mut line = vec![Complex64::new(0.0, 0.0); points];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let total = data.len();
    for axis in 0..n {
        let stride = points.pow((n - 1 - axis) as u32);
        let block = stride * points;
        for base in (0..total).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                for (k, v) in line.iter_mut().enumerate() {
                    *v = data[start + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    data[start + k * stride] = *v;
                }
            }
        }
    }
}

fn wrap_index(mode: &[i32], points: usize) -> usize {
    let p = points as i64;
    mode.iter()
        .fold(0usize, |acc, &c| acc * points + (c as i64).rem_euclid(p) as usize)
}

/// Samples the real field with coefficient table `coeffs` on an `N^n` grid.
/// Modes wrap modulo `N`; callers are responsible for the aliasing check.
pub(crate) fn coeffs_to_samples(lattice: &FrequencyLattice, coeffs: &[Complex64], points: usize) -> Vec<f64> {
    let n = lattice.dim();
    let mut data = vec![Complex64::new(0.0, 0.0); points.pow(n as u32)];
    for s in lattice.present_slots() {
        let c = coeffs[s];
        if c.re != 0.0 || c.im != 0.0 {
            data[wrap_index(lattice.mode(s), points)] += c;
        }
    }
    fft_nd(&mut data, n, points, true);
    data.into_iter().map(|z| z.re).collect()
}

/// Discrete Fourier coefficients of grid samples, restricted to the present
/// slots of `lattice` and symmetrized to the real-field convention.
pub(crate) fn samples_to_coeffs(samples: &[f64], points: usize, lattice: &FrequencyLattice) -> Vec<Complex64> {
    let n = lattice.dim();
    let mut data: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(&mut data, n, points, false);
    let norm = 1.0 / data.len() as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); lattice.len()];
    for s in lattice.present_slots() {
        out[s] = data[wrap_index(lattice.mode(s), points)] * norm;
    }
    for s in 0..=lattice.zero_slot() {
        let t = lattice.negate(s);
        let avg = 0.5 * (out[s] + out[t].conj());
        out[s] = avg;
        out[t] = avg.conj();
    }
    out
}

/// Samples `g` on an `N^n` grid. Refuses grids with `N < 2m + 1`.
pub fn to_physical(g: &SpectralScalarField, points: usize) -> Result<PhysicalGrid> {
    let lat = g.lattice();
    let needed = lat.side();
    if points < needed {
        return Err(Error::Aliasing {
            points,
            radius: lat.radius(),
            needed,
        });
    }
    Ok(to_physical_forced(g, points))
}

/// Like [`to_physical`] but folds modes modulo `N` on undersized grids.
pub fn to_physical_forced(g: &SpectralScalarField, points: usize) -> PhysicalGrid {
    let lat = g.lattice();
    PhysicalGrid {
        n: lat.dim(),
        points,
        samples: coeffs_to_samples(lat, g.coeffs(), points),
    }
}

/// Ball-truncated discrete Fourier coefficients of the samples.
pub fn to_spectral(grid: &PhysicalGrid, m: usize) -> Result<SpectralScalarField> {
    let needed = 2 * m + 1;
    if grid.points < needed {
        return Err(Error::Aliasing {
            points: grid.points,
            radius: m,
            needed,
        });
    }
    let lat = FrequencyLattice::new(grid.n, m);
    let coeffs = samples_to_coeffs(&grid.samples, grid.points, &lat);
    let zero_mean = coeffs[lat.zero_slot()].norm() == 0.0;
    Ok(SpectralScalarField::from_raw(&lat, coeffs, zero_mean))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn nice_sizes() {
        assert_eq!(nice_size(17), 18);
        assert_eq!(nice_size(13), 15);
        assert_eq!(nice_size(7), 8);
        assert_eq!(nice_size(1), 1);
    }

    #[test]
    fn constant_maps_to_mean_only() {
        let lat = FrequencyLattice::new(2, 2);
        let g = SpectralScalarField::constant(&lat, 3.5);
        let grid = to_physical(&g, 5).unwrap();
        assert!(grid.samples().iter().all(|v| (v - 3.5).abs() < 1e-14));
        let back = to_spectral(&grid, 2).unwrap();
        for s in 0..lat.len() {
            let expect = if s == lat.zero_slot() { 3.5 } else { 0.0 };
            assert!((back.coeffs()[s].re - expect).abs() < 1e-14);
            assert!(back.coeffs()[s].im.abs() < 1e-14);
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (n, m) in [(1, 5), (2, 3), (3, 2)] {
            let lat = FrequencyLattice::new(n, m);
            let g = SpectralScalarField::random(&lat, &mut rng, 0.5, false);
            let grid = to_physical(&g, 2 * m + 1).unwrap();
            let back = to_spectral(&grid, m).unwrap();
            let err = g
                .coeffs()
                .iter()
                .zip(back.coeffs())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-12, "round trip error {err}");
            let energy: f64 = g.coeffs().iter().map(|c| c.norm_sqr()).sum();
            assert!((grid.mean_square() - energy).abs() < 1e-12 * energy);
        }
    }

    #[test]
    fn undersized_grid_is_refused() {
        let lat = FrequencyLattice::new(2, 3);
        let g = SpectralScalarField::zeros(&lat);
        assert!(matches!(to_physical(&g, 6), Err(Error::Aliasing { needed: 7, .. })));
        assert_eq!(to_physical_forced(&g, 6).samples().len(), 36);
    }

    #[test]
    fn sine_samples() {
        let lat = FrequencyLattice::new(2, 1);
        let g = SpectralScalarField::sin_mode(&lat, &[0, 1], 1.0).unwrap();
        let grid = to_physical(&g, 8).unwrap();
        for idx in 0..64 {
            let x = grid.coordinate(idx);
            let expect = (std::f64::consts::TAU * x[1]).sin();
            assert!((grid.samples()[idx] - expect).abs() < 1e-14);
        }
    }
}
