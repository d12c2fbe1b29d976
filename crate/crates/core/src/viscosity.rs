//! The viscosity tensor `a_{kj}^{ab}(x, t)`, its validation, norms, the operator `L` and the form `a_T`.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use crate::calculus::{partial, strain, DealiasMode};
use crate::error::{Error, Result};
use crate::spectral::{
    coeffs_to_samples, nice_size, samples_to_coeffs, sobolev_norm, sobolev_seminorm, FrequencyLattice,
    SpectralScalarField, SpectralVectorField,
};

/// Default number of `zeta` draws in [`ViscosityTensor::estimate_ellipticity`].
pub const DEFAULT_ELLIPTICITY_SAMPLES: usize = 10_000;

/// Relative tolerance for coefficientwise symmetry checks on field entries.
const SYMMETRY_TOL: f64 = 1e-12;

/// One entry of the tensor: a constant or a band-limited field in `x`.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    Constant(f64),
    Field(SpectralScalarField),
}

impl Coefficient {
    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Constant(c) => *c == 0.0,
            Coefficient::Field(g) => g.max_abs() == 0.0,
        }
    }

    pub fn bandwidth(&self) -> usize {
        match self {
            Coefficient::Constant(_) => 0,
            Coefficient::Field(g) => g.lattice().radius(),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Field(g) => g.mean(),
        }
    }

    fn samples(&self, n: usize, points: usize) -> Vec<f64> {
        match self {
            Coefficient::Constant(c) => vec![*c; points.pow(n as u32)],
            Coefficient::Field(g) => coeffs_to_samples(g.lattice(), g.coeffs(), points),
        }
    }

    fn approx_eq(&self, other: &Coefficient) -> (bool, f64) {
        match (self, other) {
            (Coefficient::Constant(a), Coefficient::Constant(b)) => (a == b, (a - b).abs()),
            _ => {
                let (ga, gb) = (self.as_field_like(other), other.as_field_like(self));
                let scale = ga.max_abs().max(gb.max_abs());
                let defect = ga
                    .coeffs()
                    .iter()
                    .zip(gb.coeffs())
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max);
                (defect <= SYMMETRY_TOL * scale, defect)
            }
        }
    }

    /// Field view on a lattice large enough for comparing with `other`.
    fn as_field_like(&self, other: &Coefficient) -> SpectralScalarField {
        let (n, m) = match (self, other) {
            (Coefficient::Field(a), Coefficient::Field(b)) => {
                (a.lattice().dim(), a.lattice().radius().max(b.lattice().radius()))
            }
            (Coefficient::Field(a), _) | (_, Coefficient::Field(a)) => (a.lattice().dim(), a.lattice().radius()),
            _ => (1, 0),
        };
        match self {
            Coefficient::Constant(c) => SpectralScalarField::constant(&FrequencyLattice::new(n, m), *c),
            Coefficient::Field(g) => crate::spectral::resize_scalar(g, m),
        }
    }
}

/// Piecewise-linear time factor `theta(t)`, held constant outside its span.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeTable {
    points: Vec<(f64, f64)>,
}

impl TimeTable {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("time table needs at least one point".into()));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidArgument("time table must be strictly increasing in t".into()));
        }
        if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(Error::InvalidArgument("time table entries must be finite".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn value(&self, t: f64) -> f64 {
        let p = &self.points;
        if t <= p[0].0 {
            return p[0].1;
        }
        if t >= p[p.len() - 1].0 {
            return p[p.len() - 1].1;
        }
        let i = p.partition_point(|q| q.0 <= t) - 1;
        let (t0, v0) = p[i];
        let (t1, v1) = p[i + 1];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    pub fn max_abs(&self) -> f64 {
        self.points.iter().fold(0.0, |a, p| a.max(p.1.abs()))
    }

    pub fn min(&self) -> f64 {
        self.points.iter().fold(f64::INFINITY, |a, p| a.min(p.1))
    }

    /// Time average over the table's span (the single value for one point).
    pub fn mean(&self) -> f64 {
        let p = &self.points;
        if p.len() == 1 {
            return p[0].1;
        }
        let area: f64 = p.windows(2).map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0)).sum();
        area / (p[p.len() - 1].0 - p[0].0)
    }

    pub fn span(&self) -> (f64, f64) {
        (self.points[0].0, self.points[self.points.len() - 1].0)
    }
}

/// Outcome of [`ViscosityTensor::verify_symmetry`].
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryReport {
    /// Entries `(k, j, a, b)` (zero-based) whose partner differs.
    pub violations: Vec<[usize; 4]>,
    pub max_defect: f64,
}

impl SymmetryReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Norms of the tensor, aggregated Frobenius-style over entries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TensorNorms {
    pub sup_norm: f64,
    pub sobolev_frobenius_norm: f64,
    pub sobolev_frobenius_seminorm: f64,
}

type SampleCache = Mutex<HashMap<usize, Arc<Vec<Option<Vec<f64>>>>>>;

/// Rank-4 viscosity tensor with separable time dependence `a(x, t) = theta(t) a0(x)`.
pub struct ViscosityTensor {
    n: usize,
    entries: Vec<Coefficient>,
    time_factor: Option<TimeTable>,
    c_a: Option<f64>,
    cache: SampleCache,
}

impl Clone for ViscosityTensor {
    fn clone(&self) -> Self {
        Self {
            n: self.n,
            entries: self.entries.clone(),
            time_factor: self.time_factor.clone(),
            c_a: self.c_a,
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl fmt::Debug for ViscosityTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ViscosityTensor")
            .field("n", &self.n)
            .field("nonzero_entries", &self.entries.iter().filter(|e| !e.is_zero()).count())
            .field("constant", &self.is_constant())
            .field("time_factor", &self.time_factor)
            .field("c_a", &self.c_a)
            .finish()
    }
}

impl ViscosityTensor {
    #[inline]
    fn idx(&self, k: usize, j: usize, a: usize, b: usize) -> usize {
        ((k * self.n + j) * self.n + a) * self.n + b
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            entries: vec![Coefficient::Constant(0.0); n.pow(4)],
            time_factor: None,
            c_a: None,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// `nu (delta_kj delta_ab + delta_kb delta_aj)`.
    pub fn isotropic(n: usize, nu: f64) -> Self {
        let mut t = Self::zero(n);
        for k in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        let v = nu * (((k == j && a == b) as u8 + (k == b && a == j) as u8) as f64);
                        let i = t.idx(k, j, a, b);
                        t.entries[i] = Coefficient::Constant(v);
                    }
                }
            }
        }
        t
    }

    /// Fixed non-isotropic example: `nu(x) (delta delta + delta delta) + mu d (x) d (x) d (x) d`
    /// with `nu(x) = 0.01 (1 + 0.5 cos 2 pi x1)`, `mu = 0.02`, `d = (1, .., 1) / sqrt(n)`.
    pub fn anisotropic_demo(n: usize) -> Self {
        let lat = FrequencyLattice::new(n, 1);
        let mut e1 = vec![0; n];
        e1[0] = 1;
        let nu = SpectralScalarField::constant(&lat, 0.01)
            .add(&SpectralScalarField::cos_mode(&lat, &e1, 0.005).expect("unit mode on lattice"))
            .expect("shared lattice");
        let mu_entry = 0.02 / (n * n) as f64;
        let mut t = Self::zero(n);
        for k in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        let w = ((k == j && a == b) as u8 + (k == b && a == j) as u8) as f64;
                        let i = t.idx(k, j, a, b);
                        t.entries[i] = if w == 0.0 {
                            Coefficient::Constant(mu_entry)
                        } else {
                            Coefficient::Field(
                                nu.scaled(w)
                                    .add(&SpectralScalarField::constant(&lat, mu_entry))
                                    .expect("shared lattice"),
                            )
                        };
                    }
                }
            }
        }
        t
    }

    /// Builds a tensor from zero-based `(k, j, a, b)` entries; unspecified entries are zero.
    pub fn from_entries(n: usize, entries: Vec<([usize; 4], Coefficient)>, time_factor: Option<TimeTable>) -> Result<Self> {
        let mut t = Self::zero(n);
        for (key, c) in entries {
            if key.iter().any(|&i| i >= n) {
                return Err(Error::InvalidArgument(format!("tensor index {key:?} out of range for n = {n}")));
            }
            if let Coefficient::Field(g) = &c {
                if g.lattice().dim() != n {
                    return Err(Error::InvalidArgument(format!(
                        "entry {key:?} lives in dimension {}, tensor has n = {n}",
                        g.lattice().dim()
                    )));
                }
            }
            let i = t.idx(key[0], key[1], key[2], key[3]);
            t.entries[i] = c;
        }
        t.time_factor = time_factor;
        Ok(t)
    }

    pub fn with_time_factor(mut self, table: TimeTable) -> Self {
        self.time_factor = Some(table);
        self.c_a = None;
        self.cache = Mutex::new(HashMap::new());
        self
    }

    /// Overrides the ellipticity constant (used when constants are configured, not estimated).
    pub fn with_ellipticity_constant(mut self, c_a: f64) -> Self {
        self.c_a = Some(c_a);
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, k: usize, j: usize, a: usize, b: usize) -> &Coefficient {
        &self.entries[self.idx(k, j, a, b)]
    }

    pub fn set_entry(&mut self, k: usize, j: usize, a: usize, b: usize, c: Coefficient) {
        let i = self.idx(k, j, a, b);
        self.entries[i] = c;
        self.c_a = None;
        self.cache = Mutex::new(HashMap::new());
    }

    pub fn time_factor(&self) -> Option<&TimeTable> {
        self.time_factor.as_ref()
    }

    pub fn theta(&self, t: f64) -> f64 {
        self.time_factor.as_ref().map_or(1.0, |tt| tt.value(t))
    }

    fn theta_max(&self) -> f64 {
        self.time_factor.as_ref().map_or(1.0, |tt| tt.max_abs())
    }

    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(|e| matches!(e, Coefficient::Constant(_)))
    }

    /// Largest lattice radius among field entries.
    pub fn bandwidth(&self) -> usize {
        self.entries.iter().map(Coefficient::bandwidth).max().unwrap_or(0)
    }

    /// Cached ellipticity constant, set by [`Self::validate`] or an override.
    pub fn ellipticity_constant(&self) -> Result<f64> {
        self.c_a.ok_or(Error::TensorNotValidated)
    }

    pub fn verify_symmetry(&self) -> SymmetryReport {
        let n = self.n;
        let mut violations = Vec::new();
        let mut max_defect: f64 = 0.0;
        for k in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        let e = self.entry(k, j, a, b);
                        let (ok1, d1) = e.approx_eq(self.entry(a, j, k, b));
                        let (ok2, d2) = e.approx_eq(self.entry(k, b, a, j));
                        max_defect = max_defect.max(d1).max(d2);
                        if !(ok1 && ok2) {
                            violations.push([k, j, a, b]);
                        }
                    }
                }
            }
        }
        SymmetryReport { violations, max_defect }
    }

    /// Checks symmetry, estimates `C_A` and caches it.
    pub fn validate(mut self, samples: usize, seed: u64) -> Result<Self> {
        let report = self.verify_symmetry();
        if !report.passed() {
            return Err(Error::TensorNotSymmetric {
                violations: report.violations.len(),
            });
        }
        self.c_a = Some(self.estimate_ellipticity(samples, seed)?);
        Ok(self)
    }

    fn sample_points(&self) -> usize {
        nice_size((4 * self.bandwidth() + 1).max(16))
    }

    /// Entry samples on an `N^n` grid (`None` for zero entries), cached per `N`.
    fn entry_samples(&self, points: usize) -> Arc<Vec<Option<Vec<f64>>>> {
        let mut cache = self.cache.lock().expect("sample cache poisoned");
        cache
            .entry(points)
            .or_insert_with(|| {
                Arc::new(
                    self.entries
                        .iter()
                        .map(|e| (!e.is_zero()).then(|| e.samples(self.n, points)))
                        .collect(),
                )
            })
            .clone()
    }

    fn quadratic_form_at(&self, samples: &[Option<Vec<f64>>], p: usize, zeta: &[f64]) -> f64 {
        let n = self.n;
        let mut q = 0.0;
        for k in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        if let Some(s) = &samples[self.idx(k, j, a, b)] {
                            q += s[p] * zeta[k * n + a] * zeta[j * n + b];
                        }
                    }
                }
            }
        }
        q
    }

    /// Empirical `C_A = max |zeta|^2 / a(zeta, zeta)` over random symmetric
    /// trace-free unit `zeta`, random grid points and random times in the table span.
    pub fn estimate_ellipticity(&self, samples: usize, seed: u64) -> Result<f64> {
        let n = self.n;
        let points = self.sample_points();
        let grid = self.entry_samples(points);
        let total = points.pow(n as u32);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c_a: f64 = 0.0;
        let mut zeta = vec![0.0; n * n];
        for _ in 0..samples {
            let p = rng.gen_range(0..total);
            let t = match &self.time_factor {
                Some(tt) => {
                    let (t0, t1) = tt.span();
                    if t1 > t0 {
                        rng.gen_range(t0..=t1)
                    } else {
                        t0
                    }
                }
                None => 0.0,
            };
            random_trace_free(&mut rng, n, &mut zeta);
            let q = self.theta(t) * self.quadratic_form_at(&grid, p, &zeta);
            if !(q > 0.0) {
                let x = crate::spectral::PhysicalGrid::from_fn(n, points, |_| 0.0).coordinate(p);
                return Err(Error::NotRelaxedElliptic {
                    zeta: zeta.clone(),
                    x,
                    t,
                    value: q,
                });
            }
            c_a = c_a.max(1.0 / q);
        }
        Ok(c_a)
    }

    /// Half the largest eigenvalue of the symmetrized quadratic form on all
    /// `n x n` matrices, maximized over grid points and scaled by `max |theta|`.
    pub fn max_viscosity(&self) -> f64 {
        let n = self.n;
        let points = if self.is_constant() { 1 } else { self.sample_points() };
        let grid = self.entry_samples(points);
        let total = points.pow(n as u32);
        let dim = n * n;
        let mut best: f64 = 0.0;
        for p in 0..total {
            let mut q = DMatrix::<f64>::zeros(dim, dim);
            for k in 0..n {
                for j in 0..n {
                    for a in 0..n {
                        for b in 0..n {
                            if let Some(s) = &grid[self.idx(k, j, a, b)] {
                                q[(k * n + a, j * n + b)] += 0.5 * s[p];
                                q[(j * n + b, k * n + a)] += 0.5 * s[p];
                            }
                        }
                    }
                }
            }
            let eig = SymmetricEigen::new(q);
            best = best.max(eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max));
        }
        0.5 * best * self.theta_max()
    }

    /// `<A, I_iso>_F / (2 n^2 + 2 n)` on the spatial means, times the mean time factor.
    pub fn isotropic_projection(&self) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for k in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        let w = ((k == j && a == b) as u8 + (k == b && a == j) as u8) as f64;
                        if w != 0.0 {
                            acc += w * self.entry(k, j, a, b).mean();
                        }
                    }
                }
            }
        }
        let mean_theta = self.time_factor.as_ref().map_or(1.0, |tt| tt.mean());
        acc / (2 * n * n + 2 * n) as f64 * mean_theta
    }

    pub fn tensor_norms(&self, sigma: f64) -> TensorNorms {
        let points = self.sample_points();
        let grid = self.entry_samples(points);
        let th = self.theta_max();
        let (mut sup, mut hs, mut semi) = (0.0, 0.0, 0.0);
        for (e, s) in self.entries.iter().zip(grid.iter()) {
            let (a, b, c) = match e {
                Coefficient::Constant(v) => (v.abs(), v.abs() * TAU.powf(sigma), 0.0),
                Coefficient::Field(g) => {
                    let m = s.as_ref().map_or(0.0, |v| v.iter().fold(0.0, |a: f64, x| a.max(x.abs())));
                    (m, sobolev_norm(g, sigma), sobolev_seminorm(g, sigma))
                }
            };
            sup += a * a;
            hs += b * b;
            semi += c * c;
        }
        TensorNorms {
            sup_norm: th * f64::sqrt(sup),
            sobolev_frobenius_norm: th * f64::sqrt(hs),
            sobolev_frobenius_seminorm: th * f64::sqrt(semi),
        }
    }

    /// `(L u)_k = d_a (a_{kj}^{ab} E_{jb}(u))`, truncated to the lattice of `u`.
    pub fn apply_operator_l(&self, u: &SpectralVectorField, t: f64, dealias: DealiasMode) -> Result<SpectralVectorField> {
        self.apply_operator_l_on_grid(u, t, self.product_points(u.lattice().radius(), dealias))
    }

    /// Points per axis used for `a * E(u)` products at lattice radius `m`.
    pub fn product_points(&self, m: usize, dealias: DealiasMode) -> usize {
        dealias.points(m + self.bandwidth(), m)
    }

    /// [`Self::apply_operator_l`] with products on an explicit `points^n` grid.
    pub fn apply_operator_l_on_grid(&self, u: &SpectralVectorField, t: f64, points: usize) -> Result<SpectralVectorField> {
        self.check_dim(u)?;
        if self.is_constant() {
            return Ok(self.apply_constant(u, t, false));
        }
        let e = strain(u);
        let n = self.n;
        let fields: Vec<SpectralScalarField> = (0..n * n).map(|i| e.get(i / n, i % n).clone()).collect();
        self.divergence_of_stress(u, &fields, t, points)
    }

    /// Same operator assembled as `d_a (a_{kj}^{ab} d_b u_j)`.
    pub fn apply_operator_l_gradient_form(
        &self,
        u: &SpectralVectorField,
        t: f64,
        dealias: DealiasMode,
    ) -> Result<SpectralVectorField> {
        self.check_dim(u)?;
        if self.is_constant() {
            return Ok(self.apply_constant(u, t, true));
        }
        let n = self.n;
        let fields: Vec<SpectralScalarField> = (0..n * n).map(|i| partial(u.component(i / n), i % n)).collect();
        self.divergence_of_stress(u, &fields, t, self.product_points(u.lattice().radius(), dealias))
    }

    fn check_dim(&self, u: &SpectralVectorField) -> Result<()> {
        if u.dim() != self.n {
            return Err(Error::ComponentCount {
                expected: self.n,
                got: u.dim(),
            });
        }
        Ok(())
    }

    /// Per-mode evaluation for constant tensors. `grad_form` uses `d_b u_j` in place of `E_{jb}`.
    fn apply_constant(&self, u: &SpectralVectorField, t: f64, grad_form: bool) -> SpectralVectorField {
        let n = self.n;
        let lat = u.lattice().clone();
        let th = self.theta(t);
        let consts: Vec<f64> = self.entries.iter().map(Coefficient::mean).collect();
        let mut out = vec![vec![Complex64::new(0.0, 0.0); lat.len()]; n];
        for s in lat.present_slots() {
            let xi = lat.mode(s);
            for k in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    for a in 0..n {
                        for b in 0..n {
                            let c = consts[self.idx(k, j, a, b)];
                            if c == 0.0 {
                                continue;
                            }
                            // i xi_a * (i/2)(xi_j u_b + xi_b u_j) without the 4 pi^2
                            let d = if grad_form {
                                u.component(j).coeffs()[s] * xi[b] as f64
                            } else {
                                0.5 * (u.component(b).coeffs()[s] * xi[j] as f64
                                    + u.component(j).coeffs()[s] * xi[b] as f64)
                            };
                            acc += d * (c * xi[a] as f64);
                        }
                    }
                }
                out[k][s] = acc * (-TAU * TAU * th);
            }
        }
        SpectralVectorField::from_components_unchecked(
            out.into_iter().map(|c| SpectralScalarField::from_raw(&lat, c, true)).collect(),
            true,
            false,
        )
    }

    /// Grid route: `sigma_{ka} = sum a_{kj}^{ab} D_{jb}` then `sum_a d_a sigma_{ka}`.
    /// `d` holds `D_{jb}` at index `j * n + b`.
    fn divergence_of_stress(
        &self,
        u: &SpectralVectorField,
        d: &[SpectralScalarField],
        t: f64,
        points: usize,
    ) -> Result<SpectralVectorField> {
        let n = self.n;
        let lat = u.lattice().clone();
        if points < lat.side() {
            return Err(Error::Aliasing {
                points,
                radius: lat.radius(),
                needed: lat.side(),
            });
        }
        let a_grid = self.entry_samples(points);
        let d_grid: Vec<Vec<f64>> = d.iter().map(|f| coeffs_to_samples(&lat, f.coeffs(), points)).collect();
        let th = self.theta(t);
        let len = d_grid[0].len();
        let mut comps = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = SpectralScalarField::zeros(&lat);
            for a in 0..n {
                let mut stress = vec![0.0; len];
                for j in 0..n {
                    for b in 0..n {
                        if let Some(s) = &a_grid[self.idx(k, j, a, b)] {
                            for ((o, x), y) in stress.iter_mut().zip(s).zip(&d_grid[j * n + b]) {
                                *o += x * y;
                            }
                        }
                    }
                }
                let coeffs = samples_to_coeffs(&stress, points, &lat);
                let sig = SpectralScalarField::from_raw(&lat, coeffs, false);
                acc = acc.add(&partial(&sig, a))?;
            }
            comps.push(acc.scaled(th));
        }
        Ok(SpectralVectorField::from_components_unchecked(comps, true, false))
    }

    /// `a_T(t; u, v) = < a_{ij}^{ab} E_{jb}(u), E_{ia}(v) >`.
    pub fn bilinear_form(&self, t: f64, u: &SpectralVectorField, v: &SpectralVectorField, dealias: DealiasMode) -> Result<f64> {
        self.check_dim(u)?;
        self.check_dim(v)?;
        crate::spectral::ensure_same_lattice(u.lattice(), v.lattice())?;
        let n = self.n;
        let eu = strain(u);
        let ev = strain(v);
        let th = self.theta(t);
        if self.is_constant() {
            let lat = u.lattice();
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    for a in 0..n {
                        for b in 0..n {
                            let c = self.entry(i, j, a, b).mean();
                            if c == 0.0 {
                                continue;
                            }
                            let (x, y) = (eu.get(j, b).coeffs(), ev.get(i, a).coeffs());
                            let pair: f64 = lat.present_slots().map(|s| (x[s] * y[lat.negate(s)]).re).sum();
                            acc += c * pair;
                        }
                    }
                }
            }
            return Ok(th * acc);
        }
        let lat = u.lattice();
        let points = self.product_points(lat.radius(), dealias);
        let a_grid = self.entry_samples(points);
        let sample = |f: &SpectralScalarField| coeffs_to_samples(lat, f.coeffs(), points);
        let eu_g: Vec<Vec<f64>> = (0..n * n).map(|i| sample(eu.get(i / n, i % n))).collect();
        let ev_g: Vec<Vec<f64>> = (0..n * n).map(|i| sample(ev.get(i / n, i % n))).collect();
        let len = eu_g[0].len();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        if let Some(s) = &a_grid[self.idx(i, j, a, b)] {
                            let (x, y) = (&eu_g[j * n + b], &ev_g[i * n + a]);
                            acc += (0..len).map(|p| s[p] * x[p] * y[p]).sum::<f64>();
                        }
                    }
                }
            }
        }
        Ok(th * acc / len as f64)
    }
}

/// Uniform random symmetric trace-free matrix of unit Frobenius norm, row-major.
fn random_trace_free<R: Rng>(rng: &mut R, n: usize, out: &mut [f64]) {
    loop {
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.gen_range(-1.0..1.0);
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        let tr = (0..n).map(|i| out[i * n + i]).sum::<f64>() / n as f64;
        for i in 0..n {
            out[i * n + i] -= tr;
        }
        let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-3 {
            for v in out.iter_mut() {
                *v /= norm;
            }
            return;
        }
    }
}
