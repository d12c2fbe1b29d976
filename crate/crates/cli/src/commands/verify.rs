//! Seeded property suites. Every property keeps its worst residual over all trials;
//! a property passes when that residual is at most its tolerance.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tns_core::analysis::inequalities::{
    advection_residuals, coercivity_residuals, korn_residual, norm_equivalence_residuals, petree_residual,
};
use tns_core::analysis::{energy_residual, verify_discrete_young, verify_interpolation, LatticeSequence};
use tns_core::calculus::{
    advect, advect_oracle, convect, convect_oracle, divergence, divergence_residual, gradient, helmholtz_decompose,
    invert_divergence, invert_gradient, leray_project, strain, DealiasMode,
};
use tns_core::galerkin::scenarios::{random_smooth, taylor_green};
use tns_core::galerkin::{solve, Forcing, SolverConfig};
use tns_core::heat::{heat_evolve, verify_heat_energy_identity};
use tns_core::spectral::{
    bessel_potential, dual_pairing, nice_size, sobolev_norm, sobolev_norm_sq, to_physical, to_spectral, FrequencyLattice,
    SpectralScalarField, SpectralVectorField,
};
use tns_core::viscosity::ViscosityTensor;

use crate::config::Tolerances;

/// Solver runs are expensive; the solver suite uses at most this many random cases per property.
pub const SOLVER_TRIAL_CAP: usize = 4;

const TG_DECAY_TOL: f64 = 1e-6;
const HEAT_MATCH_TOL: f64 = 1e-8;
const ENERGY_RATE_TOL: f64 = 1e-5;
const HEAT_IDENTITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Spectral,
    Calculus,
    Inequalities,
    Solver,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Spectral, Suite::Calculus, Suite::Inequalities, Suite::Solver];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Spectral => "spectral",
            Suite::Calculus => "calculus",
            Suite::Inequalities => "inequalities",
            Suite::Solver => "solver",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown suite `{s}` (expected spectral, calculus, inequalities or solver)"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyResult {
    pub name: String,
    /// Largest residual seen; `None` when no case ran.
    pub worst: Option<f64>,
    pub tolerance: f64,
    pub cases: usize,
    /// First error raised while evaluating the property, if any.
    pub error: Option<String>,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.worst.map_or(true, |w| w <= self.tolerance)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: usize,
    pub properties: Vec<PropertyResult>,
    pub warnings: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(PropertyResult::passed)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {} (seed {}, trials {})", self.suite.as_str(), self.seed, self.trials)?;
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        for p in &self.properties {
            let status = if p.passed() { "PASS" } else { "FAIL" };
            let worst = p.worst.map_or_else(|| "-".to_string(), |w| format!("{w:.3e}"));
            write!(f, "{status}  {:<32} worst {worst:>11}  tol {:.1e}  cases {}", p.name, p.tolerance, p.cases)?;
            if let Some(e) = &p.error {
                write!(f, "  error: {e}")?;
            }
            writeln!(f)?;
        }
        write!(f, "{}", if self.passed() { "all properties hold" } else { "property violation" })
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub tolerances: Tolerances,
    /// Tensor for the coercivity check; the built-in anisotropic examples (n = 2, 3) when absent.
    pub tensor: Option<ViscosityTensor>,
    pub ellipticity_samples: usize,
}

struct Tracker {
    props: Vec<PropertyResult>,
}

impl Tracker {
    fn new() -> Self {
        Self { props: Vec::new() }
    }

    fn declare(&mut self, name: &str, tolerance: f64) {
        if !self.props.iter().any(|p| p.name == name) {
            self.props.push(PropertyResult {
                name: name.to_string(),
                worst: None,
                tolerance,
                cases: 0,
                error: None,
            });
        }
    }

    fn record<E: fmt::Display>(&mut self, name: &str, value: Result<f64, E>) {
        let p = self
            .props
            .iter_mut()
            .find(|p| p.name == name)
            .expect("property declared before use");
        p.cases += 1;
        match value {
            Ok(v) => {
                // NaN must never look like a pass
                let v = if v.is_nan() { f64::INFINITY } else { v };
                p.worst = Some(p.worst.map_or(v, |w| w.max(v)));
            }
            Err(e) => {
                p.worst = Some(f64::INFINITY);
                p.error.get_or_insert_with(|| e.to_string());
            }
        }
    }
}

fn ok(v: f64) -> Result<f64, String> {
    Ok(v)
}

fn scalar_diff(a: &SpectralScalarField, b: &SpectralScalarField) -> f64 {
    let d = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    d / b.max_abs().max(f64::MIN_POSITIVE)
}

fn vector_diff(a: &SpectralVectorField, b: &SpectralVectorField) -> tns_core::Result<f64> {
    Ok(a.sub(b)?.max_abs() / b.max_abs().max(f64::MIN_POSITIVE))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn random_shape(rng: &mut ChaCha8Rng) -> (usize, usize) {
    let n = if rng.gen_bool(0.5) { 2 } else { 3 };
    (n, rng.gen_range(1..=3))
}

fn random_vector(lat: &FrequencyLattice, rng: &mut ChaCha8Rng, zero_mean: bool) -> SpectralVectorField {
    let comps = (0..lat.dim())
        .map(|_| SpectralScalarField::random(lat, rng, 1.0, zero_mean))
        .collect();
    SpectralVectorField::new(comps).expect("components share a lattice")
}

pub fn cmd_verify(suite: Suite, seed: u64, trials: usize, opts: &VerifyOptions) -> VerifyReport {
    let mut tracker = Tracker::new();
    let mut warnings = Vec::new();
    if trials == 0 {
        warnings.push("trials = 0: no cases were run, every property passes vacuously".to_string());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match suite {
        Suite::Spectral => spectral(&mut tracker, &mut rng, trials, &opts.tolerances),
        Suite::Calculus => calculus(&mut tracker, &mut rng, trials, &opts.tolerances),
        Suite::Inequalities => inequalities(&mut tracker, &mut rng, trials, opts, &mut warnings),
        Suite::Solver => {
            if trials > SOLVER_TRIAL_CAP {
                warnings.push(format!("solver suite runs {SOLVER_TRIAL_CAP} cases per property (requested {trials})"));
            }
            solver(&mut tracker, &mut rng, trials.min(SOLVER_TRIAL_CAP))
        }
    }
    VerifyReport {
        suite,
        seed,
        trials,
        properties: tracker.props,
        warnings,
    }
}

fn spectral(tr: &mut Tracker, rng: &mut ChaCha8Rng, trials: usize, tol: &Tolerances) {
    let t = tol.identity;
    for name in [
        "bessel_isometry",
        "parseval",
        "transform_round_trip",
        "helmholtz_recombination",
        "helmholtz_orthogonality",
        "gradient_inverse",
        "divergence_inverse",
        "leray_idempotent",
    ] {
        tr.declare(name, t);
    }
    for _ in 0..trials {
        let (n, m) = random_shape(rng);
        let lat = FrequencyLattice::new(n, m);
        let g = SpectralScalarField::random(&lat, rng, 1.0, false);
        let (s, r) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        tr.record("bessel_isometry", ok(rel(sobolev_norm(&bessel_potential(&g, r), s - r), sobolev_norm(&g, s))),
        );
        let grid = to_physical(&g, nice_size(2 * m + 1));
        tr.record(
            "parseval",
            grid.as_ref().map(|gr| rel(gr.mean_square(), sobolev_norm_sq(&g, 0.0))).map_err(|e| e.to_string()),
        );
        tr.record(
            "transform_round_trip",
            grid.and_then(|gr| to_spectral(&gr, m)).map(|back| scalar_diff(&back, &g)),
        );
        let f = random_vector(&lat, rng, true);
        let scale = sobolev_norm(&f, 0.0);
        match helmholtz_decompose(&f) {
            Ok((fg, fs)) => {
                tr.record(
                    "helmholtz_recombination",
                    fg.add(&fs).and_then(|x| x.sub(&f)).map(|d| sobolev_norm(&d, 0.0) / scale),
                );
                tr.record("helmholtz_orthogonality", ok(dual_pairing(&fg, &fs).abs() / (scale * scale)));
            }
            Err(e) => {
                tr.record("helmholtz_recombination", Err(e.to_string()));
                tr.record("helmholtz_orthogonality", Err(e));
            }
        }
        let q = SpectralScalarField::random(&lat, rng, 1.0, true);
        tr.record("gradient_inverse", invert_gradient(&gradient(&q)).map(|b| scalar_diff(&b, &q)));
        tr.record(
            "divergence_inverse",
            invert_divergence(&q).map(|w| scalar_diff(&divergence(&w), &q)),
        );
        tr.record(
            "leray_idempotent",
            leray_project(&f).and_then(|p| leray_project(&p).and_then(|pp| vector_diff(&pp, &p))),
        );
    }
}

fn calculus(tr: &mut Tracker, rng: &mut ChaCha8Rng, trials: usize, tol: &Tolerances) {
    let t = tol.identity;
    for name in [
        "convect_exact_pad_vs_oracle",
        "convect_two_thirds_vs_oracle",
        "advect_vs_oracle",
        "strain_trace_is_divergence",
        "leray_divergence_free",
    ] {
        tr.declare(name, t);
    }
    for _ in 0..trials {
        let (n, m) = random_shape(rng);
        let lat = FrequencyLattice::new(n, m);
        let u = random_vector(&lat, rng, false);
        let v = random_vector(&lat, rng, false);
        match convect_oracle(&u) {
            Ok(oracle) => {
                tr.record(
                    "convect_exact_pad_vs_oracle",
                    convect(&u, DealiasMode::ExactPad).and_then(|c| vector_diff(&c, &oracle)),
                );
                tr.record(
                    "convect_two_thirds_vs_oracle",
                    convect(&u, DealiasMode::TwoThirds).and_then(|c| vector_diff(&c, &oracle)),
                );
            }
            Err(e) => {
                tr.record("convect_exact_pad_vs_oracle", Err(e.to_string()));
                tr.record("convect_two_thirds_vs_oracle", Err(e));
            }
        }
        tr.record(
            "advect_vs_oracle",
            advect_oracle(&u, &v).and_then(|o| advect(&u, &v, DealiasMode::ExactPad).and_then(|a| vector_diff(&a, &o))),
        );
        let div = divergence(&u);
        let d = strain(&u).trace();
        let diff = d.coeffs().iter().zip(div.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        tr.record("strain_trace_is_divergence", ok(diff / div.max_abs().max(1.0)));
        let w = tns_core::spectral::project_zero_mean(&v);
        tr.record(
            "leray_divergence_free",
            leray_project(&w).map(|p| divergence_residual(&p) / (sobolev_norm(&w, 1.0).max(f64::MIN_POSITIVE))),
        );
    }
}

fn inequalities(tr: &mut Tracker, rng: &mut ChaCha8Rng, trials: usize, opts: &VerifyOptions, warnings: &mut Vec<String>) {
    let t = opts.tolerances.inequality;
    let ta = opts.tolerances.advection;
    for name in [
        "korn_factor_two",
        "norm_equivalence_lower",
        "norm_equivalence_upper",
        "interpolation",
        "discrete_young",
        "petree",
    ] {
        tr.declare(name, t);
    }
    for name in ["advection_general", "advection_antisymmetry", "advection_self_pairing"] {
        tr.declare(name, ta);
    }
    tr.declare("coercivity_lower", t);
    tr.declare("coercivity_upper", t);
    let tensors: Vec<ViscosityTensor> = match &opts.tensor {
        Some(a) => vec![a.clone()],
        None => vec![ViscosityTensor::anisotropic_demo(2), ViscosityTensor::anisotropic_demo(3)],
    };
    let samples = if opts.ellipticity_samples == 0 {
        tns_core::viscosity::DEFAULT_ELLIPTICITY_SAMPLES
    } else {
        opts.ellipticity_samples
    };
    let validated: Vec<tns_core::Result<ViscosityTensor>> =
        tensors.into_iter().map(|a| a.validate(samples, rng.gen())).collect();
    for v in &validated {
        if let Err(e) = v {
            warnings.push(format!("coercivity tensor rejected: {e}"));
        }
    }
    for i in 0..trials {
        let (n, m) = random_shape(rng);
        let lat = FrequencyLattice::new(n, m);
        let v = random_vector(&lat, rng, false);
        let grad_sq: f64 = v.components().iter().map(|c| sobolev_norm_sq(&gradient(c), 0.0)).sum();
        tr.record("korn_factor_two", ok(korn_residual(&v) / grad_sq.max(f64::MIN_POSITIVE)));
        let g = SpectralScalarField::random(&lat, rng, 1.0, true);
        for s in [0.0, 1.0, 2.0] {
            match norm_equivalence_residuals(&g, s) {
                Ok((lo, hi)) => {
                    tr.record("norm_equivalence_lower", ok(lo));
                    tr.record("norm_equivalence_upper", ok(hi));
                }
                Err(e) => {
                    tr.record("norm_equivalence_lower", Err(e.to_string()));
                    tr.record("norm_equivalence_upper", Err(e));
                }
            }
        }
        let (s1, s2, th) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..3.0), rng.gen_range(0.0..=1.0));
        let decay = rng.gen_range(0.0..2.0);
        let h = SpectralScalarField::random(&lat, rng, decay, false);
        let rhs = sobolev_norm(&h, s1).powf(th) * sobolev_norm(&h, s2).powf(1.0 - th);
        tr.record("interpolation", verify_interpolation(&h, s1, s2, th).map(|r| r / rhs));
        let dim = rng.gen_range(1..=3);
        let a = LatticeSequence::random(dim, 3, rng.gen_range(1..8), rng);
        let b = LatticeSequence::random(dim, 3, rng.gen_range(1..8), rng);
        let q = [1.0, 2.0, 3.5, f64::INFINITY][i % 4];
        let scale = (a.norm(1.0) * b.norm(q)).max(f64::MIN_POSITIVE);
        tr.record("discrete_young", verify_discrete_young(&a, &b, q).map(|r| r / scale));
        let xi: Vec<i32> = (0..3).map(|_| rng.gen_range(-6..=6)).collect();
        let eta: Vec<i32> = (0..3).map(|_| rng.gen_range(-6..=6)).collect();
        tr.record("petree", ok(petree_residual(rng.gen_range(-3.0..3.0), &xi, &eta)));
        let v2 = random_vector(&lat, rng, false);
        let v3 = random_vector(&lat, rng, false);
        match advection_residuals(&v, &v2, &v3) {
            Ok(r) => {
                tr.record("advection_general", ok(r.general.abs()));
                tr.record("advection_antisymmetry", ok(r.antisymmetry.abs()));
                tr.record("advection_self_pairing", ok(r.self_pairing.abs()));
            }
            Err(e) => {
                for name in ["advection_general", "advection_antisymmetry", "advection_self_pairing"] {
                    tr.record(name, Err(e.to_string()));
                }
            }
        }
        let pick = &validated[i % validated.len()];
        match pick {
            Ok(a) => {
                let wl = FrequencyLattice::new(a.dim(), m);
                let w = leray_project(&random_vector(&wl, rng, true));
                let time = a.time_factor().map_or(0.0, |tf| {
                    let (t0, t1) = tf.span();
                    rng.gen_range(t0..=t1)
                });
                match w.and_then(|w| coercivity_residuals(a, &w, time)) {
                    Ok((lo, hi)) => {
                        tr.record("coercivity_lower", ok(lo));
                        tr.record("coercivity_upper", ok(hi));
                    }
                    Err(e) => {
                        tr.record("coercivity_lower", Err(e.to_string()));
                        tr.record("coercivity_upper", Err(e));
                    }
                }
            }
            Err(e) => {
                tr.record("coercivity_lower", Err(e.to_string()));
                tr.record("coercivity_upper", Err(e.to_string()));
            }
        }
    }
}

fn iso(n: usize, nu: f64) -> tns_core::Result<ViscosityTensor> {
    ViscosityTensor::isotropic(n, nu).validate(1000, 0)
}

fn solver(tr: &mut Tracker, rng: &mut ChaCha8Rng, cases: usize) {
    tr.declare("taylor_green_decay", TG_DECAY_TOL);
    tr.declare("heat_reduction", HEAT_MATCH_TOL);
    tr.declare("heat_energy_identity", HEAT_IDENTITY_TOL);
    tr.declare("energy_residual_rate", ENERGY_RATE_TOL);
    tr.declare("divergence_free_states", 1e-12);
    for _ in 0..cases {
        let nu = rng.gen_range(0.005..0.05);
        let tg = (|| -> tns_core::Result<f64> {
            let a = iso(2, nu)?;
            let u0 = taylor_green(2, 3, 0.0, 0.0)?;
            let traj = solve(&u0, &Forcing::Zero, &a, &SolverConfig::new(3, 1e-3, 0.05))?;
            let mut worst: f64 = 0.0;
            for s in &traj.states {
                let exact = taylor_green(2, 3, nu, s.t)?;
                worst = worst.max(sobolev_norm(&s.u.sub(&exact)?, 0.0) / sobolev_norm(&exact, 0.0));
            }
            Ok(worst)
        })();
        tr.record("taylor_green_decay", tg);

        let n = if rng.gen_bool(0.5) { 2 } else { 3 };
        let seed: u64 = rng.gen();
        let heat = (|| -> tns_core::Result<(f64, SpectralVectorField)> {
            let a = iso(n, 1.0)?;
            let lat = FrequencyLattice::new(n, 2);
            let u0 = random_smooth(&lat, seed, 1.0, 1.0)?;
            let traj = solve(&u0, &Forcing::Zero, &a, &SolverConfig::new(2, 1e-3, 0.1).without_convection())?;
            let exact = heat_evolve(&u0, 0.1)?;
            Ok((traj.final_state().u.sub(&exact)?.max_abs(), u0))
        })();
        match heat {
            Ok((d, u0)) => {
                tr.record("heat_reduction", ok(d));
                let scale = 0.5 * sobolev_norm_sq(&u0, 1.0);
                tr.record(
                    "heat_energy_identity",
                    verify_heat_energy_identity(&u0, 0.1, 1.0, 11).map(|r| r / scale.max(f64::MIN_POSITIVE)),
                );
            }
            Err(e) => {
                tr.record("heat_reduction", Err(e.to_string()));
                tr.record("heat_energy_identity", Err(e));
            }
        }

        let run = (|| -> tns_core::Result<(f64, f64)> {
            let a = iso(2, 0.01)?;
            let lat = FrequencyLattice::new(2, 4);
            let u0 = random_smooth(&lat, seed, 3.0, 0.5)?;
            let t = 0.1;
            let traj = solve(&u0, &Forcing::Zero, &a, &SolverConfig::new(4, 1e-3, t))?;
            let r = energy_residual(&traj, &Forcing::Zero, &a, 0.0, t)?;
            let div = traj
                .diagnostics
                .iter()
                .map(|d| d.div_residual)
                .fold(0.0, f64::max);
            Ok((r.abs() / t, div / sobolev_norm(&u0, 1.0)))
        })();
        match run {
            Ok((rate, div)) => {
                tr.record("energy_residual_rate", ok(rate));
                tr.record("divergence_free_states", ok(div));
            }
            Err(e) => {
                tr.record("energy_residual_rate", Err(e.to_string()));
                tr.record("divergence_free_states", Err(e));
            }
        }
    }
}
