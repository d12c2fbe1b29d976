use std::f64::consts::TAU;
use std::str::FromStr;

use crate::analysis::diagnostics::{DiagnosticsRecord, Instant};
use crate::calculus::{advect_on_grid, gradient_project, invert_gradient, leray_project, DealiasMode};
use crate::error::{Error, Result};
use crate::spectral::{
    project_zero_mean, resize_vector, sobolev_norm, truncate_modes, Spectral, SpectralScalarField,
    SpectralVectorField,
};
use crate::viscosity::{TimeTable, ViscosityTensor};

/// Coefficient size treated as overflow.
const BLOW_UP_LEVEL: f64 = 1e150;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    Rk4,
    /// Lawson integrating-factor RK4 with `nu0 * Laplacian` integrated exactly.
    Ifrk4,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Rk4 => "rk4",
            Scheme::Ifrk4 => "ifrk4",
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Scheme::Rk4),
            "ifrk4" => Ok(Scheme::Ifrk4),
            other => Err(Error::InvalidArgument(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Momentum source `f(x, t)`.
#[derive(Clone, Debug, Default)]
pub enum Forcing {
    #[default]
    Zero,
    Steady(SpectralVectorField),
    /// `theta(t) f0(x)`.
    Modulated { field: SpectralVectorField, table: TimeTable },
}

impl Forcing {
    pub fn at(&self, t: f64) -> Option<SpectralVectorField> {
        match self {
            Forcing::Zero => None,
            Forcing::Steady(f) => Some(f.clone()),
            Forcing::Modulated { field, table } => Some(field.scaled(table.value(t))),
        }
    }

    fn field(&self) -> Option<&SpectralVectorField> {
        match self {
            Forcing::Zero => None,
            Forcing::Steady(f) | Forcing::Modulated { field: f, .. } => Some(f),
        }
    }

    /// Same forcing with its field re-expressed on radius `m`.
    fn truncated(&self, m: usize) -> Forcing {
        let cut = |f: &SpectralVectorField| truncate_modes(&resize_vector(f, m), m);
        match self {
            Forcing::Zero => Forcing::Zero,
            Forcing::Steady(f) => Forcing::Steady(cut(f)),
            Forcing::Modulated { field, table } => Forcing::Modulated {
                field: cut(field),
                table: table.clone(),
            },
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        if let Some(f) = self.field() {
            if f.dim() != n {
                return Err(Error::ComponentCount { expected: n, got: f.dim() });
            }
            let z = f.lattice().zero_slot();
            let mean = f
                .components()
                .iter()
                .map(|c| c.coeffs()[z].norm())
                .fold(0.0, f64::max);
            if mean > 0.0 {
                return Err(Error::NonzeroMean { mean });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverState {
    pub t: f64,
    pub u: SpectralVectorField,
    pub step_index: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub m: usize,
    pub dt: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    pub dealias: DealiasMode,
    /// Include `(u . grad) u`; switching it off leaves the linear Stokes flow.
    pub convection: bool,
    /// Explicit product grid; must meet the dealias requirement.
    pub grid_points: Option<usize>,
    /// Exactly integrated isotropic part for `ifrk4`; defaults to the tensor's isotropic projection.
    pub nu0: Option<f64>,
    /// Extra Sobolev indices recorded in every diagnostics row.
    pub extra_sobolev: Vec<f64>,
}

impl SolverConfig {
    pub fn new(m: usize, dt: f64, t_final: f64) -> Self {
        Self {
            m,
            dt,
            t_final,
            scheme: Scheme::Rk4,
            dealias: DealiasMode::ExactPad,
            convection: true,
            grid_points: None,
            nu0: None,
            extra_sobolev: Vec::new(),
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_dealias(mut self, dealias: DealiasMode) -> Self {
        self.dealias = dealias;
        self
    }

    pub fn without_convection(mut self) -> Self {
        self.convection = false;
        self
    }

    /// Number of steps; `t_final` must be a whole multiple of `dt`.
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::Config(format!("t_final must be positive, got {}", self.t_final)));
        }
        let k = (self.t_final / self.dt).round();
        if (k * self.dt - self.t_final).abs() > 1e-9 * self.t_final || k < 1.0 {
            return Err(Error::Config(format!(
                "t_final = {} is not a whole number of steps of dt = {}",
                self.t_final, self.dt
            )));
        }
        Ok(k as usize)
    }
}

/// Largest stable `dt` for explicit RK4: `0.5 / (nu_max (2 pi m)^2)`.
pub fn stability_cap(a: &ViscosityTensor, m: usize) -> f64 {
    let nu = a.max_viscosity();
    if nu <= 0.0 {
        f64::INFINITY
    } else {
        0.5 / (nu * (TAU * m as f64).powi(2))
    }
}

/// Right-hand side `P_m P_sigma [f + L u - (u . grad) u]` with fixed grids.
pub struct GalerkinSystem<'a> {
    a: &'a ViscosityTensor,
    forcing: Forcing,
    convection: bool,
    convect_points: usize,
    operator_points: usize,
    dealias: DealiasMode,
    m: usize,
}

impl<'a> GalerkinSystem<'a> {
    pub fn new(a: &'a ViscosityTensor, forcing: &Forcing, config: &SolverConfig) -> Result<Self> {
        let m = config.m;
        if m < 1 {
            return Err(Error::Config("lattice radius m must be at least 1".into()));
        }
        forcing.check(a.dim())?;
        let need_convect = config.dealias.min_points(2 * m, m);
        let need_operator = if a.is_constant() {
            0
        } else {
            config.dealias.min_points(m + a.bandwidth(), m)
        };
        let (convect_points, operator_points) = match config.grid_points {
            Some(p) => {
                let need = need_convect.max(need_operator);
                if p < need {
                    return Err(Error::Config(format!(
                        "grid of {p} points per axis is too small for m = {m} with tensor bandwidth {} under {} dealiasing (need {need})",
                        a.bandwidth(),
                        config.dealias.as_str()
                    )));
                }
                (p, p)
            }
            None => (
                config.dealias.points(2 * m, m),
                a.product_points(m, config.dealias),
            ),
        };
        Ok(Self {
            a,
            forcing: forcing.truncated(m),
            convection: config.convection,
            convect_points,
            operator_points,
            dealias: config.dealias,
            m,
        })
    }

    pub fn grid_points(&self) -> usize {
        self.convect_points.max(if self.a.is_constant() { 0 } else { self.operator_points })
    }

    pub fn forcing_at(&self, t: f64) -> Option<SpectralVectorField> {
        self.forcing.at(t)
    }

    /// `f + L u - (u . grad) u` before projection.
    pub fn momentum(&self, u: &SpectralVectorField, t: f64) -> Result<SpectralVectorField> {
        let mut rhs = self.a.apply_operator_l_on_grid(u, t, self.operator_points)?;
        if self.convection {
            let c = advect_on_grid(u, u, self.convect_points)?;
            rhs.axpy(-1.0, &project_zero_mean(&c));
        }
        if let Some(f) = self.forcing.at(t) {
            rhs.axpy(1.0, &f);
        }
        Ok(rhs)
    }

    pub fn eval(&self, u: &SpectralVectorField, t: f64) -> Result<SpectralVectorField> {
        Ok(truncate_modes(&leray_project(&self.momentum(u, t)?)?, self.m))
    }

    fn diagnostics(&self, u: &SpectralVectorField, t: f64, extra: &[f64]) -> Result<Instant> {
        let n = u.dim() as f64;
        let f = self.forcing.at(t);
        Ok(Instant {
            t,
            l2_sq: sobolev_norm(u, 0.0).powi(2),
            h_half_n_sq: sobolev_norm(u, 0.5 * n).powi(2),
            hs_sq: extra.iter().map(|&s| (s, sobolev_norm(u, s).powi(2))).collect(),
            dissipation: self.a.bilinear_form(t, u, u, self.dealias)?,
            force_power: f.map_or(0.0, |f| crate::spectral::dual_pairing(&f, u)),
            div_residual: crate::calculus::divergence_residual(u),
        })
    }
}

/// `P_m P_sigma [f(t) + L u - (u . grad) u]` with default grids.
pub fn galerkin_rhs(
    state: &SolverState,
    forcing: &Forcing,
    a: &ViscosityTensor,
    m: usize,
    dealias: DealiasMode,
) -> Result<SpectralVectorField> {
    let config = SolverConfig::new(m, 1.0, 1.0).with_dealias(dealias);
    let sys = GalerkinSystem::new(a, forcing, &config)?;
    sys.eval(&resize_vector(&state.u, m), state.t)
}

/// One time step of a fixed scheme on a fixed system.
pub struct Stepper<'a> {
    system: GalerkinSystem<'a>,
    scheme: Scheme,
    nu0: f64,
}

impl<'a> Stepper<'a> {
    pub fn new(a: &'a ViscosityTensor, forcing: &Forcing, config: &SolverConfig) -> Result<Self> {
        let nu0 = config.nu0.unwrap_or_else(|| a.isotropic_projection());
        if !nu0.is_finite() || nu0 < 0.0 {
            return Err(Error::Config(format!("nu0 must be nonnegative, got {nu0}")));
        }
        Ok(Self {
            system: GalerkinSystem::new(a, forcing, config)?,
            scheme: config.scheme,
            nu0,
        })
    }

    pub fn system(&self) -> &GalerkinSystem<'a> {
        &self.system
    }

    pub fn nu0(&self) -> f64 {
        self.nu0
    }

    /// Exact `exp(nu0 * Laplacian * h)`.
    fn heat(&self, u: &SpectralVectorField, h: f64) -> SpectralVectorField {
        let lat = u.lattice().clone();
        let nu0 = self.nu0;
        u.map_coeffs(|s, c| c * (-nu0 * TAU * TAU * lat.norm_sq(s) as f64 * h).exp())
    }

    /// Right-hand side minus the exactly integrated part.
    fn nonlinear(&self, u: &SpectralVectorField, t: f64) -> Result<SpectralVectorField> {
        let mut r = self.system.eval(u, t)?;
        if self.nu0 != 0.0 {
            let lat = u.lattice().clone();
            let nu0 = self.nu0;
            let lap = u.map_coeffs(|s, c| c * (-nu0 * TAU * TAU * lat.norm_sq(s) as f64));
            r.axpy(-1.0, &lap);
        }
        Ok(r)
    }

    /// Advances by `dt`; returns the new state and the L2 size of the solenoidal re-projection.
    pub fn step(&self, state: &SolverState, dt: f64) -> Result<(SolverState, f64)> {
        let (t, u, h) = (state.t, &state.u, dt);
        let next = match self.scheme {
            Scheme::Rk4 => {
                let f = |v: &SpectralVectorField, s: f64| self.system.eval(v, s);
                let k1 = f(u, t)?;
                let mut y = u.clone();
                y.axpy(0.5 * h, &k1);
                let k2 = f(&y, t + 0.5 * h)?;
                let mut y = u.clone();
                y.axpy(0.5 * h, &k2);
                let k3 = f(&y, t + 0.5 * h)?;
                let mut y = u.clone();
                y.axpy(h, &k3);
                let k4 = f(&y, t + h)?;
                let mut out = u.clone();
                out.axpy(h / 6.0, &k1);
                out.axpy(h / 3.0, &k2);
                out.axpy(h / 3.0, &k3);
                out.axpy(h / 6.0, &k4);
                out
            }
            Scheme::Ifrk4 => {
                let n = |v: &SpectralVectorField, s: f64| self.nonlinear(v, s);
                let eu = self.heat(u, h);
                let e2u = self.heat(u, 0.5 * h);
                let nu = n(u, t)?;
                let mut a = u.clone();
                a.axpy(0.5 * h, &nu);
                let a = self.heat(&a, 0.5 * h);
                let na = n(&a, t + 0.5 * h)?;
                let mut b = e2u.clone();
                b.axpy(0.5 * h, &na);
                let nb = n(&b, t + 0.5 * h)?;
                let mut c = eu.clone();
                c.axpy(h, &self.heat(&nb, 0.5 * h));
                let nc = n(&c, t + h)?;
                let mut mid = na;
                mid.axpy(1.0, &nb);
                let mut out = eu;
                out.axpy(h / 6.0, &self.heat(&nu, h));
                out.axpy(h / 3.0, &self.heat(&mid, 0.5 * h));
                out.axpy(h / 6.0, &nc);
                out
            }
        };
        let t_next = state.t + dt;
        if next.has_non_finite() || next.max_abs() > BLOW_UP_LEVEL {
            return Err(Error::BlowUp {
                t: t_next,
                max_norm_history: vec![(state.t, state.u.max_abs())],
                last_good: Box::new(state.clone()),
            });
        }
        let projected = leray_project(&project_zero_mean(&next))?;
        let correction = sobolev_norm(&next.sub(&projected)?, 0.0);
        Ok((
            SolverState {
                t: t_next,
                u: projected,
                step_index: state.step_index + 1,
            },
            correction,
        ))
    }
}

/// Single step with a freshly built system (convenience wrapper around [`Stepper`]).
pub fn step(
    state: &SolverState,
    dt: f64,
    scheme: Scheme,
    forcing: &Forcing,
    a: &ViscosityTensor,
    dealias: DealiasMode,
) -> Result<SolverState> {
    let m = state.u.lattice().radius();
    let config = SolverConfig::new(m, dt, dt).with_scheme(scheme).with_dealias(dealias);
    Ok(Stepper::new(a, forcing, &config)?.step(state, dt)?.0)
}

/// Time-ordered solver output.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub scheme: Scheme,
    pub dealias: DealiasMode,
    pub dt: f64,
    pub grid_points: usize,
    pub nu0: f64,
    pub convection: bool,
    pub states: Vec<SolverState>,
    pub diagnostics: Vec<DiagnosticsRecord>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn final_state(&self) -> &SolverState {
        self.states.last().expect("trajectory holds the initial state")
    }

    /// Index of the stored state at time `t` (within a tiny fraction of `dt`).
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let k = (t / self.dt).round();
        if k < 0.0 || (k * self.dt - t).abs() > 1e-9 * self.dt.max(t.abs()) {
            return None;
        }
        let k = k as usize;
        (k < self.states.len()).then_some(k)
    }
}

/// Integrates from `P_sigma P_m u0` on `[0, T]`, recording diagnostics every step.
pub fn solve(
    u0: &SpectralVectorField,
    forcing: &Forcing,
    a: &ViscosityTensor,
    config: &SolverConfig,
) -> Result<Trajectory> {
    if u0.dim() != a.dim() {
        return Err(Error::ComponentCount {
            expected: a.dim(),
            got: u0.dim(),
        });
    }
    a.ellipticity_constant()?;
    let steps = config.steps()?;
    let mut warnings = Vec::new();
    let cap = stability_cap(a, config.m);
    if config.dt > cap {
        let msg = format!("dt = {} exceeds the explicit stability cap {cap:.6e} for m = {}", config.dt, config.m);
        match config.scheme {
            Scheme::Rk4 => return Err(Error::Config(msg)),
            Scheme::Ifrk4 => warnings.push(msg),
        }
    }
    let stepper = Stepper::new(a, forcing, config)?;
    let m = config.m;
    let start = truncate_modes(&resize_vector(u0, m), m);
    let start = leray_project(&project_zero_mean(&start))?;
    let mut state = SolverState {
        t: 0.0,
        u: start,
        step_index: 0,
    };
    let extra = &config.extra_sobolev;
    let mut acc = crate::analysis::diagnostics::Accumulator::new(stepper.system().diagnostics(&state.u, 0.0, extra)?);
    let mut diagnostics = vec![acc.record(0.0)];
    let mut states = Vec::with_capacity(steps + 1);
    let mut history = vec![(0.0, state.u.max_abs())];
    states.push(state.clone());
    for _ in 0..steps {
        let (next, correction) = match stepper.step(&state, config.dt) {
            Ok(x) => x,
            Err(Error::BlowUp { t, last_good, .. }) => {
                return Err(Error::BlowUp {
                    t,
                    max_norm_history: history,
                    last_good,
                })
            }
            Err(e) => return Err(e),
        };
        state = next;
        state.t = state.step_index as f64 * config.dt;
        history.push((state.t, state.u.max_abs()));
        let inst = stepper.system().diagnostics(&state.u, state.t, extra)?;
        acc.push(inst);
        diagnostics.push(acc.record(correction));
        states.push(state.clone());
    }
    Ok(Trajectory {
        scheme: config.scheme,
        dealias: config.dealias,
        dt: config.dt,
        grid_points: stepper.system().grid_points(),
        nu0: stepper.nu0(),
        convection: config.convection,
        states,
        diagnostics,
        warnings,
    })
}

/// Zero-mean `p` with `grad p = P_g [f + L u - (u . grad) u]`.
pub fn recover_pressure(
    u: &SpectralVectorField,
    forcing: &Forcing,
    a: &ViscosityTensor,
    t: f64,
    dealias: DealiasMode,
) -> Result<SpectralScalarField> {
    let m = u.lattice().radius();
    let config = SolverConfig::new(m, 1.0, 1.0).with_dealias(dealias);
    let sys = GalerkinSystem::new(a, forcing, &config)?;
    let f = sys.momentum(u, t)?;
    invert_gradient(&gradient_project(&project_zero_mean(&f))?)
}
