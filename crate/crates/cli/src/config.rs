//! Line-oriented `key = value` run configuration.
//!
//! Blank lines and `#` comments are ignored. Every key may appear once; `--set`
//! overrides from the command line replace file values. Required keys: `scenario`,
//! `m`, `dt`, `t_final`. Everything else has a default, listed on [`RunConfig`].

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use tns_core::analysis::{Regime, ThresholdConstants};
use tns_core::calculus::DealiasMode;
use tns_core::galerkin::scenarios::Scenario;
use tns_core::galerkin::Scheme;

use crate::error::{CliError, Result};

const KEYS: &[&str] = &[
    "n",
    "m",
    "grid_factor",
    "dt",
    "t_final",
    "scheme",
    "dealias",
    "scenario",
    "amplitude",
    "initial_snapshot",
    "tensor",
    "tensor_file",
    "nu0",
    "convection",
    "force",
    "force_amplitude",
    "force_time",
    "seed",
    "output",
    "snapshot_every",
    "snapshot_dir",
    "ellipticity_samples",
    "trials",
    "tol_identity",
    "tol_advection",
    "tol_inequality",
    "regime",
    "c_star",
    "c_tilde_star",
    "c_a",
    "tensor_norm",
    "c_bar",
    "sigma_tilde",
    "commutator_radius",
    "c_star_trials",
    "sweep",
    "sweep_factor",
    "heat_s",
    "commutator_s",
    "commutator_theta",
    "commutator_sigma",
    "c_star_s1",
    "c_star_s2",
    "c_star_m",
];

const REQUIRED: &[&str] = &["scenario", "m", "dt", "t_final"];

#[derive(Clone, Debug, PartialEq)]
pub enum TensorSource {
    /// Tensor description given in the config itself; `;` separates lines.
    Inline(String),
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative tolerance for exact identities (transforms, projections, oracles).
    pub identity: f64,
    /// Relative tolerance for the advection identities.
    pub advection: f64,
    /// Allowed relative overshoot for one-sided inequalities.
    pub inequality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-12,
            advection: 1e-10,
            inequality: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdOptions {
    pub regime: Regime,
    pub constants: ThresholdConstants,
    /// Number of extra runs with `u0` scaled by `sweep_factor^k`.
    pub sweep: usize,
    pub sweep_factor: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantsOptions {
    pub commutator_s: f64,
    pub commutator_theta: f64,
    /// Defaults to one above the convergence threshold.
    pub commutator_sigma: Option<f64>,
    pub c_star_s1: f64,
    pub c_star_s2: f64,
    pub c_star_m: usize,
}

/// A parsed run configuration. Defaults: `n = 2`, `grid_factor = 1`, `scheme = rk4`,
/// `dealias = exact_pad`, `amplitude = 1`, `tensor = isotropic nu=0.01` (or the scenario's
/// own tensor), `convection = true`, `force = none`, `seed = 0`, `output = diagnostics.csv`,
/// `snapshot_every = 0` (off), `snapshot_dir = snapshots`, `ellipticity_samples = 10000`,
/// `trials = 200`, `regime = constant_coeff`, `c_star = c_tilde_star = 1`,
/// `commutator_radius = 128`, `sweep = 0`, `sweep_factor = 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub m: usize,
    pub grid_factor: f64,
    pub dt: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    pub dealias: DealiasMode,
    pub scenario: Scenario,
    pub amplitude: f64,
    pub initial_snapshot: Option<PathBuf>,
    pub tensor: TensorSource,
    /// Whether `tensor` or `tensor_file` was given rather than defaulted.
    pub tensor_explicit: bool,
    pub nu0: Option<f64>,
    pub convection: bool,
    pub force: Option<Scenario>,
    pub force_amplitude: f64,
    pub force_time: Option<Vec<(f64, f64)>>,
    pub seed: u64,
    pub output: PathBuf,
    pub snapshot_every: usize,
    pub snapshot_dir: PathBuf,
    pub ellipticity_samples: usize,
    pub trials: usize,
    pub tolerances: Tolerances,
    pub threshold: ThresholdOptions,
    pub heat_s: Vec<f64>,
    pub constants: ConstantsOptions,
}

struct Entry {
    value: String,
    location: String,
}

struct Table {
    entries: BTreeMap<String, Entry>,
}

impl Table {
    fn raw(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn location(&self, key: &str) -> String {
        self.entries
            .get(key)
            .map_or_else(|| "config".to_string(), |e| e.location.clone())
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<T>()
                .map(Some)
                .map_err(|_| CliError::config(&e.location, format!("malformed value `{}` for `{key}`", e.value))),
        }
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| CliError::config("config", format!("missing required key `{key}`")))
    }

    fn parsed<T, E: std::fmt::Display>(&self, key: &str, f: impl FnOnce(&str) -> std::result::Result<T, E>) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => f(&e.value)
                .map(Some)
                .map_err(|err| CliError::config(&e.location, format!("`{key}`: {err}"))),
        }
    }

    fn positive(&self, key: &str, value: f64) -> Result<f64> {
        if value > 0.0 && value.is_finite() {
            Ok(value)
        } else {
            Err(CliError::config(self.location(key), format!("`{key}` must be positive, got {value}")))
        }
    }
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("expected a boolean, got `{s}`")),
    }
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number `{}`", p.trim())))
        .collect()
}

/// `t:value` pairs separated by commas.
fn parse_time_table(s: &str) -> std::result::Result<Vec<(f64, f64)>, String> {
    s.split(',')
        .map(|p| {
            let (t, v) = p.split_once(':').ok_or_else(|| format!("expected `t:value`, got `{}`", p.trim()))?;
            let t = t.trim().parse::<f64>().map_err(|_| format!("bad time `{}`", t.trim()))?;
            let v = v.trim().parse::<f64>().map_err(|_| format!("bad value `{}`", v.trim()))?;
            Ok((t, v))
        })
        .collect()
}

fn split_line(line: &str) -> Option<&str> {
    let body = line.split('#').next().unwrap_or_default().trim();
    (!body.is_empty()).then_some(body)
}

fn insert(table: &mut Table, key: &str, value: &str, location: String, replace: bool) -> Result<()> {
    if !KEYS.contains(&key) {
        return Err(CliError::config(location, format!("unknown key `{key}`")));
    }
    if !replace {
        if let Some(prev) = table.entries.get(key) {
            return Err(CliError::config(
                location,
                format!("duplicate key `{key}` (first set at {})", prev.location),
            ));
        }
    }
    table.entries.insert(
        key.to_string(),
        Entry {
            value: value.to_string(),
            location,
        },
    );
    Ok(())
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with_overrides(text, &[])
}

/// Parses `text`, then applies `KEY=VALUE` overrides (later ones win).
pub fn parse_config_with_overrides(text: &str, overrides: &[String]) -> Result<RunConfig> {
    build(&read_table(text, overrides)?, true)
}

/// Like [`parse_config_with_overrides`] but with no required keys; used by commands that
/// only need tolerances, seeds or the tensor.
pub fn parse_partial_config(text: &str, overrides: &[String]) -> Result<RunConfig> {
    build(&read_table(text, overrides)?, false)
}

fn read_table(text: &str, overrides: &[String]) -> Result<Table> {
    let mut table = Table {
        entries: BTreeMap::new(),
    };
    for (i, line) in text.lines().enumerate() {
        let Some(body) = split_line(line) else { continue };
        let location = format!("line {}", i + 1);
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| CliError::config(&location, format!("expected `key = value`, got `{body}`")))?;
        insert(&mut table, key.trim(), value.trim(), location, false)?;
    }
    for (i, ov) in overrides.iter().enumerate() {
        let location = format!("override {} (`{ov}`)", i + 1);
        let (key, value) = ov
            .split_once('=')
            .ok_or_else(|| CliError::config(&location, "expected KEY=VALUE"))?;
        insert(&mut table, key.trim(), value.trim(), location, true)?;
    }
    Ok(table)
}

fn build(t: &Table, strict: bool) -> Result<RunConfig> {
    for key in REQUIRED {
        if strict && t.raw(key).is_none() {
            return Err(CliError::config("config", format!("missing required key `{key}`")));
        }
    }
    let n: usize = t.or("n", 2)?;
    if n == 0 {
        return Err(CliError::config(t.location("n"), "`n` must be at least 1"));
    }
    let m: usize = if strict { t.required("m")? } else { t.or("m", 2)? };
    if m == 0 {
        return Err(CliError::config(t.location("m"), "`m` must be at least 1"));
    }
    let grid_factor = t.positive("grid_factor", t.or("grid_factor", 1.0)?)?;
    if grid_factor < 1.0 {
        return Err(CliError::config(
            t.location("grid_factor"),
            format!("grid_factor = {grid_factor} undersizes the alias-free grid for m = {m}; it must be at least 1"),
        ));
    }
    let dt = t.positive("dt", if strict { t.required("dt")? } else { t.or("dt", 1e-3)? })?;
    let t_final = t.positive("t_final", if strict { t.required("t_final")? } else { t.or("t_final", 1.0)? })?;
    let scheme = t.parsed("scheme", Scheme::from_str)?.unwrap_or_default();
    let dealias = t.parsed("dealias", DealiasMode::from_str)?.unwrap_or_default();
    let seed: u64 = t.or("seed", 0)?;
    let scenario = t
        .parsed("scenario", |s| scenario_with_seed(s, seed))?
        .unwrap_or(Scenario::Zero);
    if matches!(scenario, Scenario::TaylorGreen) && (n < 2 || m < 2) {
        return Err(CliError::config(
            t.location("scenario"),
            format!("taylor_green needs n >= 2 and m >= 2 (got n = {n}, m = {m})"),
        ));
    }
    let amplitude: f64 = t.or("amplitude", 1.0)?;
    if !amplitude.is_finite() {
        return Err(CliError::config(t.location("amplitude"), "`amplitude` must be finite"));
    }
    let tensor = match (t.raw("tensor"), t.raw("tensor_file")) {
        (Some(_), Some(_)) => {
            return Err(CliError::config(t.location("tensor_file"), "give either `tensor` or `tensor_file`, not both"))
        }
        (Some(e), None) => TensorSource::Inline(e.value.clone()),
        (None, Some(e)) => TensorSource::File(PathBuf::from(&e.value)),
        (None, None) => TensorSource::Inline(
            if matches!(scenario, Scenario::AnisotropicDemo { .. }) {
                "anisotropic_demo"
            } else {
                "isotropic nu=0.01"
            }
            .to_string(),
        ),
    };
    let nu0 = match t.get::<f64>("nu0")? {
        Some(v) => Some(t.positive("nu0", v)?),
        None => None,
    };
    let force = t.parsed("force", |s| match s {
        "none" => Ok(None),
        other => scenario_with_seed(other, seed).map(Some),
    })?;
    let threshold = ThresholdOptions {
        regime: t.parsed("regime", Regime::from_str)?.unwrap_or(Regime::ConstantCoeff),
        constants: ThresholdConstants {
            c_star: t.positive("c_star", t.or("c_star", 1.0)?)?,
            c_tilde_star: t.positive("c_tilde_star", t.or("c_tilde_star", 1.0)?)?,
            c_a: optional_positive(t, "c_a")?,
            tensor_norm: optional_nonnegative(t, "tensor_norm")?,
            c_bar: optional_nonnegative(t, "c_bar")?,
            sigma_tilde: t.get("sigma_tilde")?,
            commutator_radius: t.or("commutator_radius", 128)?,
            c_star_trials: t.or("c_star_trials", 0)?,
            seed,
        },
        sweep: t.or("sweep", 0)?,
        sweep_factor: t.positive("sweep_factor", t.or("sweep_factor", 2.0)?)?,
    };
    let half = 0.5 * n as f64;
    let constants = ConstantsOptions {
        commutator_s: t.or("commutator_s", 0.0)?,
        commutator_theta: t.or("commutator_theta", 1.0)?,
        commutator_sigma: t.get("commutator_sigma")?,
        c_star_s1: t.or("c_star_s1", half - 0.5)?,
        c_star_s2: t.or("c_star_s2", half - 0.5)?,
        c_star_m: t.or("c_star_m", 3)?,
    };
    let tolerances = Tolerances {
        identity: t.positive("tol_identity", t.or("tol_identity", 1e-12)?)?,
        advection: t.positive("tol_advection", t.or("tol_advection", 1e-10)?)?,
        inequality: t.positive("tol_inequality", t.or("tol_inequality", 1e-12)?)?,
    };
    Ok(RunConfig {
        n,
        m,
        grid_factor,
        dt,
        t_final,
        scheme,
        dealias,
        scenario,
        amplitude,
        initial_snapshot: t.get::<String>("initial_snapshot")?.map(PathBuf::from),
        tensor_explicit: t.raw("tensor").is_some() || t.raw("tensor_file").is_some(),
        tensor,
        nu0,
        convection: t.parsed("convection", parse_bool)?.unwrap_or(true),
        force: force.flatten(),
        force_amplitude: t.or("force_amplitude", 1.0)?,
        force_time: t.parsed("force_time", parse_time_table)?,
        seed,
        output: PathBuf::from(t.or("output", "diagnostics.csv".to_string())?),
        snapshot_every: t.or("snapshot_every", 0)?,
        snapshot_dir: PathBuf::from(t.or("snapshot_dir", "snapshots".to_string())?),
        ellipticity_samples: t.or("ellipticity_samples", tns_core::viscosity::DEFAULT_ELLIPTICITY_SAMPLES)?,
        trials: t.or("trials", 200)?,
        tolerances,
        threshold,
        heat_s: t.parsed("heat_s", parse_list)?.unwrap_or_else(|| vec![half]),
        constants,
    })
}

fn optional_positive(t: &Table, key: &str) -> Result<Option<f64>> {
    match t.get::<f64>(key)? {
        Some(v) => Ok(Some(t.positive(key, v)?)),
        None => Ok(None),
    }
}

fn optional_nonnegative(t: &Table, key: &str) -> Result<Option<f64>> {
    match t.get::<f64>(key)? {
        Some(v) if v >= 0.0 && v.is_finite() => Ok(Some(v)),
        Some(v) => Err(CliError::config(t.location(key), format!("`{key}` must be nonnegative, got {v}"))),
        None => Ok(None),
    }
}

/// Scenario names without an explicit seed pick up the config seed.
fn scenario_with_seed(s: &str, seed: u64) -> tns_core::Result<Scenario> {
    let sc = Scenario::from_str(s)?;
    if s.contains(':') {
        return Ok(sc);
    }
    Ok(match sc {
        Scenario::RandomSmooth { decay, .. } => Scenario::RandomSmooth { seed, decay },
        Scenario::AnisotropicDemo { .. } => Scenario::AnisotropicDemo { seed },
        other => other,
    })
}
