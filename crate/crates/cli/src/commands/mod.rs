//! Subcommand implementations. Each returns a report; `main` turns it into text and an exit status.

pub mod constants;
pub mod heat;
pub mod run;
pub mod threshold;
pub mod verify;

use std::fs;

use tns_core::galerkin::{Forcing, SolverConfig};
use tns_core::spectral::{nice_size, SpectralVectorField};
use tns_core::viscosity::{TimeTable, ViscosityTensor};

use crate::config::{RunConfig, TensorSource};
use crate::error::{CliError, Result};
use crate::snapshot::load_snapshot_for;
use crate::tensor_spec::parse_tensor_spec;

/// The configured tensor, parsed but not validated.
pub fn load_tensor(cfg: &RunConfig) -> Result<ViscosityTensor> {
    match &cfg.tensor {
        TensorSource::Inline(text) => parse_tensor_spec(text, cfg.n),
        TensorSource::File(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            parse_tensor_spec(&text, cfg.n)
        }
    }
}

/// The configured tensor after the symmetry check and ellipticity sampling.
pub fn validated_tensor(cfg: &RunConfig) -> Result<ViscosityTensor> {
    Ok(load_tensor(cfg)?.validate(cfg.ellipticity_samples, cfg.seed)?)
}

pub fn initial_data(cfg: &RunConfig) -> Result<SpectralVectorField> {
    match &cfg.initial_snapshot {
        Some(path) => Ok(load_snapshot_for(path, cfg.n)?.0),
        None => Ok(cfg.scenario.initial(cfg.n, cfg.m, cfg.amplitude)?),
    }
}

pub fn forcing(cfg: &RunConfig) -> Result<Forcing> {
    let Some(sc) = &cfg.force else {
        return Ok(Forcing::Zero);
    };
    let field = sc.initial(cfg.n, cfg.m, cfg.force_amplitude)?;
    Ok(match &cfg.force_time {
        None => Forcing::Steady(field),
        Some(points) => Forcing::Modulated {
            field,
            table: TimeTable::new(points.clone())?,
        },
    })
}

/// Solver settings; `grid_factor` scales the minimal alias-free product grid.
pub fn solver_config(cfg: &RunConfig, tensor: &ViscosityTensor) -> SolverConfig {
    let mut sc = SolverConfig::new(cfg.m, cfg.dt, cfg.t_final)
        .with_scheme(cfg.scheme)
        .with_dealias(cfg.dealias);
    if !cfg.convection {
        sc = sc.without_convection();
    }
    sc.nu0 = cfg.nu0;
    if cfg.grid_factor > 1.0 {
        let m = cfg.m;
        let min = cfg
            .dealias
            .min_points(2 * m, m)
            .max(cfg.dealias.min_points(m + tensor.bandwidth(), m));
        sc.grid_points = Some(nice_size((cfg.grid_factor * min as f64).ceil() as usize));
    }
    sc
}
