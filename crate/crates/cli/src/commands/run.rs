use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use tns_core::galerkin::solve;
use tns_core::Error;

use super::{forcing, initial_data, solver_config, validated_tensor};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::snapshot::save_snapshot;

pub const CSV_HEADER: &str =
    "t,l2_sq,h_half_n_sq,dissipation,force_power,serrin_cumulative,energy_residual_cumulative,div_residual";

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub csv: PathBuf,
    pub rows: usize,
    pub snapshots: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub grid_points: usize,
}

fn snapshot_path(cfg: &RunConfig, step: usize) -> PathBuf {
    cfg.snapshot_dir.join(format!("step_{step:08}.tns"))
}

/// Runs the solver, writes the diagnostics CSV and any requested snapshots.
/// On blow-up the last good state is written to `<snapshot_dir>/last_good.tns`.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunOutcome> {
    let tensor = validated_tensor(cfg)?;
    let u0 = initial_data(cfg)?;
    let f = forcing(cfg)?;
    let sc = solver_config(cfg, &tensor);
    let traj = match solve(&u0, &f, &tensor, &sc) {
        Ok(t) => t,
        Err(Error::BlowUp { t, last_good, .. }) => {
            let path = cfg.snapshot_dir.join("last_good.tns");
            save_snapshot(&last_good.u, last_good.t, &path)?;
            return Err(CliError::BlowUp { t, snapshot: path });
        }
        Err(e) => return Err(e.into()),
    };
    let mut csv = String::with_capacity(200 * traj.diagnostics.len());
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    for d in &traj.diagnostics {
        let row = [
            d.t,
            d.l2_sq,
            d.h_half_n_sq,
            d.dissipation,
            d.force_power,
            d.serrin_cumulative,
            d.energy_residual_cumulative,
            d.div_residual,
        ];
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        let _ = writeln!(csv, "{}", cells.join(","));
    }
    if let Some(dir) = cfg.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(&cfg.output, csv).map_err(|e| CliError::io(&cfg.output, e))?;
    let mut snapshots = Vec::new();
    if cfg.snapshot_every > 0 {
        for state in traj.states.iter().filter(|s| s.step_index % cfg.snapshot_every == 0) {
            let path = snapshot_path(cfg, state.step_index);
            save_snapshot(&state.u, state.t, &path)?;
            snapshots.push(path);
        }
    }
    Ok(RunOutcome {
        csv: cfg.output.clone(),
        rows: traj.diagnostics.len(),
        snapshots,
        warnings: traj.warnings.clone(),
        grid_points: traj.grid_points,
    })
}
