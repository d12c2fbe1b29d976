use std::fmt;

use tns_core::heat::{heat_profile, verify_heat_energy_identity, HeatProfile};

use super::initial_data;
use crate::config::RunConfig;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct HeatOutcome {
    pub profiles: Vec<HeatProfile>,
    /// `(r, worst defect)` of the energy identity in `H^r` on the step grid.
    pub identity: Vec<(f64, f64)>,
}

/// Heat integrals of the configured initial data for every `heat_s`, plus the energy identity
/// checked at `steps + 1` times of `[0, t_final]`.
pub fn cmd_heat(cfg: &RunConfig) -> Result<HeatOutcome> {
    let u0 = initial_data(cfg)?;
    let steps = ((cfg.t_final / cfg.dt).round() as usize).max(1) + 1;
    let mut profiles = Vec::new();
    let mut identity = Vec::new();
    for &s in &cfg.heat_s {
        profiles.push(heat_profile(&u0, cfg.t_final, s)?);
        identity.push((s, verify_heat_energy_identity(&u0, cfg.t_final, s, steps)?));
    }
    Ok(HeatOutcome { profiles, identity })
}

impl fmt::Display for HeatOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "s          T          int_0^T ||K u0||^2_H^s   bound ||u0||^2_H^(s-1)   identity defect")?;
        for (p, (_, d)) in self.profiles.iter().zip(&self.identity) {
            writeln!(
                f,
                "{:<10} {:<10} {:<24.12e} {:<24.12e} {:.3e}",
                p.s, p.t_final, p.value, p.tail_bound, d
            )?;
        }
        Ok(())
    }
}
