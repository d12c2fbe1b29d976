use std::fmt;

use tns_core::analysis::commutator::sigma_tilde_0;
use tns_core::analysis::{commutator_constant, estimate_multiplication_constant, CommutatorReport};

use crate::config::RunConfig;
use crate::error::Result;

/// Random pairs for the `C*` estimate when `c_star_trials` is left at 0.
const DEFAULT_C_STAR_TRIALS: usize = 50;

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantsOutcome {
    pub commutator: CommutatorReport,
    pub c_star_lower_bound: f64,
    pub c_star_trials: usize,
}

pub fn cmd_constants(cfg: &RunConfig) -> Result<ConstantsOutcome> {
    let o = &cfg.constants;
    let sigma = o
        .commutator_sigma
        .unwrap_or_else(|| sigma_tilde_0(o.commutator_s, o.commutator_theta, cfg.n) + 1.0);
    let commutator = commutator_constant(
        o.commutator_s,
        o.commutator_theta,
        sigma,
        cfg.n,
        cfg.threshold.constants.commutator_radius,
    )?;
    let trials = match cfg.threshold.constants.c_star_trials {
        0 => DEFAULT_C_STAR_TRIALS,
        t => t,
    };
    let c_star_lower_bound = estimate_multiplication_constant(o.c_star_s1, o.c_star_s2, cfg.n, o.c_star_m, trials, cfg.seed)?;
    Ok(ConstantsOutcome {
        commutator,
        c_star_lower_bound,
        c_star_trials: trials,
    })
}

impl fmt::Display for ConstantsOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.commutator;
        writeln!(f, "commutator constant      {:.12e}", c.value)?;
        writeln!(f, "  at half radius         {:.12e}", c.value_half_radius)?;
        writeln!(f, "  relative change        {:.3e}", c.relative_change)?;
        writeln!(f, "  radius                 {}", c.radius)?;
        writeln!(f, "  raw sums (R, R/2)      {:.12e} {:.12e}", c.raw_sum, c.raw_sum_half_radius)?;
        writeln!(f, "  tail estimate          {:.6e}", c.tail)?;
        writeln!(f, "  sigma_tilde_0          {}", c.sigma_tilde_0)?;
        write!(
            f,
            "C* lower bound           {:.6e} ({} random pairs)",
            self.c_star_lower_bound, self.c_star_trials
        )
    }
}
