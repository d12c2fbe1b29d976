use std::fmt;

use tns_core::analysis::{existence_threshold, SampledFunction, ThresholdReport};
use tns_core::galerkin::Forcing;
use tns_core::spectral::sobolev_norm_sq;

use super::{forcing, initial_data, validated_tensor};
use crate::config::RunConfig;
use crate::error::Result;

/// Samples of `||f(t)||^2_{H^{n/2-2}}` used for the force integral of a modulated force.
const FORCE_SAMPLES: usize = 1001;

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdOutcome {
    /// `(scale of u0, report)`; the first entry is the configured data.
    pub reports: Vec<(f64, ThresholdReport)>,
}

impl ThresholdOutcome {
    pub fn base(&self) -> &ThresholdReport {
        &self.reports[0].1
    }

    /// `T_star_max` does not grow as the data is scaled up.
    pub fn sweep_nonincreasing(&self) -> bool {
        self.reports.windows(2).all(|w| w[1].1.t_star_max <= w[0].1.t_star_max)
    }

    pub fn passed(&self) -> bool {
        self.base().satisfied() && self.sweep_nonincreasing()
    }
}

fn force_norms(f: &Forcing, n: usize, t_final: f64) -> Result<SampledFunction> {
    let s = 0.5 * n as f64 - 2.0;
    Ok(match f {
        Forcing::Zero => SampledFunction::zero(),
        Forcing::Steady(g) => SampledFunction::constant(sobolev_norm_sq(g, s)),
        Forcing::Modulated { field, table } => {
            let base = sobolev_norm_sq(field, s);
            let pts = (0..FORCE_SAMPLES)
                .map(|i| {
                    let t = t_final * i as f64 / (FORCE_SAMPLES - 1) as f64;
                    (t, table.value(t).powi(2) * base)
                })
                .collect();
            SampledFunction::new(pts)?
        }
    })
}

pub fn cmd_threshold(cfg: &RunConfig) -> Result<ThresholdOutcome> {
    let a = validated_tensor(cfg)?;
    let u0 = initial_data(cfg)?;
    let f_sq = force_norms(&forcing(cfg)?, cfg.n, cfg.t_final)?;
    let opts = &cfg.threshold;
    let mut reports = Vec::with_capacity(opts.sweep + 1);
    for k in 0..=opts.sweep {
        let scale = opts.sweep_factor.powi(k as i32);
        let r = existence_threshold(&u0.scaled(scale), &f_sq, &a, cfg.t_final, opts.regime, &opts.constants)?;
        reports.push((scale, r));
    }
    Ok(ThresholdOutcome { reports })
}

pub fn format_report(r: &ThresholdReport) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.6e}"));
    let rows: [(&str, String); 20] = [
        ("regime", r.regime.to_string()),
        ("label", r.label.to_string()),
        ("C_A", format!("{:.6e}", r.c_a)),
        ("C_A_sampled", opt(r.c_a_sampled)),
        ("C_star", format!("{:.6e}", r.c_star)),
        ("C_star_lower_bound", opt(r.c_star_lower_bound)),
        ("C_tilde_star", format!("{:.6e}", r.c_tilde_star)),
        ("C_bar", format!("{:.6e}", r.c_bar)),
        ("sigma_tilde", format!("{}", r.sigma_tilde)),
        ("tensor_norm", format!("{:.6e}", r.tensor_norm)),
        ("A1", format!("{:.6e}", r.a1)),
        ("A2", format!("{:.6e}", r.a2)),
        ("A3", format!("{:.6e}", r.a3)),
        ("u0_norm_sq", format!("{:.6e}", r.u0_norm_sq)),
        ("T_star", format!("{}", r.t_star)),
        ("force_integral", format!("{:.6e}", r.force_integral)),
        ("heat_integral", format!("{:.6e}", r.heat_integral)),
        ("lhs", format!("{:.6e}", r.lhs)),
        ("margin", format!("{:.6e}", r.margin)),
        ("T_star_max", format!("{:.6e}", r.t_star_max)),
    ];
    rows.iter().map(|(k, v)| format!("{k:<20} {v}")).collect::<Vec<_>>().join("\n")
}

impl fmt::Display for ThresholdOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", format_report(self.base()))?;
        writeln!(f, "condition {}", if self.base().satisfied() { "satisfied" } else { "violated" })?;
        if self.reports.len() > 1 {
            writeln!(f, "sweep: scale  u0_norm_sq  margin  T_star_max")?;
            for (s, r) in &self.reports {
                writeln!(f, "  {s:<10} {:.6e} {:.6e} {:.6e}", r.u0_norm_sq, r.margin, r.t_star_max)?;
            }
            write!(
                f,
                "T_star_max {}",
                if self.sweep_nonincreasing() { "nonincreasing" } else { "INCREASES along the sweep" }
            )?;
        }
        Ok(())
    }
}
