//! Text format for viscosity tensors.
//!
//! One directive per line (`;` also separates lines, for inline use); `#` starts a comment.
//! Directives add up, so a base tensor can be combined with extra entries.
//!
//! ```text
//! isotropic nu=0.01             # nu (delta_kj delta_ab + delta_kb delta_aj)
//! anisotropic_demo              # the built-in non-isotropic example
//! entry 1 2 1 2 const 0.003     # a_{12}^{12} += 0.003 (indices are 1-based: k j alpha beta)
//! entry 1 1 1 1 cos 0.002 1 0   # a_{11}^{11} += 0.002 cos(2 pi (x1))
//! entry 1 1 1 1 sin 0.001 0 2   # a_{11}^{11} += 0.001 sin(2 pi (2 x2))
//! time 0 1                      # time factor table: theta(0) = 1
//! time 1 0.5                    #                    theta(1) = 0.5
//! ```
//!
//! Entries are taken as written; nothing is symmetrized, so a listing that breaks the
//! tensor symmetries is rejected when the tensor is validated.

use std::collections::BTreeMap;

use tns_core::spectral::{resize_scalar, FrequencyLattice, SpectralScalarField};
use tns_core::viscosity::{Coefficient, TimeTable, ViscosityTensor};

use crate::error::{CliError, Result};

enum Term {
    Const(f64),
    Cos(f64, Vec<i32>),
    Sin(f64, Vec<i32>),
}

fn add_coefficients(a: &Coefficient, b: &Coefficient) -> Coefficient {
    match (a, b) {
        (Coefficient::Constant(x), Coefficient::Constant(y)) => Coefficient::Constant(x + y),
        _ => {
            let m = a.bandwidth().max(b.bandwidth());
            let as_field = |c: &Coefficient, n: usize| match c {
                Coefficient::Constant(v) => SpectralScalarField::constant(&FrequencyLattice::new(n, m), *v),
                Coefficient::Field(g) => resize_scalar(g, m),
            };
            let n = match (a, b) {
                (Coefficient::Field(g), _) | (_, Coefficient::Field(g)) => g.lattice().dim(),
                _ => unreachable!(),
            };
            Coefficient::Field(as_field(a, n).add(&as_field(b, n)).expect("shared lattice"))
        }
    }
}

fn term_coefficient(n: usize, term: &Term) -> Result<Coefficient> {
    let field = |amp: f64, xi: &[i32], sine: bool| {
        let m = xi.iter().map(|&c| (c as i64 * c as i64) as f64).sum::<f64>().sqrt().ceil() as usize;
        let lat = FrequencyLattice::new(n, m.max(1));
        let g = if sine {
            SpectralScalarField::sin_mode(&lat, xi, amp)
        } else {
            SpectralScalarField::cos_mode(&lat, xi, amp)
        };
        g.map(Coefficient::Field)
    };
    Ok(match term {
        Term::Const(v) => Coefficient::Constant(*v),
        Term::Cos(amp, xi) => field(*amp, xi, false)?,
        Term::Sin(amp, xi) => field(*amp, xi, true)?,
    })
}

fn number<T: std::str::FromStr>(tok: Option<&str>, what: &str, loc: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| CliError::config(loc, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| CliError::config(loc, format!("bad {what} `{tok}`")))
}

/// Parses a tensor description for dimension `n`. The result is not yet validated.
pub fn parse_tensor_spec(text: &str, n: usize) -> Result<ViscosityTensor> {
    let mut base: Option<ViscosityTensor> = None;
    let mut terms: BTreeMap<[usize; 4], Vec<Term>> = BTreeMap::new();
    let mut table: Vec<(f64, f64)> = Vec::new();
    let lines = text.split(['\n', ';']).enumerate();
    for (i, line) in lines {
        let body = line.split('#').next().unwrap_or_default().trim();
        if body.is_empty() {
            continue;
        }
        let loc = format!("tensor line {}", i + 1);
        let mut toks = body.split_whitespace();
        let head = toks.next().unwrap_or_default();
        let add_base = |base: &mut Option<ViscosityTensor>, t: ViscosityTensor| {
            *base = Some(match base.take() {
                None => t,
                Some(b) => {
                    let mut out = b;
                    for k in 0..n {
                        for j in 0..n {
                            for a in 0..n {
                                for bb in 0..n {
                                    let c = add_coefficients(out.entry(k, j, a, bb), t.entry(k, j, a, bb));
                                    out.set_entry(k, j, a, bb, c);
                                }
                            }
                        }
                    }
                    out
                }
            });
        };
        match head {
            "isotropic" => {
                let arg = toks.next().unwrap_or_default();
                let nu = arg
                    .strip_prefix("nu=")
                    .ok_or_else(|| CliError::config(&loc, format!("expected `isotropic nu=<value>`, got `{body}`")))?;
                let nu: f64 = number(Some(nu), "viscosity", &loc)?;
                add_base(&mut base, ViscosityTensor::isotropic(n, nu));
            }
            "anisotropic_demo" => add_base(&mut base, ViscosityTensor::anisotropic_demo(n)),
            "entry" => {
                let mut idx = [0usize; 4];
                for slot in idx.iter_mut() {
                    let v: usize = number(toks.next(), "tensor index", &loc)?;
                    if v == 0 || v > n {
                        return Err(CliError::config(&loc, format!("tensor index {v} outside 1..={n}")));
                    }
                    *slot = v - 1;
                }
                let kind = toks.next().unwrap_or_default();
                let term = match kind {
                    "const" => Term::Const(number(toks.next(), "constant", &loc)?),
                    "cos" | "sin" => {
                        let amp: f64 = number(toks.next(), "amplitude", &loc)?;
                        let xi = (0..n)
                            .map(|_| number::<i32>(toks.next(), "frequency component", &loc))
                            .collect::<Result<Vec<_>>>()?;
                        if kind == "cos" {
                            Term::Cos(amp, xi)
                        } else {
                            Term::Sin(amp, xi)
                        }
                    }
                    other => {
                        return Err(CliError::config(
                            &loc,
                            format!("entry kind must be `const`, `cos` or `sin`, got `{other}`"),
                        ))
                    }
                };
                terms.entry(idx).or_default().push(term);
            }
            "time" => {
                let t: f64 = number(toks.next(), "time", &loc)?;
                let v: f64 = number(toks.next(), "time factor", &loc)?;
                table.push((t, v));
            }
            other => return Err(CliError::config(&loc, format!("unknown tensor directive `{other}`"))),
        }
        if let Some(extra) = toks.next() {
            return Err(CliError::config(&loc, format!("unexpected trailing `{extra}`")));
        }
    }
    let mut tensor = base.unwrap_or_else(|| ViscosityTensor::zero(n));
    for (idx, list) in &terms {
        let mut c = tensor.entry(idx[0], idx[1], idx[2], idx[3]).clone();
        for term in list {
            c = add_coefficients(&c, &term_coefficient(n, term)?);
        }
        tensor.set_entry(idx[0], idx[1], idx[2], idx[3], c);
    }
    if !table.is_empty() {
        tensor = tensor.with_time_factor(TimeTable::new(table)?);
    }
    Ok(tensor)
}
