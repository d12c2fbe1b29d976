//! Named initial data and tensors.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::calculus::leray_project;
use crate::error::{Error, Result};
use crate::spectral::{sobolev_norm, FrequencyLattice, SpectralScalarField, SpectralVectorField};
use crate::viscosity::ViscosityTensor;

use super::basis::polarizations;

#[derive(Clone, Debug, PartialEq)]
pub enum Scenario {
    TaylorGreen,
    SingleStokesMode,
    RandomSmooth { seed: u64, decay: f64 },
    AnisotropicDemo { seed: u64 },
    Zero,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::TaylorGreen => "taylor_green",
            Scenario::SingleStokesMode => "single_stokes_mode",
            Scenario::RandomSmooth { .. } => "random_smooth",
            Scenario::AnisotropicDemo { .. } => "anisotropic_demo",
            Scenario::Zero => "zero",
        }
    }

    /// Initial velocity on the lattice of radius `m`, scaled by `amplitude`
    /// (the L2 norm for random data).
    pub fn initial(&self, n: usize, m: usize, amplitude: f64) -> Result<SpectralVectorField> {
        let lat = FrequencyLattice::new(n, m);
        match self {
            Scenario::TaylorGreen => Ok(taylor_green(n, m, 0.0, 0.0)?.scaled(amplitude)),
            Scenario::SingleStokesMode => {
                let mut xi = vec![0; n];
                xi[0] = 1;
                single_stokes_mode(&lat, &xi, amplitude)
            }
            Scenario::RandomSmooth { seed, decay } => random_smooth(&lat, *seed, *decay, amplitude),
            Scenario::AnisotropicDemo { seed } => random_smooth(&lat, *seed, 2.0, amplitude),
            Scenario::Zero => Ok(SpectralVectorField::zeros(&lat)),
        }
    }

    /// The scenario's own tensor, if it fixes one.
    pub fn tensor(&self, n: usize) -> Option<ViscosityTensor> {
        match self {
            Scenario::AnisotropicDemo { .. } => Some(ViscosityTensor::anisotropic_demo(n)),
            _ => None,
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    /// `taylor_green`, `single_stokes_mode`, `random_smooth[:seed[:decay]]`,
    /// `anisotropic_demo[:seed]`, `zero`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or_default();
        let num = |p: Option<&str>, default: f64| -> Result<f64> {
            p.map_or(Ok(default), |v| {
                v.parse::<f64>()
                    .map_err(|_| Error::InvalidArgument(format!("bad scenario parameter `{v}` in `{s}`")))
            })
        };
        let sc = match head {
            "taylor_green" => Scenario::TaylorGreen,
            "single_stokes_mode" => Scenario::SingleStokesMode,
            "zero" => Scenario::Zero,
            "random_smooth" => Scenario::RandomSmooth {
                seed: num(parts.next(), 0.0)? as u64,
                decay: num(parts.next(), 2.0)?,
            },
            "anisotropic_demo" => Scenario::AnisotropicDemo {
                seed: num(parts.next(), 0.0)? as u64,
            },
            other => return Err(Error::InvalidArgument(format!("unknown scenario `{other}`"))),
        };
        if parts.next().is_some() {
            return Err(Error::InvalidArgument(format!("too many scenario parameters in `{s}`")));
        }
        Ok(sc)
    }
}

/// Taylor-Green vortex `(sin 2 pi x1 cos 2 pi x2, -cos 2 pi x1 sin 2 pi x2) exp(-8 pi^2 nu t)`,
/// padded with zero components for `n > 2`.
pub fn taylor_green(n: usize, m: usize, nu: f64, t: f64) -> Result<SpectralVectorField> {
    if n < 2 || m < 2 {
        return Err(Error::InvalidArgument("taylor_green needs n >= 2 and m >= 2".into()));
    }
    let lat = FrequencyLattice::new(n, m);
    let mode = |a: i32, b: i32| {
        let mut xi = vec![0; n];
        xi[0] = a;
        xi[1] = b;
        xi
    };
    let decay = (-8.0 * PI * PI * nu * t).exp();
    let h = 0.5 * decay;
    let s = |xi: Vec<i32>, amp: f64| SpectralScalarField::sin_mode(&lat, &xi, amp);
    let u1 = s(mode(1, 1), h)?.add(&s(mode(1, -1), h)?)?;
    let u2 = s(mode(1, 1), -h)?.add(&s(mode(1, -1), h)?)?;
    let mut comps = vec![u1, u2];
    comps.extend((2..n).map(|_| SpectralScalarField::zeros(&lat)));
    let mut u = SpectralVectorField::new(comps)?;
    u.recheck_divergence_free(1e-14);
    Ok(u)
}

/// Pressure of the Taylor-Green flow: `(cos 4 pi x1 + cos 4 pi x2) exp(-16 pi^2 nu t) / 4`.
pub fn taylor_green_pressure(n: usize, m: usize, nu: f64, t: f64) -> Result<SpectralScalarField> {
    let lat = FrequencyLattice::new(n, m);
    let amp = 0.25 * (-16.0 * PI * PI * nu * t).exp();
    let mut x1 = vec![0; n];
    x1[0] = 2;
    let mut x2 = vec![0; n];
    x2[1] = 2;
    SpectralScalarField::cos_mode(&lat, &x1, amp)?.add(&SpectralScalarField::cos_mode(&lat, &x2, amp)?)
}

/// `amplitude * p sin(2 pi xi.x)` with `p` the first polarization orthogonal to `xi`.
pub fn single_stokes_mode(lat: &FrequencyLattice, xi: &[i32], amplitude: f64) -> Result<SpectralVectorField> {
    if xi.iter().all(|&c| c == 0) {
        return Err(Error::InvalidArgument("Stokes mode needs xi != 0".into()));
    }
    let p = polarizations(xi).remove(0);
    let comps = p
        .iter()
        .map(|&pk| SpectralScalarField::sin_mode(lat, xi, amplitude * pk))
        .collect::<Result<Vec<_>>>()?;
    let mut u = SpectralVectorField::new(comps)?;
    u.recheck_divergence_free(1e-14);
    Ok(u)
}

/// Seeded random zero-mean divergence-free field with spectrum `(1 + |xi|^2)^(-decay/2)`,
/// scaled to L2 norm `l2`.
pub fn random_smooth(lat: &FrequencyLattice, seed: u64, decay: f64, l2: f64) -> Result<SpectralVectorField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comps = (0..lat.dim())
        .map(|_| SpectralScalarField::random(lat, &mut rng, decay, true))
        .collect();
    let u = leray_project(&SpectralVectorField::new(comps)?)?;
    let norm = sobolev_norm(&u, 0.0);
    Ok(if norm > 0.0 { u.scaled(l2 / norm) } else { u })
}
