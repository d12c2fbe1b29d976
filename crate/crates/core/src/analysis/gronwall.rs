//! Differential and integral Gronwall bounds on sampled data.

use crate::error::{Error, Result};

use super::quadrature::{cumulative_trapezoid, trapezoid};

/// `eta' <= phi eta + psi` (and, for the smallness lemmas, `eta' + b y <= (c y + phi) eta + psi`).
#[derive(Clone, Debug, PartialEq)]
pub struct GronwallProblem {
    pub grid: Vec<f64>,
    pub eta0: f64,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub y: Vec<f64>,
    pub b: f64,
    pub c: f64,
}

impl GronwallProblem {
    /// Problem with `phi = psi = y = 0` on `grid`, `b = c = 1`.
    pub fn on_grid(grid: Vec<f64>, eta0: f64) -> Self {
        let len = grid.len();
        Self {
            grid,
            eta0,
            phi: vec![0.0; len],
            psi: vec![0.0; len],
            y: vec![0.0; len],
            b: 1.0,
            c: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let len = self.grid.len();
        if len < 2 {
            return Err(Error::InvalidArgument("grid needs at least two points".into()));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("grid must be strictly increasing".into()));
        }
        if self.phi.len() != len || self.psi.len() != len || self.y.len() != len {
            return Err(Error::InvalidArgument("sample arrays must match the grid".into()));
        }
        Ok(())
    }
}

/// Curves from the differential Gronwall lemma.
#[derive(Clone, Debug, PartialEq)]
pub struct GronwallBound {
    /// `exp(int phi) (eta0 + int exp(-int phi) psi)`.
    pub general: Vec<f64>,
    /// `exp(int phi) (eta0 + int psi)`, only when `phi, psi >= 0`.
    pub simplified: Option<Vec<f64>>,
}

pub fn gronwall_bound(p: &GronwallProblem) -> Result<GronwallBound> {
    p.validate()?;
    let big_phi = cumulative_trapezoid(&p.grid, &p.phi);
    let weighted: Vec<f64> = p.psi.iter().zip(&big_phi).map(|(s, f)| (-f).exp() * s).collect();
    let inner = cumulative_trapezoid(&p.grid, &weighted);
    let general = big_phi
        .iter()
        .zip(&inner)
        .map(|(f, i)| f.exp() * (p.eta0 + i))
        .collect();
    let simplified = (p.phi.iter().all(|&v| v >= 0.0) && p.psi.iter().all(|&v| v >= 0.0)).then(|| {
        let psi_int = cumulative_trapezoid(&p.grid, &p.psi);
        big_phi
            .iter()
            .zip(&psi_int)
            .map(|(f, i)| f.exp() * (p.eta0 + i))
            .collect()
    });
    Ok(GronwallBound { general, simplified })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmallnessVariant {
    /// `D = eta0 + int psi < b / (e c)`.
    Alt,
    /// `D = eta0 + int exp(-Phi) psi < (b / c) exp(-1 - Phi(T))`.
    Phi,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmallnessReport {
    pub variant: SmallnessVariant,
    pub d: f64,
    /// Right side of the strict inequality on `D`.
    pub threshold: f64,
    pub phi_total: f64,
    pub admissible: bool,
    /// `D e` (alt) or `D e^{1 + Phi(T)}` (phi), both below `b / c`.
    pub sup_eta_bound: Option<f64>,
    /// `1 / c`.
    pub y_integral_bound: Option<f64>,
}

pub fn smallness_check(p: &GronwallProblem, variant: SmallnessVariant) -> Result<SmallnessReport> {
    p.validate()?;
    if !(p.b > 0.0 && p.c > 0.0) {
        return Err(Error::InvalidArgument("b and c must be positive".into()));
    }
    let e = std::f64::consts::E;
    let (d, threshold, phi_total, bound_factor) = match variant {
        SmallnessVariant::Alt => (p.eta0 + trapezoid(&p.grid, &p.psi), p.b / (e * p.c), 0.0, e),
        SmallnessVariant::Phi => {
            let big_phi = cumulative_trapezoid(&p.grid, &p.phi);
            let total = *big_phi.last().expect("nonempty grid");
            let weighted: Vec<f64> = p.psi.iter().zip(&big_phi).map(|(s, f)| (-f).exp() * s).collect();
            (
                p.eta0 + trapezoid(&p.grid, &weighted),
                p.b / p.c * (-1.0 - total).exp(),
                total,
                (1.0 + total).exp(),
            )
        }
    };
    let admissible = d < threshold;
    Ok(SmallnessReport {
        variant,
        d,
        threshold,
        phi_total,
        admissible,
        sup_eta_bound: admissible.then_some(d * bound_factor),
        y_integral_bound: admissible.then_some(1.0 / p.c),
    })
}

/// Bound `a(t) + int_0^t a b exp(int_s^t b) ds` from the integral Gronwall lemma,
/// plus whether the supplied `u` samples respect it.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralGronwall {
    pub bound: Vec<f64>,
    pub u_within_bound: bool,
}

pub fn integral_gronwall_bound(u: &[f64], a: &[f64], b: &[f64], grid: &[f64]) -> Result<IntegralGronwall> {
    let len = grid.len();
    if a.len() != len || b.len() != len || (!u.is_empty() && u.len() != len) {
        return Err(Error::InvalidArgument("sample arrays must match the grid".into()));
    }
    if let Some(v) = b.iter().find(|&&v| v < 0.0) {
        return Err(Error::InvalidArgument(format!("b must be nonnegative, found {v}")));
    }
    let big_b = cumulative_trapezoid(grid, b);
    let inner: Vec<f64> = a
        .iter()
        .zip(b)
        .zip(&big_b)
        .map(|((a, b), bb)| a * b * (-bb).exp())
        .collect();
    let acc = cumulative_trapezoid(grid, &inner);
    let bound: Vec<f64> = (0..len).map(|i| a[i] + big_b[i].exp() * acc[i]).collect();
    let u_within_bound = u
        .iter()
        .zip(&bound)
        .all(|(u, w)| *u <= w + 1e-12 * w.abs().max(1.0));
    Ok(IntegralGronwall { bound, u_within_bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, t: f64) -> Vec<f64> {
        (0..=n).map(|i| t * i as f64 / n as f64).collect()
    }

    #[test]
    fn trivial_cases() {
        let g = grid(100, 1.0);
        let mut p = GronwallProblem::on_grid(g.clone(), 2.0);
        p.psi = vec![3.0; g.len()];
        let b = gronwall_bound(&p).unwrap();
        assert!((b.general[100] - 5.0).abs() < 1e-12);
        let mut q = GronwallProblem::on_grid(g.clone(), 1.5);
        q.phi = vec![0.7; g.len()];
        let b = gronwall_bound(&q).unwrap();
        assert!((b.general[100] - 1.5 * 0.7f64.exp()).abs() < 1e-12);
        let z = gronwall_bound(&GronwallProblem::on_grid(g, 0.0)).unwrap();
        assert!(z.general.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn smallness_boundary_is_strict() {
        let g = grid(10, 1.0);
        let mut p = GronwallProblem::on_grid(g, 0.0);
        p.b = 2.0;
        p.c = 3.0;
        let r = smallness_check(&p, SmallnessVariant::Alt).unwrap();
        assert!(r.admissible);
        assert_eq!(r.sup_eta_bound, Some(0.0));
        assert_eq!(r.y_integral_bound, Some(1.0 / 3.0));
        p.eta0 = p.b / (std::f64::consts::E * p.c);
        assert!(!smallness_check(&p, SmallnessVariant::Alt).unwrap().admissible);
    }

    #[test]
    fn integral_form_constant_coefficients() {
        let g = grid(2000, 1.0);
        let a = vec![0.5; g.len()];
        let b = vec![1.3; g.len()];
        let r = integral_gronwall_bound(&[], &a, &b, &g).unwrap();
        for (t, v) in g.iter().zip(&r.bound) {
            assert!((v - 0.5 * (1.3 * t).exp()).abs() < 1e-6);
        }
        assert!(integral_gronwall_bound(&[], &a, &[-1.0; 2001], &g).is_err());
    }
}
