//! The commutator constant `(2^{|s|/2} / 2pi) |theta| [sum_xi rho(xi)^{2 s0 - n - 2 sigma}]^{1/2}`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorReport {
    /// Constant from the tail-corrected lattice sum at `radius`.
    pub value: f64,
    /// Same at `radius / 2`.
    pub value_half_radius: f64,
    /// `|value - value_half_radius| / value` (0 when the value is 0).
    pub relative_change: f64,
    /// Plain partial sums over `|xi| <= radius` and `|xi| <= radius / 2`.
    pub raw_sum: f64,
    pub raw_sum_half_radius: f64,
    /// Integral estimate of the sum over `|xi| > radius`.
    pub tail: f64,
    pub sigma_tilde_0: f64,
    pub exponent: f64,
    pub radius: usize,
}

/// `max{|s|, |s - theta + 1|} + n/2`.
pub fn sigma_tilde_0(s: f64, theta: f64, n: usize) -> f64 {
    s.abs().max((s - theta + 1.0).abs()) + 0.5 * n as f64
}

pub fn commutator_constant(s: f64, theta: f64, sigma_tilde: f64, n: usize, radius: usize) -> Result<CommutatorReport> {
    if n == 0 || radius < 2 {
        return Err(Error::InvalidArgument("need n >= 1 and radius >= 2".into()));
    }
    let s0 = sigma_tilde_0(s, theta, n);
    if sigma_tilde <= s0 {
        return Err(Error::Divergent {
            sigma_tilde,
            threshold: s0,
        });
    }
    let p = 2.0 * s0 - n as f64 - 2.0 * sigma_tilde;
    let half = radius / 2;
    let counts = shell_counts(n, radius * radius);
    let partial = |r: usize| -> f64 {
        counts[..=r * r]
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| c as f64 * (2.0 * PI).powf(p) * (1.0 + k as f64).powf(0.5 * p))
            .sum()
    };
    let raw_sum = partial(radius);
    let raw_sum_half_radius = partial(half);
    let tail = tail_integral(n, p, radius as f64);
    let tail_half = tail_integral(n, p, half as f64);
    let prefactor = 2f64.powf(0.5 * s.abs()) / (2.0 * PI) * theta.abs();
    let value = prefactor * (raw_sum + tail).sqrt();
    let value_half_radius = prefactor * (raw_sum_half_radius + tail_half).sqrt();
    let relative_change = if value == 0.0 {
        0.0
    } else {
        (value - value_half_radius).abs() / value
    };
    Ok(CommutatorReport {
        value,
        value_half_radius,
        relative_change,
        raw_sum,
        raw_sum_half_radius,
        tail,
        sigma_tilde_0: s0,
        exponent: p,
        radius,
    })
}

/// `counts[k] = #{xi in Z^n : |xi|^2 = k}` for `k <= max_sq`.
fn shell_counts(n: usize, max_sq: usize) -> Vec<u64> {
    let mut one = vec![0u64; max_sq + 1];
    let mut c = 0usize;
    while c * c <= max_sq {
        one[c * c] = if c == 0 { 1 } else { 2 };
        c += 1;
    }
    let squares: Vec<usize> = (0..=max_sq).filter(|&k| one[k] > 0).collect();
    let mut acc = one.clone();
    for _ in 1..n {
        let mut next = vec![0u64; max_sq + 1];
        for (k, &a) in acc.iter().enumerate().filter(|(_, &a)| a > 0) {
            for &q in squares.iter().take_while(|&&q| k + q <= max_sq) {
                next[k + q] += a * one[q];
            }
        }
        acc = next;
    }
    acc
}

fn gamma_half_integer(x2: usize) -> f64 {
    // Gamma(x2 / 2) by recursion from Gamma(1) = 1 and Gamma(1/2) = sqrt(pi).
    let (mut g, mut x) = if x2 % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while 2.0 * x < x2 as f64 - 0.5 {
        g *= x;
        x += 1.0;
    }
    g
}

/// `int_{|x| > r} (2 pi)^p (1 + |x|^2)^{p/2} dx` via `y = 1 / (1 + |x|^2)` and a binomial series.
fn tail_integral(n: usize, p: f64, r: f64) -> f64 {
    let sphere = 2.0 * PI.powf(0.5 * n as f64) / gamma_half_integer(n);
    let y0 = 1.0 / (1.0 + r * r);
    let a = -0.5 * (p + n as f64);
    let alpha = 0.5 * n as f64 - 1.0;
    let mut binom = 1.0;
    let mut sum = 0.0;
    for k in 0..200 {
        let term = binom * y0.powf(a + k as f64) / (a + k as f64);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        binom *= -(alpha - k as f64) / (k as f64 + 1.0);
    }
    sphere * (2.0 * PI).powf(p) * 0.5 * sum
}
