//! Trapezoid rules on nonuniform grids.

/// `int f` over the whole grid.
pub fn trapezoid(grid: &[f64], values: &[f64]) -> f64 {
    debug_assert_eq!(grid.len(), values.len());
    grid.windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

/// Running integrals `int_{t_0}^{t_i} f`, starting at zero.
pub fn cumulative_trapezoid(grid: &[f64], values: &[f64]) -> Vec<f64> {
    debug_assert_eq!(grid.len(), values.len());
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..grid.len() {
        acc += 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_is_exact() {
        let grid = [0.0, 0.1, 0.4, 1.0];
        let vals: Vec<f64> = grid.iter().map(|t| 2.0 * t + 1.0).collect();
        assert!((trapezoid(&grid, &vals) - 2.0).abs() < 1e-15);
        let c = cumulative_trapezoid(&grid, &vals);
        assert_eq!(c[0], 0.0);
        assert!((c[2] - (0.16 + 0.4)).abs() < 1e-15);
    }
}
