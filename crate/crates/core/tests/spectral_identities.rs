mod common;

use common::*;
use proptest::prelude::*;
use tns_core::calculus::*;
use tns_core::spectral::*;
use tns_core::Error;

fn dims() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![(Just(2usize), 1usize..=4), (Just(3usize), 1usize..=3)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_matches_direct_sum((n, m) in dims(), seed in any::<u64>(), s in -2.0f64..2.5) {
        let g = scalar(n, m, seed, false);
        prop_assert!(rel(sobolev_norm_sq(&g, s), norm_sq_direct(&g, s)) < 1e-12);
    }

    #[test]
    fn bessel_potential_is_an_isometry((n, m) in dims(), seed in any::<u64>(), s in -2.0f64..2.0, r in -2.0f64..2.0) {
        let g = scalar(n, m, seed, false);
        let lg = bessel_potential(&g, r);
        prop_assert!(rel(sobolev_norm(&lg, s - r), sobolev_norm(&g, s)) < 1e-12);
        let back = bessel_potential(&lg, -r);
        let d = back.coeffs().iter().zip(g.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(d <= 1e-12 * g.max_abs());
    }

    #[test]
    fn parseval_and_round_trip((n, m) in dims(), seed in any::<u64>()) {
        let g = scalar(n, m, seed, false);
        let grid = to_physical(&g, nice_size(2 * m + 1)).unwrap();
        prop_assert!(rel(grid.mean_square(), sobolev_norm_sq(&g, 0.0)) < 1e-12);
        let back = to_spectral(&grid, m).unwrap();
        let d = back.coeffs().iter().zip(g.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(d <= 1e-12 * g.max_abs());
    }

    #[test]
    fn pointwise_evaluation_matches_grid((n, m) in dims(), seed in any::<u64>()) {
        let g = scalar(n, m, seed, false);
        let grid = to_physical(&g, 2 * m + 3).unwrap();
        for idx in [0, grid.samples().len() / 3, grid.samples().len() - 1] {
            let x = grid.coordinate(idx);
            prop_assert!((g.eval_at(&x) - grid.samples()[idx]).abs() < 1e-12 * (1.0 + grid.max_abs()));
        }
    }

    #[test]
    fn helmholtz_recombines_orthogonally((n, m) in dims(), seed in any::<u64>()) {
        let f = vector(n, m, seed, true);
        let (fg, fs) = helmholtz_decompose(&f).unwrap();
        let scale = sobolev_norm_sq(&f, 0.0);
        prop_assert!(vec_diff_l2(&fg.add(&fs).unwrap(), &f) <= 1e-12 * scale.sqrt());
        prop_assert!(dual_pairing(&fg, &fs).abs() <= 1e-12 * scale);
        prop_assert!(divergence_residual(&fs) <= 1e-12 * scale.sqrt() * (2.0 * std::f64::consts::PI * m as f64));
        let q = invert_gradient(&fg).unwrap();
        prop_assert!(vec_diff_l2(&gradient(&q), &fg) <= 1e-12 * scale.sqrt());
        let lp = leray_project(&f).unwrap();
        prop_assert!(vec_diff_l2(&leray_project(&lp).unwrap(), &lp) <= 1e-12 * scale.sqrt());
    }

    #[test]
    fn div_grad_inverse_pairs((n, m) in dims(), seed in any::<u64>()) {
        let q = scalar(n, m, seed, true);
        let back = invert_gradient(&gradient(&q)).unwrap();
        let d = back.coeffs().iter().zip(q.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(d <= 1e-12 * q.max_abs());
        let w = invert_divergence(&q).unwrap();
        let dq = divergence(&w);
        let d = dq.coeffs().iter().zip(q.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(d <= 1e-12 * q.max_abs());
        let (wg, _) = helmholtz_decompose(&w).unwrap();
        prop_assert!(vec_diff_l2(&wg, &w) <= 1e-12 * sobolev_norm(&w, 0.0));
    }

    #[test]
    fn dual_pairing_is_symmetric_and_matches_l2((n, m) in dims(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let g = scalar(n, m, s1, false);
        let f = scalar(n, m, s2, false);
        let pts = nice_size(2 * m + 1);
        let (a, b) = (to_physical(&g, pts).unwrap(), to_physical(&f, pts).unwrap());
        let direct = a.samples().iter().zip(b.samples()).map(|(x, y)| x * y).sum::<f64>() / a.samples().len() as f64;
        prop_assert!((dual_pairing(&g, &f) - direct).abs() < 1e-12 * (1.0 + direct.abs()));
        prop_assert!((dual_pairing(&g, &f) - dual_pairing(&f, &g)).abs() < 1e-14);
        prop_assert!((sobolev_inner(&g, &g, 1.0) - sobolev_norm_sq(&g, 1.0)).abs() < 1e-12 * sobolev_norm_sq(&g, 1.0));
    }
}

#[test]
fn gradient_field_rejected_when_not_curl_free() {
    let lat = FrequencyLattice::new(2, 2);
    let f = SpectralScalarField::sin_mode(&lat, &[1, 0], 1.0).unwrap();
    let w = SpectralVectorField::new(vec![SpectralScalarField::zeros(&lat), f]).unwrap();
    assert!(matches!(invert_gradient(&w), Err(Error::NotGradient { .. })));
}

#[test]
fn helmholtz_rejects_nonzero_mean() {
    let lat = FrequencyLattice::new(2, 1);
    let c = SpectralScalarField::constant(&lat, 1.0);
    let f = SpectralVectorField::new(vec![c.clone(), c]).unwrap();
    assert!(matches!(helmholtz_decompose(&f), Err(Error::NonzeroMean { .. })));
}

#[test]
fn undersized_grid_is_refused() {
    let g = scalar(2, 3, 1, false);
    assert!(matches!(to_physical(&g, 6), Err(Error::Aliasing { .. })));
    assert!(to_physical(&g, 7).is_ok());
}

#[test]
fn constant_has_closed_form_norm() {
    let lat = FrequencyLattice::new(3, 2);
    let one = SpectralScalarField::constant(&lat, 1.0);
    for s in [-1.0, 0.0, 0.5, 2.0] {
        assert!(rel(sobolev_norm(&one, s), (2.0 * std::f64::consts::PI).powf(s)) < 1e-15);
    }
    assert_eq!(sobolev_seminorm(&one, 1.0), 0.0);
}

#[test]
fn truncation_and_zero_mean_projection() {
    let g = scalar(2, 4, 9, false);
    let t = truncate_modes(&g, 2);
    for slot in t.lattice().present_slots() {
        let xi = t.lattice().mode(slot);
        let q: i32 = xi.iter().map(|c| c * c).sum();
        let expect = if q <= 4 { g.coeff(xi) } else { Default::default() };
        assert_eq!(t.coeffs()[slot], expect);
    }
    let p = project_zero_mean(&g);
    assert_eq!(p.mean(), 0.0);
    assert!(p.is_zero_mean());
}
