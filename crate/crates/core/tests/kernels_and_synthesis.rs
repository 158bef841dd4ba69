mod common;

use std::f64::consts::{E, PI};

use common::{bessel_k_oracle, simpson_panels};
use greenkern::kernels::{gaussian, matern, matern_operator, sobolev_spline_1d, truncation_schedule, Kernel, ScheduleFamily};
use greenkern::special::bessel_k;
use greenkern::spectral::default_grid;
use greenkern::{symbol_norm, synthesize_green, DiffOperator, GridSpec, VectorOperator};
use proptest::prelude::*;

#[test]
fn bessel_half_order_matches_quadrature_and_closed_form() {
    let closed = (PI / 2.0).sqrt() * (-1.0f64).exp();
    let oracle = bessel_k_oracle(0.5, 1.0);
    assert!((oracle - closed).abs() <= 1e-12 * closed);
    assert!((bessel_k(0.5, 1.0).unwrap() - closed).abs() <= 1e-13 * closed);
}

#[test]
fn bessel_k0_at_one() {
    let v = bessel_k(0.0, 1.0).unwrap();
    assert!((v - bessel_k_oracle(0.0, 1.0)).abs() <= 1e-11 * v);
    assert!((v - 0.421_024_438_2).abs() < 1e-10);
}

#[test]
fn bessel_matches_quadrature_on_lattice() {
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let nu = 10.0 * i as f64 / 9.0;
        for j in 0..20 {
            let z = 1e-6 * (50.0f64 / 1e-6).powf(j as f64 / 19.0);
            let (v, o) = (bessel_k(nu, z).unwrap(), bessel_k_oracle(nu, z));
            worst = worst.max((v - o).abs() / o);
        }
    }
    assert!(worst <= 1e-10, "worst relative error {worst:e}");
}

proptest! {
    #[test]
    fn bessel_is_even_in_order(nu in 0.0f64..10.0, z in 1e-3f64..40.0) {
        prop_assert_eq!(bessel_k(nu, z).unwrap(), bessel_k(-nu, z).unwrap());
    }
}

#[test]
fn matern_reduces_to_the_sobolev_spline() {
    let m = matern(1.0, 1, 1).unwrap();
    let s = sobolev_spline_1d(1.0).unwrap();
    for i in 0..50 {
        let x = [-6.0 + 12.0 * i as f64 / 49.0];
        let (a, b) = (m.eval(&x), s.eval(&x));
        assert!((a - b).abs() <= 1e-10 * b, "x={}: {a} vs {b}", x[0]);
    }
}

#[test]
fn matern_2d_origin_equals_radial_spectral_integral() {
    // G(0) = (2π)^{-1} ∫_{ℝ²} Ĝ = (2π)^{-2} · 2π ∫₀^∞ r (1 + r²)^{-2} dr, with r = t/(1−t).
    let f = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let r = t / (1.0 - t);
        r / (1.0 + r * r).powi(2) / (1.0 - t).powi(2)
    };
    let oracle = simpson_panels(&f, 0.0, 1.0, 16, 1e-14) / (2.0 * PI);
    let g0 = matern(1.0, 2, 2).unwrap().eval(&[0.0, 0.0]);
    assert!((oracle - 1.0 / (4.0 * PI)).abs() < 1e-12);
    assert!((g0 - oracle).abs() < 1e-12);
}

fn probe_points(dim: usize, count: usize, radius: f64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            (0..dim)
                .map(|a| radius * ((i * 7 + a * 13 + 1) as f64 * 0.618).sin())
                .collect()
        })
        .collect()
}

fn max_error_over_g0(closed: &Kernel, synthesized: &dyn Fn(&[f64]) -> f64, pts: &[Vec<f64>]) -> f64 {
    let g0 = closed.value_at_origin();
    pts.iter()
        .map(|x| (closed.eval(x) - synthesized(x)).abs() / g0)
        .fold(0.0, f64::max)
}

#[test]
fn synthesis_reproduces_the_sobolev_spline() {
    for sigma in [0.5, 1.0, 2.0] {
        let vp = VectorOperator::new(vec![
            DiffOperator::partial(1, 0),
            DiffOperator::identity(1).scale(sigma),
        ])
        .unwrap();
        let sn = symbol_norm(&vp);
        let gk = synthesize_green(&sn, &default_grid(&sn).unwrap()).unwrap();
        let k = sobolev_spline_1d(sigma).unwrap();
        let pts: Vec<Vec<f64>> = (0..50).map(|i| vec![(-5.0 + 10.0 * i as f64 / 49.0) / sigma]).collect();
        let err = max_error_over_g0(&k, &|x| gk.eval(x), &pts);
        assert!(err <= 1e-4, "σ={sigma}: {err:e}");
    }
}

#[test]
fn synthesis_matches_matern_in_two_and_three_dimensions() {
    for (sigma, n, dim) in [(1.0, 2, 2), (0.8, 3, 2), (1.0, 2, 3)] {
        let sn = symbol_norm(&matern_operator(sigma, n, dim).unwrap());
        let gk = synthesize_green(&sn, &default_grid(&sn).unwrap()).unwrap();
        let k = matern(sigma, n, dim).unwrap();
        let err = max_error_over_g0(&k, &|x| gk.eval(x), &probe_points(dim, 20, 3.0 / sigma));
        assert!(err <= 1e-3, "σ={sigma} n={n} d={dim}: {err:e}");
    }
}

#[test]
fn synthesis_is_even_and_peaks_at_the_origin() {
    let sn = symbol_norm(&matern_operator(1.0, 2, 2).unwrap());
    let gk = synthesize_green(&sn, &GridSpec::new(2, 16.0, 128).unwrap()).unwrap();
    let g0 = gk.value_at_origin();
    assert!(gk.evenness_defect() <= 1e-12 * g0);
    assert!(gk.samples().iter().all(|v| *v <= g0 * (1.0 + 1e-12)));
}

#[test]
fn doubling_extent_and_points_shrinks_changes_fourfold() {
    let sn = symbol_norm(&matern_operator(1.0, 1, 1).unwrap());
    let values: Vec<f64> = (0..6)
        .map(|k| {
            let grid = GridSpec::new(1, 5.0 * 2f64.powi(k), 16 << k).unwrap();
            synthesize_green(&sn, &grid).unwrap().value_at_origin()
        })
        .collect();
    let floor = 1e-10 * values[0];
    let changes: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    for pair in changes.windows(2) {
        assert!(pair[1] * 4.0 <= pair[0] || pair[1] < floor, "changes {changes:?}");
    }
}

#[test]
fn gaussian_catalog_values() {
    let k = gaussian(1.0, 1).unwrap();
    assert!((k.eval(&[0.0]) - 0.564_189_583_547_756_3).abs() < 1e-15);
    let k2 = gaussian(1.0, 2).unwrap();
    assert!((k2.eval(&[1.0, 0.0]) - (-1.0f64).exp() / PI).abs() < 1e-15);
}

#[test]
fn gaussian_schedule_limits() {
    let s = truncation_schedule(ScheduleFamily::Gaussian, 1.0, 1).unwrap();
    assert!((s.symbol_norm_at(30, &[2.0]) - E).abs() <= 1e-8);
    let s2 = truncation_schedule(ScheduleFamily::Gaussian, 0.6, 2).unwrap();
    for n in [0, 1, 7, 30] {
        assert_eq!(s2.symbol_norm_at(n, &[0.0, 0.0]), 1.0);
    }
}

#[test]
fn matern_schedule_matches_binomial_symbol() {
    let sched = truncation_schedule(ScheduleFamily::Matern, 1.0, 1).unwrap();
    let sn = symbol_norm(&sched.operator(2).unwrap());
    for x in [-2.0f64, -0.3, 0.0, 1.7] {
        let want = 1.0 + 2.0 * x * x + x.powi(4);
        assert!((sn.eval(&[x]) - want).abs() <= 1e-13 * want);
    }
}

fn catalog() -> Vec<Kernel> {
    vec![
        sobolev_spline_1d(1.3).unwrap(),
        matern(0.7, 2, 1).unwrap(),
        matern(1.0, 2, 2).unwrap(),
        matern(1.4, 3, 3).unwrap(),
        gaussian(0.9, 1).unwrap(),
        gaussian(1.5, 3).unwrap(),
    ]
}

proptest! {
    #[test]
    fn catalog_kernels_are_even_bounded_with_positive_density(
        idx in 0usize..6,
        x in prop::collection::vec(-4.0f64..4.0, 3),
    ) {
        let k = &catalog()[idx];
        let x = &x[..k.dim()];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let (g, h) = (k.eval(x), k.eval(&neg));
        prop_assert!((g - h).abs() <= 1e-12 * g.abs().max(f64::MIN_POSITIVE));
        prop_assert!(g.abs() <= k.value_at_origin());
        prop_assert!(k.spectral_density(x).unwrap() > 0.0);
    }

    #[test]
    fn gaussian_partial_sums_are_monotone_and_bounded(
        sigma in 0.3f64..3.0,
        y in prop::collection::vec(-6.0f64..6.0, 2),
    ) {
        let s = truncation_schedule(ScheduleFamily::Gaussian, sigma, 2).unwrap();
        let limit = s.limit_at(&y).unwrap();
        let mut prev = 0.0;
        for n in 0..40 {
            let v = s.symbol_norm_at(n, &y);
            prop_assert!(v >= prev);
            prop_assert!(v <= limit * (1.0 + 1e-15));
            prev = v;
        }
    }
}

#[test]
fn matern_schedule_is_monotone_where_the_base_exceeds_one() {
    // (σ² + ‖y‖²)^n increases with n exactly when σ² + ‖y‖² ≥ 1.
    let s = truncation_schedule(ScheduleFamily::Matern, 1.0, 2).unwrap();
    for y in [[0.0, 0.0], [0.5, -0.2], [2.0, 1.0]] {
        for n in 1..6 {
            assert!(s.symbol_norm_at(n, &y) <= s.symbol_norm_at(n + 1, &y));
        }
    }
    let small = truncation_schedule(ScheduleFamily::Matern, 0.5, 1).unwrap();
    assert!(small.symbol_norm_at(2, &[0.1]) < small.symbol_norm_at(1, &[0.1]));
}
