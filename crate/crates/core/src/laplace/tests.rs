use super::*;
use crate::model::CovarianceModel;
use crate::numerics::finite_difference_gradient;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn reference_model(scale: f64) -> LgcpModel {
    LgcpModel::planar_with_intensity(50.0, CovarianceModel::spherical(4.0, scale).unwrap()).unwrap()
}

fn scalar_objective(w: f64, mean: f64, variance: f64) -> LatentObjective {
    LatentObjective::new(vec![mean], DenseMatrix::from_element(1, 1, variance), vec![1.0], vec![w]).unwrap()
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(f(lo) * f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

// Composite Simpson over ±14 standard deviations; the integrand is smooth
// and negligible outside, so this is exact to far below the tolerances used.
fn simpson_integral(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

fn random_objective(m: usize, seed: u64) -> (LatentObjective, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = LgcpModel::planar(rng.random_range(0.0..3.0), CovarianceModel::exponential(rng.random_range(0.5..3.0), rng.random_range(0.05..0.3)).unwrap()).unwrap();
    let nodes: Vec<[f64; 2]> = (0..m).map(|_| [rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)]).collect();
    let weights: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..0.01)).collect();
    let multipliers: Vec<f64> = (0..m).map(|_| rng.random_range(1.0..5.0)).collect();
    let obj = LatentObjective::new(vec![model.mean_level(); m], covariance_matrix(&model, &nodes), multipliers, weights).unwrap();
    let y: Vec<f64> = (0..m).map(|_| model.mean_level() + rng.random_range(-1.0..1.0)).collect();
    (obj, y)
}

#[test]
fn objective_multipliers() {
    let model = reference_model(0.2);
    let grid = build_grid(0.25, 8).unwrap();
    let f = build_objective(&model, &grid, Multiplier::ForF).unwrap();
    assert!(f.multipliers().iter().all(|l| *l == 1.0));
    let g = build_objective(&model, &grid, Multiplier::ForG).unwrap();
    for (v, l) in grid.nodes().iter().zip(g.multipliers()) {
        let d = (v[0] * v[0] + v[1] * v[1]).sqrt();
        if d >= 0.2 {
            assert_eq!(*l, 1.0);
        } else {
            assert!((l - model.covariance().evaluate(d).unwrap().exp()).abs() < 1e-12);
        }
    }
    let s = g.covariance();
    for i in 0..s.nrows() {
        assert_eq!(s[(i, i)], 4.0);
        for j in 0..i {
            assert_eq!(s[(i, j)], s[(j, i)]);
        }
    }
    assert_eq!(pair_correlation_multipliers(&model, &grid), g.multipliers());
}

#[test]
fn gradient_trivial_cases() {
    let obj = LatentObjective::new(vec![1.0, 2.0], DenseMatrix::identity(2, 2), vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
    assert_eq!(obj.grad_h(&[1.0, 2.0]).unwrap(), vec![0.0, 0.0]);
    let obj = scalar_objective(0.01, 1.0, 4.0);
    let y: f64 = 0.3;
    let expected = -0.01 * y.exp() - (y - 1.0) / 4.0;
    assert!((obj.grad_h(&[y]).unwrap()[0] - expected).abs() < 1e-15);
    assert!(obj.grad_h(&[1.0, 2.0]).is_err());
}

#[test]
fn gradient_matches_finite_differences() {
    for (m, seed) in [(1, 1), (5, 2), (17, 3), (64, 4)] {
        let (obj, y) = random_objective(m, seed);
        let analytic = obj.grad_h(&y).unwrap();
        let numeric = finite_difference_gradient(|y| obj.h(y).unwrap(), &y, 1e-5);
        let scale = analytic.iter().fold(0.0f64, |s, g| s.max(g.abs()));
        for (a, n) in analytic.iter().zip(&numeric) {
            assert!((a - n).abs() <= 1e-6 * scale.max(1.0), "m={m}: {a} vs {n}");
        }
    }
}

#[test]
fn newton_zero_weights_returns_mean() {
    let obj = LatentObjective::new(vec![0.5; 3], DenseMatrix::identity(3, 3) * 2.0, vec![1.0; 3], vec![0.0; 3]).unwrap();
    let res = obj.newton_maximize().unwrap();
    assert_eq!(res.maximizer, vec![0.5; 3]);
    assert!(res.iterations <= 1);
    assert_eq!(log_one_minus_summary(&obj).unwrap(), 0.0);
}

#[test]
fn newton_scalar_matches_bisection() {
    let (w, mean, var) = (0.01, 1.0, 4.0);
    let obj = scalar_objective(w, mean, var);
    let res = obj.newton_maximize().unwrap();
    let root = bisect(|y| w * y.exp() * var + y - mean, -10.0, 10.0);
    assert!((res.maximizer[0] - root).abs() < 1e-10);
    assert!(res.gradient_norm <= NEWTON_TOLERANCE);
    assert!(max_abs_grad(&obj, &res.maximizer) <= NEWTON_TOLERANCE);
}

fn max_abs_grad(obj: &LatentObjective, y: &[f64]) -> f64 {
    obj.grad_h(y).unwrap().iter().fold(0.0f64, |m, g| m.max(g.abs()))
}

#[test]
fn scalar_laplace_against_quadrature() {
    for (var, tol) in [(0.01, 1e-3), (4.0, 5e-2)] {
        let (w, mean) = (0.01, 1.0);
        let obj = scalar_objective(w, mean, var);
        let laplace = log_one_minus_summary(&obj).unwrap().exp();
        let sd = var.sqrt();
        let integrand = |y: f64| (-w * y.exp() - (y - mean).powi(2) / (2.0 * var) - 0.5 * (2.0 * PI * var).ln()).exp();
        let exact = simpson_integral(integrand, mean - 14.0 * sd, mean + 14.0 * sd, 200_000);
        assert!((laplace / exact - 1.0).abs() <= tol, "var={var}: {laplace} vs {exact}");
    }
}

#[test]
fn simplified_formula_equals_generic_laplace() {
    for (m, seed) in [(1, 10), (8, 11), (40, 12)] {
        let (obj, _) = random_objective(m, seed);
        let res = obj.newton_maximize().unwrap();
        let generic = obj.generic_log_laplace(&res.maximizer).unwrap();
        assert!((generic - res.log_laplace).abs() <= 1e-10, "m={m}");
    }
    let ev = evaluate_radius(&reference_model(0.3), 0.01, 16).unwrap();
    assert!(ev.identity_gap <= 1e-10, "{}", ev.identity_gap);
    let ev = evaluate_radius(&reference_model(0.1), 0.25, 16).unwrap();
    assert!(ev.identity_gap <= 1e-10, "{}", ev.identity_gap);
}

#[test]
fn newton_unique_from_random_starts() {
    let (obj, _) = random_objective(30, 99);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let reference = obj.newton_maximize().unwrap().maximizer;
    for _ in 0..20 {
        let start: Vec<f64> = obj.mean().iter().map(|m| m + rng.random_range(-2.0..2.0)).collect();
        let res = obj.newton_maximize_from(&start).unwrap();
        let dist = res.maximizer.iter().zip(&reference).fold(0.0f64, |d, (a, b)| d.max((a - b).abs()));
        assert!(dist <= 1e-7, "{dist}");
    }
}

#[test]
fn larger_multipliers_never_increase_value() {
    let (obj, _) = random_objective(12, 7);
    let base = log_one_minus_summary(&obj).unwrap();
    let bigger: Vec<f64> = obj.multipliers().iter().enumerate().map(|(i, l)| l * (1.0 + 0.1 * i as f64)).collect();
    let heavier = LatentObjective::new(obj.mean().to_vec(), obj.covariance().clone(), bigger, obj.weights().to_vec()).unwrap();
    assert!(log_one_minus_summary(&heavier).unwrap() <= base);
}

#[test]
fn poisson_limit() {
    let model = LgcpModel::planar_with_intensity(50.0, CovarianceModel::spherical(0.0, 0.2).unwrap()).unwrap();
    let radii = [0.05, 0.1, 0.2];
    let curves = summary_curves(&model, &radii, 8).unwrap();
    for (i, r) in radii.iter().enumerate() {
        let grid = build_grid(*r, 8).unwrap();
        let expected = 1.0 - (-50.0 * grid.total_weight()).exp();
        assert!((curves.f.values[i].unwrap() - expected).abs() < 1e-12);
        assert!((curves.g.values[i].unwrap() - expected).abs() < 1e-12);
        assert!((curves.j.values[i].unwrap() - 1.0).abs() < 1e-9);
        let poisson = 1.0 - (-50.0 * PI * r * r).exp();
        assert!((curves.g.values[i].unwrap() - poisson).abs() < 1e-9);
        let via_g1 = alternative_g_via_g1(&model, &grid).unwrap();
        assert!((via_g1 - expected).abs() < 1e-14);
    }
}

#[test]
fn reference_setting_shapes() {
    let radii = crate::curve::linspace(0.01, 0.25, 12);
    for scale in [0.1, 0.2, 0.3] {
        let curves = summary_curves(&reference_model(scale), &radii, 8).unwrap();
        let g: Vec<f64> = curves.g.values.iter().map(|v| v.unwrap()).collect();
        let j: Vec<f64> = curves.j.values.iter().map(|v| v.unwrap()).collect();
        assert!(g.windows(2).all(|w| w[1] > w[0]), "G increasing");
        assert!(j.iter().all(|j| *j <= 1.0 + 1e-9), "J below one");
        assert!(j[0] > j[j.len() / 2], "J decreasing at first");
        assert!(curves.max_identity_gap() <= 1e-10);
    }
}

#[test]
fn g1_route_close_to_g2_route() {
    let model = reference_model(0.2);
    let grid = build_grid(0.1, 8).unwrap();
    let via_g1 = alternative_g_via_g1(&model, &grid).unwrap();
    let via_g2 = -log_one_minus_summary(&build_objective(&model, &grid, Multiplier::ForG).unwrap()).unwrap().exp_m1();
    assert!((via_g1 - via_g2).abs() < 2e-3, "{via_g1} vs {via_g2}");
}

#[test]
fn j_ratio_convention() {
    assert_eq!(j_ratio(0.0, 0.0), 0.0);
    assert_eq!(j_ratio(0.3, 0.0), 0.0);
    assert_eq!(j_ratio(0.25, 0.5), 0.5);
}

#[test]
fn rejects_bad_radii_and_dimension() {
    let model = reference_model(0.2);
    assert!(summary_curves(&model, &[0.2, 0.1], 8).is_err());
    assert!(summary_curves(&model, &[0.1], 7).is_err());
    let d3 = LgcpModel::new(0.0, *model.covariance(), 3).unwrap();
    assert!(summary_curves(&d3, &[0.1], 8).is_err());
}

#[test]
fn constant_covariance_reduces_to_one_coordinate() {
    let model = LgcpModel::planar(1.0, CovarianceModel::constant(2.0).unwrap()).unwrap();
    for q in [4, 16] {
        let grid = build_grid(0.2, q).unwrap();
        let w = grid.total_weight();
        let f = log_one_minus_summary(&build_objective(&model, &grid, Multiplier::ForF).unwrap()).unwrap();
        let scalar = log_one_minus_summary(&scalar_objective(w, 1.0, 2.0)).unwrap();
        assert!((f - scalar).abs() < 1e-14);
        let g = log_one_minus_summary(&build_objective(&model, &grid, Multiplier::ForG).unwrap()).unwrap();
        let scalar = log_one_minus_summary(&scalar_objective(w * 2.0f64.exp(), 1.0, 2.0)).unwrap();
        assert!((g - scalar).abs() < 1e-14);
        let via_g1 = alternative_g_via_g1(&model, &grid).unwrap();
        assert!((via_g1 + g.exp_m1()).abs() < 1e-12);
    }
}
