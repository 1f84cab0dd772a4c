use std::f64::consts::PI;

use lgcp_palm::curve::linspace;
use lgcp_palm::estimate::*;
use lgcp_palm::laplace::{build_grid, pair_correlation_multipliers};
use lgcp_palm::montecarlo::{LgcpSimulator, MonteCarloEstimate};
use lgcp_palm::{CovarianceFamily, CovarianceModel, Error, LgcpModel, PointPattern, Window};

fn model(rho: f64, variance: f64, alpha: f64) -> LgcpModel {
    LgcpModel::planar_with_intensity(rho, CovarianceModel::spherical(variance, alpha).unwrap()).unwrap()
}

fn poisson_patterns(count: u64, seed: u64) -> Vec<PointPattern> {
    let sim = LgcpSimulator::new(&model(50.0, 0.0, 0.1), Window::unit_square(), (4, 4)).unwrap();
    (0..count).map(|rep| sim.pattern(seed, rep).unwrap()).collect()
}

#[test]
fn k_of_two_points() {
    let p = PointPattern::new(vec![[0.25, 0.5], [0.75, 0.5]], Window::unit_square()).unwrap();
    let k = estimate_k(&p, &[0.1, 0.49, 0.5, 0.6]).unwrap();
    assert_eq!(k.values[0], Some(0.0));
    assert_eq!(k.values[1], Some(0.0));
    // both ordered pairs, overlap 0.5, n(n-1) = 2
    assert!((k.values[2].unwrap() - 2.0).abs() < 1e-15);
    assert!(matches!(estimate_k(&PointPattern::empty(Window::unit_square()), &[0.1]), Err(Error::TooFewPoints(_))));
}

#[test]
fn k_is_nondecreasing_and_order_free() {
    let p = &poisson_patterns(1, 3)[0];
    let radii = linspace(0.01, 0.3, 30);
    let k = estimate_k(p, &radii).unwrap();
    let vals: Vec<f64> = k.values.iter().map(|v| v.unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[1] >= w[0]));
    let mut reversed = p.points().to_vec();
    reversed.reverse();
    let q = PointPattern::new(reversed, *p.window()).unwrap();
    assert_eq!(estimate_k(&q, &radii).unwrap().values, k.values);
}

#[test]
fn empty_and_single_point_conventions() {
    let radii = [0.05, 0.1, 0.2];
    let empty = PointPattern::empty(Window::unit_square());
    let f = estimate_f(&empty, &radii, 50).unwrap();
    assert!(f.values.iter().all(|v| *v == Some(0.0)));
    assert!(estimate_g(&empty, &radii).is_err());
    let single = PointPattern::new(vec![[0.5, 0.5]], Window::unit_square()).unwrap();
    let g = estimate_g(&single, &radii).unwrap();
    assert!(g.values.iter().all(Option::is_none));
    let j = estimate_j(&single, &radii, 50).unwrap();
    assert!(j.values.iter().all(Option::is_none));
}

#[test]
fn radius_beyond_half_side_is_missing() {
    let p = &poisson_patterns(1, 4)[0];
    let f = estimate_f(p, &[0.1, 0.45, 0.6], 40).unwrap();
    assert!(f.values[0].is_some() && f.values[1].is_some());
    assert!(f.values[2].is_none());
    let g = estimate_g(p, &[0.1, 0.6]).unwrap();
    assert!(g.values[1].is_none());
}

#[test]
fn poisson_empty_space_and_j() {
    let radii = [0.02, 0.05, 0.08, 0.12];
    let patterns = poisson_patterns(300, 5);
    let fs: Vec<Vec<f64>> = patterns.iter().map(|p| estimate_f(p, &radii, DEFAULT_F_LATTICE).unwrap().values.iter().map(|v| v.unwrap()).collect()).collect();
    for (i, r) in radii.iter().enumerate() {
        let xs: Vec<f64> = fs.iter().map(|f| f[i]).collect();
        let est = MonteCarloEstimate::from_samples(&xs).unwrap();
        let target = 1.0 - (-50.0 * PI * r * r).exp();
        assert!(est.within(target, 3.0, 0.0), "F r={r}: {} vs {target} (se {})", est.value, est.standard_error);
    }
    let js: Vec<f64> = patterns.iter().map(|p| estimate_j(p, &[0.05], 50).unwrap().values[0].unwrap()).collect();
    let est = MonteCarloEstimate::from_samples(&js).unwrap();
    assert!(est.within(1.0, 3.0, 0.0), "J: {} ± {}", est.value, est.standard_error);
}

#[test]
fn clustered_j_below_one() {
    let sim = LgcpSimulator::new(&model(50.0, 4.0, 0.2), Window::unit_square(), (32, 32)).unwrap();
    let js: Vec<f64> = (0..150)
        .filter_map(|rep| {
            let p = sim.pattern(6, rep).unwrap();
            estimate_j(&p, &[0.05], 50).ok()?.values[0]
        })
        .collect();
    let est = MonteCarloEstimate::from_samples(&js).unwrap();
    assert!(est.value + 3.0 * est.standard_error < 1.0, "{} ± {}", est.value, est.standard_error);
}

#[test]
fn distribution_estimates_in_unit_interval_and_monotone() {
    for p in poisson_patterns(10, 7) {
        let radii = linspace(0.005, 0.5, 60);
        for c in [estimate_f(&p, &radii, 60).unwrap(), estimate_g(&p, &radii).unwrap()] {
            let vals: Vec<f64> = c.values.iter().flatten().copied().collect();
            assert!(vals.iter().all(|v| (0.0..=1.0).contains(v)));
            assert!(vals.windows(2).all(|w| w[1] >= w[0]));
        }
    }
}

#[test]
fn j_is_zero_where_space_is_filled() {
    let mut pts = Vec::new();
    for i in 0..20 {
        for j in 0..20 {
            pts.push([(i as f64 + 0.5) / 20.0, (j as f64 + 0.5) / 20.0]);
        }
    }
    let p = PointPattern::new(pts, Window::unit_square()).unwrap();
    let r = 0.1;
    let f = estimate_f(&p, &[r], 50).unwrap();
    assert_eq!(f.values[0], Some(1.0));
    assert_eq!(estimate_j(&p, &[r], 50).unwrap().values[0], Some(0.0));
}

#[test]
fn theoretical_k_reference_cases() {
    let flat = model(50.0, 0.0, 0.2);
    let radii = [0.05, 0.2, 0.4];
    for (r, k) in radii.iter().zip(theoretical_k(&flat, &radii).unwrap().values) {
        assert!((k.unwrap() / (PI * r * r) - 1.0).abs() <= 1e-10);
    }
    let m = model(50.0, 4.0, 0.2);
    let k = theoretical_k(&m, &[1e-4, 0.2, 0.35]).unwrap();
    // near the origin c̃(s) ≈ σ²(1 − 4s/πα), so K ≈ e^{σ²}πr²(1 − 8σ²r/3πα)
    let k0 = k.values[0].unwrap() / (4f64.exp() * PI * 1e-8);
    assert!((k0 - (1.0 - 8.0 * 4.0 * 1e-4 / (3.0 * PI * 0.2))).abs() < 1e-5, "{k0}");
    let beyond = k.values[1].unwrap() + PI * (0.35f64.powi(2) - 0.04);
    assert!((k.values[2].unwrap() - beyond).abs() <= 1e-10 * beyond);
}

#[test]
fn theoretical_k_spherical_reference_values() {
    // 30-digit quadrature of 2π ∫ s exp{c̃(s)} ds
    let k = theoretical_k(&model(50.0, 4.0, 0.2), &[0.1, 0.25]).unwrap();
    for (v, exact) in k.values.iter().zip([0.391_924_738_235_335_5, 0.645_078_243_831_535_8]) {
        assert!((v.unwrap() / exact - 1.0).abs() <= 1e-10, "{v:?} vs {exact}");
    }
}

/// `2π Σₖ σ^{2k}/k! ∫₀ʳ s e^{−ks/α} ds` for the exponential family.
fn exponential_k_series(variance: f64, alpha: f64, r: f64) -> f64 {
    let mut total = PI * r * r;
    let mut coef = 1.0;
    for k in 1..80 {
        coef *= variance / k as f64;
        let b = k as f64 / alpha;
        let integral = (1.0 - (-b * r).exp() * (1.0 + b * r)) / (b * b);
        total += 2.0 * PI * coef * integral;
    }
    total
}

#[test]
fn theoretical_k_exponential_series() {
    let m = LgcpModel::planar_with_intensity(50.0, CovarianceModel::exponential(2.0, 0.1).unwrap()).unwrap();
    let radii = [0.01, 0.1, 0.3];
    let k = theoretical_k(&m, &radii).unwrap();
    for (r, v) in radii.iter().zip(&k.values) {
        let exact = exponential_k_series(2.0, 0.1, *r);
        assert!((v.unwrap() / exact - 1.0).abs() <= 1e-10, "r={r}");
    }
}

#[test]
fn theoretical_k_matches_grid_sum() {
    let m = model(50.0, 4.0, 0.2);
    for r in [0.1, 0.25] {
        let grid = build_grid(r, 64).unwrap();
        let sum: f64 = grid.weights().iter().zip(pair_correlation_multipliers(&m, &grid)).map(|(w, g)| w * g).sum();
        let k = theoretical_k(&m, &[r]).unwrap().values[0].unwrap();
        assert!((sum / k - 1.0).abs() <= 1e-3, "r={r}: {sum} vs {k}");
    }
}

#[test]
fn fit_recovers_and_is_deterministic() {
    let truth = model(50.0, 4.0, 0.2);
    let sim = LgcpSimulator::new(&truth, Window::unit_square(), (32, 32)).unwrap();
    let p = (0..).map(|rep| sim.pattern(31, rep).unwrap()).find(|p| p.len() >= 40).unwrap();
    let a = fit_min_contrast(&p, CovarianceFamily::Spherical, None).unwrap();
    let b = fit_min_contrast(&p, CovarianceFamily::Spherical, None).unwrap();
    assert_eq!(a, b);
    assert!(a.variance >= VARIANCE_BOUNDS.0 && a.variance <= VARIANCE_BOUNDS.1);
    assert!(a.scale > 0.0 && a.scale <= 0.5);
    assert_eq!(a.intensity, p.len() as f64);
    assert!((a.mean_level - (a.intensity.ln() - a.variance / 2.0)).abs() < 1e-15);
    assert_eq!(a.r_max, 0.25);
    assert!(a.model().is_ok());
}

#[test]
fn fit_scale_equivariance() {
    let sim = LgcpSimulator::new(&model(50.0, 4.0, 0.2), Window::unit_square(), (16, 16)).unwrap();
    let p = (0..).map(|rep| sim.pattern(41, rep).unwrap()).find(|p| p.len() >= 30).unwrap();
    let base = fit_min_contrast(&p, CovarianceFamily::Spherical, None).unwrap();
    for s in [0.5, 2.0, 8.0] {
        let f = fit_min_contrast(&p.scaled(s).unwrap(), CovarianceFamily::Spherical, None).unwrap();
        assert_eq!(f.variance, base.variance);
        assert_eq!(f.scale, base.scale * s);
    }
    let f = fit_min_contrast(&p.scaled(3.7).unwrap(), CovarianceFamily::Spherical, None).unwrap();
    assert!((f.variance / base.variance - 1.0).abs() < 1e-6);
    assert!((f.scale / (base.scale * 3.7) - 1.0).abs() < 1e-6);
}

#[test]
fn fit_poisson_pattern_has_little_variance() {
    let sim = LgcpSimulator::new(&model(200.0, 0.0, 0.1), Window::unit_square(), (4, 4)).unwrap();
    let p = sim.pattern(2, 0).unwrap();
    let f = fit_min_contrast(&p, CovarianceFamily::Spherical, None).unwrap();
    assert!(f.variance < 0.3, "{f:?}");
}

#[test]
fn fit_rejects_small_patterns_and_constant_family() {
    let p = PointPattern::new(vec![[0.5, 0.5]; 5], Window::unit_square()).unwrap();
    assert!(matches!(fit_min_contrast(&p, CovarianceFamily::Spherical, None), Err(Error::TooFewPoints(_))));
    let p = &poisson_patterns(1, 1)[0];
    assert!(fit_min_contrast(p, CovarianceFamily::Constant, None).is_err());
    assert!(fit_min_contrast(p, CovarianceFamily::Exponential, Some(-1.0)).is_err());
}

#[test]
fn model_check_report() {
    let truth = model(50.0, 4.0, 0.2);
    let p = LgcpSimulator::new(&truth, Window::unit_square(), (16, 16)).unwrap().pattern(5, 0).unwrap();
    let radii = linspace(0.01, 0.1, 5);
    let report = model_check_j(&p, &truth, &radii, 8, 50).unwrap();
    let (d, at) = max_discrepancy(&report.empirical, &report.laplace).unwrap();
    assert_eq!(d, report.max_discrepancy);
    assert_eq!(at, report.argmax_radius);
    assert!(report.to_json().contains("max_discrepancy"));
    assert_eq!(max_discrepancy(&report.laplace, &report.laplace).unwrap().0, 0.0);
}

#[test]
fn load_pattern_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pines.csv");
    let mut text = String::from("# window: 0,10,0,10\nx,y\n");
    for i in 0..126 {
        text.push_str(&format!("{},{}\n", (i % 10) as f64 + 0.3, (i / 13) as f64 + 0.6));
    }
    std::fs::write(&path, text).unwrap();
    let p = load_pattern(&path).unwrap();
    assert_eq!(p.len(), 126);
    assert_eq!(*p.window(), Window::new(0.0, 10.0, 0.0, 10.0).unwrap());
}
