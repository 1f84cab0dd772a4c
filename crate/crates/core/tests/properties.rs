use lgcp_palm::estimate::{estimate_f, estimate_g, estimate_k};
use lgcp_palm::laplace::summary_curves;
use lgcp_palm::{CovarianceFamily, CovarianceModel, LgcpModel, PalmConditioning, PointPattern, Window};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = CovarianceFamily> {
    prop_oneof![
        Just(CovarianceFamily::Exponential),
        Just(CovarianceFamily::Spherical),
        Just(CovarianceFamily::Constant),
    ]
}

fn model() -> impl Strategy<Value = LgcpModel> {
    (family(), 0.0..4.0f64, 0.05..0.5f64, -1.0..5.0f64)
        .prop_map(|(f, v, a, mu)| LgcpModel::planar(mu, CovarianceModel::new(f, v, a).unwrap()).unwrap())
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, 2)
}

fn points(min: usize, max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(point(), min..=max)
}

fn pattern(max: usize) -> impl Strategy<Value = PointPattern> {
    prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 2..=max)
        .prop_map(|p| PointPattern::new(p.into_iter().map(|(x, y)| [x, y]).collect(), Window::unit_square()).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn distinct(pts: &[Vec<f64>]) -> bool {
    pts.iter().enumerate().all(|(i, a)| pts[..i].iter().all(|b| a != b))
}

fn curve_values(c: &lgcp_palm::SummaryCurve) -> Vec<f64> {
    c.values.iter().flatten().copied().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn joint_intensity_is_symmetric(m in model(), pts in points(1, 5), shift in 0usize..5) {
        prop_assume!(distinct(&pts));
        let mut permuted = pts.clone();
        permuted.rotate_left(shift % pts.len());
        permuted.reverse();
        let a = m.joint_intensity(&pts).unwrap();
        let b = m.joint_intensity(&permuted).unwrap();
        prop_assert!(rel(a, b) <= 1e-12, "{a} vs {b}");
    }

    #[test]
    fn palm_intensity_is_a_ratio(m in model(), cond in points(1, 3), eval in points(1, 3)) {
        let all: Vec<Vec<f64>> = cond.iter().chain(&eval).cloned().collect();
        prop_assume!(distinct(&all));
        let c = PalmConditioning::new(cond.clone()).unwrap();
        let palm = m.palm_joint_intensity(&c, &eval).unwrap();
        let ratio = m.joint_intensity(&all).unwrap() / m.joint_intensity(&cond).unwrap();
        prop_assert!(rel(palm, ratio) <= 1e-12, "{palm} vs {ratio}");
    }

    #[test]
    fn palm_of_palm_conditions_on_the_union(m in model(), a in points(1, 2), b in points(1, 2), u in point()) {
        let all: Vec<Vec<f64>> = a.iter().chain(&b).chain(std::iter::once(&u)).cloned().collect();
        prop_assume!(distinct(&all));
        let nested = m.palm_model(&PalmConditioning::new(a.clone()).unwrap()).unwrap()
            .condition(&PalmConditioning::new(b.clone()).unwrap()).unwrap();
        let union = m.palm_model(&PalmConditioning::new(a.into_iter().chain(b).collect()).unwrap()).unwrap();
        let (x, y) = (nested.intensity_at(&u).unwrap(), union.intensity_at(&u).unwrap());
        prop_assert!(rel(x, y) <= 1e-12);
    }

    #[test]
    fn k_estimate_ignores_point_order(p in pattern(40), seed in any::<u64>()) {
        let radii = [0.02, 0.05, 0.1, 0.2];
        let mut pts = p.points().to_vec();
        let k = (seed as usize) % pts.len();
        pts.rotate_left(k);
        pts.reverse();
        let q = PointPattern::new(pts, *p.window()).unwrap();
        prop_assert_eq!(estimate_k(&p, &radii).unwrap().values, estimate_k(&q, &radii).unwrap().values);
    }

    #[test]
    fn k_estimate_is_translation_equivariant(p in pattern(40), dx in -10.0..10.0f64, dy in -10.0..10.0f64) {
        let radii = [0.02, 0.05, 0.1, 0.2];
        let a = curve_values(&estimate_k(&p, &radii).unwrap());
        let b = curve_values(&estimate_k(&p.translated([dx, dy]).unwrap(), &radii).unwrap());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9 * x.max(1.0), "{x} vs {y}");
        }
    }

    #[test]
    fn k_estimate_is_nondecreasing(p in pattern(40)) {
        let radii: Vec<f64> = (1..=25).map(|k| k as f64 * 0.01).collect();
        let k = curve_values(&estimate_k(&p, &radii).unwrap());
        prop_assert!(k.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn border_estimates_are_distribution_functions(p in pattern(60)) {
        let radii: Vec<f64> = (1..=50).map(|k| k as f64 * 0.01).collect();
        for c in [estimate_f(&p, &radii, 30).unwrap(), estimate_g(&p, &radii).unwrap()] {
            let v = curve_values(&c);
            prop_assert!(v.iter().all(|x| (0.0..=1.0).contains(x)));
            prop_assert!(v.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn laplace_j_never_exceeds_one(m in model(), q in prop::sample::select(vec![4usize, 6, 8])) {
        let radii = [0.02, 0.08, 0.15, 0.25];
        let c = summary_curves(&m, &radii, q).unwrap();
        for j in curve_values(&c.j) {
            prop_assert!(j <= 1.0 + 1e-9, "J = {j}");
        }
        prop_assert!(c.max_identity_gap() <= 1e-10);
    }
}
