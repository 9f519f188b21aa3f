use proptest::prelude::*;

use stableforce::angular::{
    a_alpha, b_alpha, beta_alpha, drift_vector_v, gaussian_matrix_m, AngularFunction, AngularShape, Cap, Direction,
};
use stableforce::charfn::{levy_khintchine_cf, limit_log_cf, LimitMode, StableLawSpec};
use stableforce::mc::empirical_cf;
use stableforce::renorm::{small_branch_max, solve_small_branch};
use stableforce::tail::{j_alpha, TailIntegralParams};

fn unit3() -> impl Strategy<Value = Direction> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter("non-degenerate", |(x, y, z)| x * x + y * y + z * z > 1e-2)
        .prop_map(|(x, y, z)| Direction::normalize(&[x, y, z]).unwrap())
}

fn dipole() -> impl Strategy<Value = AngularFunction> {
    (0.05f64..2.0, 0.0f64..1.0, unit3()).prop_map(|(c, e, a)| AngularFunction::dipole(c, e, a).unwrap())
}

fn caps() -> impl Strategy<Value = AngularFunction> {
    (0.0f64..0.5, prop::collection::vec((unit3(), -0.9f64..0.95, 0.1f64..2.0), 1..3)).prop_map(|(bg, cs)| {
        let caps = cs.into_iter().map(|(axis, cos_radius, value)| Cap { axis, cos_radius, value }).collect();
        AngularFunction::new(3, AngularShape::Caps { background: bg, caps }).unwrap()
    })
}

fn non_integer_alpha() -> impl Strategy<Value = f64> {
    (0.1f64..1.95).prop_filter("away from 1", |a| (a - 1.0).abs() > 0.02)
}

fn vec3() -> impl Strategy<Value = [f64; 3]> {
    [-4.0f64..4.0, -4.0f64..4.0, -4.0f64..4.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn a_even_b_odd_beta_bounded(c in prop_oneof![dipole(), caps()], alpha in 0.1f64..2.5, z in unit3()) {
        let a = a_alpha(&c, alpha, &z).unwrap();
        let b = b_alpha(&c, alpha, &z).unwrap();
        prop_assert!((a - a_alpha(&c, alpha, &z.neg()).unwrap()).abs() <= 1e-10 * (1.0 + a));
        prop_assert!((b + b_alpha(&c, alpha, &z.neg()).unwrap()).abs() <= 1e-10 * (1.0 + a));
        prop_assert!(a >= 0.0);
        prop_assert!(beta_alpha(&c, alpha, &z).unwrap().abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn integer_functionals_match_moments(c in prop_oneof![dipole(), caps()], z in unit3()) {
        let v = drift_vector_v(&c);
        let m = gaussian_matrix_m(&c);
        let b1 = b_alpha(&c, 1.0, &z).unwrap();
        let a2 = a_alpha(&c, 2.0, &z).unwrap();
        prop_assert!((b1 + z.dot(&v)).abs() <= 1e-12 * (1.0 + b1.abs()));
        prop_assert!((a2 - 2.0 * m.quad_form(z.components())).abs() <= 1e-12 * (1.0 + a2));
        // The quadrature agrees with the moments near the integers.
        let b1n = b_alpha(&c, 1.0 + 1e-7, &z).unwrap();
        let a2n = a_alpha(&c, 2.0 - 1e-7, &z).unwrap();
        prop_assert!((b1n - b1).abs() < 1e-5 * (1.0 + b1.abs()), "{} vs {}", b1n, b1);
        prop_assert!((a2n - a2).abs() < 1e-5 * (1.0 + a2), "{} vs {}", a2n, a2);
    }

    #[test]
    fn limit_cf_is_a_characteristic_function(c in dipole(), alpha in non_integer_alpha(), k in 0.1f64..3.0, z in vec3()) {
        let spec = StableLawSpec::new(alpha, c, k).unwrap();
        let mode = LimitMode::Fluctuation { n: 100 };
        let l = limit_log_cf(&spec, &z, mode).unwrap();
        let lm = limit_log_cf(&spec, &[-z[0], -z[1], -z[2]], mode).unwrap();
        prop_assert!(l.re <= 1e-15);
        prop_assert!((l - lm.conj()).norm() <= 1e-10 * (1.0 + l.norm()));
        prop_assert_eq!(limit_log_cf(&spec, &[0.0; 3], mode).unwrap(), num_complex::Complex64::new(0.0, 0.0));
    }

    #[test]
    fn stability_scaling(c in dipole(), alpha in non_integer_alpha(), lambda in 0.1f64..3.0, s in 0.1f64..5.0, z in vec3()) {
        // Φ_λ(s z) = Φ_{λ s^α}(z).
        let lhs = levy_khintchine_cf(lambda, alpha, &c, &[s * z[0], s * z[1], s * z[2]]).unwrap().value;
        let rhs = levy_khintchine_cf(lambda * s.powf(alpha), alpha, &c, &z).unwrap().value;
        prop_assert!((lhs - rhs).norm() <= 1e-11);
        prop_assert!(lhs.norm() <= 1.0 + 1e-15);
    }

    #[test]
    fn tail_integral_is_hermitian(alpha in 0.1f64..2.5, r in 0.1f64..3.0, z in 0.0f64..30.0) {
        prop_assume!((alpha - 1.0).abs() > 1e-3 && (alpha - 2.0).abs() > 1e-3 || (alpha - 1.0).abs() < 1e-12);
        let p = TailIntegralParams::new(alpha, r).unwrap();
        let a = j_alpha(&p, z).unwrap();
        let b = j_alpha(&p, -z).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm());
        // |J| ≤ ∫_R^∞ y^{−α−1} dy.
        prop_assert!(a.norm() <= r.powf(-alpha) / alpha * (1.0 + 1e-9));
    }

    #[test]
    fn small_branch_residual(p in 0.3f64..3.0, frac in 1e-9f64..1.0) {
        let c = frac * small_branch_max(p);
        let a = solve_small_branch(c, p).unwrap();
        prop_assert!(a > 0.0 && a <= (-1.0 / p).exp() * (1.0 + 1e-12));
        prop_assert!((-a.powf(p) * a.ln() - c).abs() <= 1e-11 * c);
    }

    #[test]
    fn empirical_cf_bounds(xs in prop::collection::vec(-50.0f64..50.0, 2..60), z in -3.0f64..3.0) {
        let forces: Vec<Vec<f64>> = xs.iter().map(|x| vec![*x]).collect();
        let e = empirical_cf(&forces, &[vec![z], vec![-z]]).unwrap();
        prop_assert!(e.values[0].norm() <= 1.0 + 1e-12);
        prop_assert!((e.values[0] - e.values[1].conj()).norm() <= 1e-12);
    }
}
