use std::f64::consts::PI;

use num_complex::Complex64;

use stableforce::angular::{
    a_alpha, b_alpha, beta_alpha, d_alpha, drift_vector_v, gaussian_matrix_m, integrate_sphere, AngularFunction,
    AngularShape, Cap, Direction, SphereQuadrature,
};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

fn tilted(dim: usize) -> Direction {
    match dim {
        1 => Direction::new(vec![1.0]).unwrap(),
        2 => Direction::normalize(&[0.6, -0.8]).unwrap(),
        _ => Direction::normalize(&[0.3, -0.5, 0.81]).unwrap(),
    }
}

/// ∫_{S_d} |μ|^α dS for μ = ẑ·û.
fn abs_moment(dim: usize, alpha: f64) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI.sqrt() * libm::tgamma((alpha + 1.0) / 2.0) / libm::tgamma(alpha / 2.0 + 1.0),
        _ => 4.0 * PI / (alpha + 1.0),
    }
}

#[test]
fn a_alpha_uniform_closed_form() {
    for dim in 1..=3 {
        let c = AngularFunction::uniform(dim, 0.7).unwrap();
        for alpha in [0.3, 0.5, 1.0, 1.5, 2.0, 2.7] {
            let got = a_alpha(&c, alpha, &tilted(dim)).unwrap();
            let want = 0.7 * abs_moment(dim, alpha);
            assert!(close(got, want, 1e-11), "d={dim} alpha={alpha}: {got} vs {want}");
            assert_eq!(b_alpha(&c, alpha, &tilted(dim)).unwrap(), 0.0);
        }
    }
}

#[test]
fn dipole_functionals_closed_form() {
    // C = c(1 + ε a·û): A is the uniform value, B = cε(ẑ·a)·4π/(α+2),
    // D_1 = cε(ẑ·a)·2π·2∫₀¹ μ² ln μ dμ = −4πcε(ẑ·a)/9.
    let axis = Direction::normalize(&[1.0, 2.0, 2.0]).unwrap();
    let (c0, eps) = (0.4, 0.6);
    let c = AngularFunction::dipole(c0, eps, axis.clone()).unwrap();
    let z = tilted(3);
    let cos = z.dot(axis.components());
    for alpha in [0.4, 1.0, 1.3, 2.0] {
        let a = a_alpha(&c, alpha, &z).unwrap();
        let b = b_alpha(&c, alpha, &z).unwrap();
        assert!(close(a, c0 * 4.0 * PI / (alpha + 1.0), 1e-11), "A alpha={alpha}");
        assert!(close(b, c0 * eps * cos * 4.0 * PI / (alpha + 2.0), 1e-10), "B alpha={alpha}: {b}");
        let beta = beta_alpha(&c, alpha, &z).unwrap();
        assert!(close(beta, b / a, 1e-14));
    }
    let d1 = d_alpha(&c, 1.0, &z).unwrap();
    assert!(close(d1, -4.0 * PI * c0 * eps * cos / 9.0, 1e-9), "D1 = {d1}");
    // D_2 only sees the even part: c·2π·2∫₀¹ μ² ln μ dμ = −4πc/9.
    let d2 = d_alpha(&c, 2.0, &z).unwrap();
    assert!(close(d2, -4.0 * PI * c0 / 9.0, 1e-9), "D2 = {d2}");
    let v = drift_vector_v(&c);
    for k in 0..3 {
        assert!(close(v[k], -c0 * eps * 4.0 * PI / 3.0 * axis.components()[k], 1e-12));
    }
}

#[test]
fn two_point_functionals() {
    let c = AngularFunction::two_point(1.6, 0.4).unwrap();
    let up = Direction::new(vec![1.0]).unwrap();
    for alpha in [0.5, 1.0, 1.5, 2.0, 2.5] {
        assert!(close(a_alpha(&c, alpha, &up).unwrap(), 2.0, 1e-14));
        assert!(close(b_alpha(&c, alpha, &up).unwrap(), 1.2, 1e-14));
        assert!(close(b_alpha(&c, alpha, &up.neg()).unwrap(), -1.2, 1e-14));
    }
    // |ẑ·û| = 1 on S_1, so the log kernels vanish.
    assert_eq!(d_alpha(&c, 1.0, &up).unwrap(), 0.0);
    assert!(close(drift_vector_v(&c)[0], -1.2, 1e-15));
    assert!(close(gaussian_matrix_m(&c).get(0, 0), 1.0, 1e-15));
}

/// Composite Gauss–Legendre (20 points) on `panels` equal panels of [a, b].
fn gl_panels(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 10] = [
        0.076_526_521_133_497_33,
        0.227_785_851_141_645_08,
        0.373_706_088_715_419_56,
        0.510_867_001_950_827_1,
        0.636_053_680_726_515,
        0.746_331_906_460_150_8,
        0.839_116_971_822_218_8,
        0.912_234_428_251_326,
        0.963_971_927_277_913_8,
        0.993_128_599_185_094_9,
    ];
    const W: [f64; 10] = [
        0.152_753_387_130_725_85,
        0.149_172_986_472_603_75,
        0.142_096_109_318_382_05,
        0.131_688_638_449_176_63,
        0.118_194_531_961_518_42,
        0.101_930_119_817_240_44,
        0.083_276_741_576_704_75,
        0.062_672_048_334_109_06,
        0.040_601_429_800_386_94,
        0.017_614_007_139_152_12,
    ];
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let (lo, hi) = (a + p as f64 * h, a + (p + 1) as f64 * h);
        let (m, r) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
        for (x, w) in X.iter().zip(W) {
            s += w * r * (f(m + r * x) + f(m - r * x));
        }
    }
    s
}

#[test]
fn arc_caps_in_the_plane_match_piecewise_quadrature() {
    // Arc of half-width w around angle φ0 on top of a background; integrate
    // piecewise between the arc ends and the kernel's kinks.
    let (phi0, w, bg, val) = (0.9f64, 0.7f64, 0.2, 1.3);
    let cap = Cap { axis: Direction::new(vec![phi0.cos(), phi0.sin()]).unwrap(), cos_radius: w.cos(), value: val };
    let c = AngularFunction::new(2, AngularShape::Caps { background: bg, caps: vec![cap] }).unwrap();
    let psi = -0.4f64;
    let z = Direction::new(vec![psi.cos(), psi.sin()]).unwrap();
    let dens = |phi: f64| {
        let d = (phi - phi0).rem_euclid(2.0 * PI);
        bg + if d <= w || d >= 2.0 * PI - w { val } else { 0.0 }
    };
    for alpha in [0.5, 1.5, 2.0] {
        let kernel_a = |phi: f64| (phi - psi).cos().abs().powf(alpha);
        let kernel_b = |phi: f64| {
            let m = (phi - psi).cos();
            m.signum() * m.abs().powf(alpha)
        };
        let mut brk = vec![phi0 - w, phi0 + w, psi + PI / 2.0, psi - PI / 2.0, psi + 1.5 * PI];
        brk.retain(|x| *x > -PI && *x < PI);
        brk.extend([-PI, PI]);
        brk.sort_by(|a, b| a.total_cmp(b));
        let integrate = |k: &dyn Fn(f64) -> f64| {
            brk.windows(2).map(|p| gl_panels(|x| dens(x) * k(x), p[0], p[1], 40)).sum::<f64>()
        };
        let want_a = integrate(&kernel_a);
        let want_b = integrate(&kernel_b);
        let got_a = a_alpha(&c, alpha, &z).unwrap();
        let got_b = b_alpha(&c, alpha, &z).unwrap();
        assert!(close(got_a, want_a, 1e-3), "A alpha={alpha}: {got_a} vs {want_a}");
        assert!((got_b - want_b).abs() < 2e-3 * want_a, "B alpha={alpha}: {got_b} vs {want_b}");
    }
}

#[test]
fn aligned_cap_on_the_sphere() {
    // Cap μ ≥ c0 around ẑ: A = 2π(1 − c0^{α+1})/(α+1) = B.
    let z = tilted(3);
    let c0 = 0.35;
    let cap = Cap { axis: z.clone(), cos_radius: c0, value: 1.0 };
    let c = AngularFunction::new(3, AngularShape::Caps { background: 0.0, caps: vec![cap] }).unwrap();
    for alpha in [0.7, 1.0, 1.6] {
        let want = 2.0 * PI * (1.0 - c0.powf(alpha + 1.0)) / (alpha + 1.0);
        assert!(close(a_alpha(&c, alpha, &z).unwrap(), want, 1e-6), "alpha={alpha}");
        assert!(close(b_alpha(&c, alpha, &z).unwrap(), want, 1e-6), "alpha={alpha}");
        assert!(close(b_alpha(&c, alpha, &z.neg()).unwrap(), -want, 1e-6), "alpha={alpha}");
    }
}

#[test]
fn sphere_quadrature_integrates_polynomials() {
    // ∫ x² dS = 4π/3, ∫ x²y²z² dS = 4π/105 on S_2; ∫ cos⁴ = 3π/4 on S_1.
    let re = |f: fn(&[f64]) -> f64| move |u: &Direction| Complex64::new(f(u.components()), 0.0);
    let q3 = SphereQuadrature::new(3);
    let got = integrate_sphere(3, re(|u| u[0] * u[0]), &q3).unwrap();
    assert!(close(got.re, 4.0 * PI / 3.0, 1e-13) && got.im == 0.0);
    let got = integrate_sphere(3, re(|u| (u[0] * u[1] * u[2]).powi(2)), &q3).unwrap();
    assert!(close(got.re, 4.0 * PI / 105.0, 1e-13));
    let q2 = SphereQuadrature::new(2);
    let got = integrate_sphere(2, re(|u| u[0].powi(4)), &q2).unwrap();
    assert!(close(got.re, 0.75 * PI, 1e-13));
    assert!(integrate_sphere(2, re(|u| u[0]), &q3).is_err());
}

#[test]
fn gaussian_matrix_of_uniform_law() {
    for dim in 1..=3 {
        let c = AngularFunction::uniform(dim, 0.5).unwrap();
        let m = gaussian_matrix_m(&c);
        let surf = [2.0, 2.0 * PI, 4.0 * PI][dim - 1];
        for i in 0..dim {
            for j in 0..dim {
                let want = if i == j { 0.25 * surf / dim as f64 } else { 0.0 };
                assert!((m.get(i, j) - want).abs() < 1e-13, "d={dim} ({i},{j})");
            }
        }
    }
}

#[test]
fn table_law_rejects_mixed_dimensions() {
    let nodes = vec![Direction::new(vec![1.0, 0.0]).unwrap(), Direction::new(vec![0.0, 0.0, 1.0]).unwrap()];
    assert!(AngularFunction::new(2, AngularShape::Table { nodes, values: vec![1.0, 1.0] }).is_err());
    assert!(AngularFunction::uniform(4, 1.0).is_err());
    assert!(AngularFunction::uniform(3, -1.0).is_err());
}

#[test]
fn tilted_cap_on_the_sphere_matches_brute_force() {
    let axis = Direction::normalize(&[0.2, 0.9, -0.4]).unwrap();
    let cap = Cap { axis: axis.clone(), cos_radius: 0.3, value: 2.0 };
    let c = AngularFunction::new(3, AngularShape::Caps { background: 0.25, caps: vec![cap] }).unwrap();
    let z = tilted(3);
    let alpha = 1.3;
    // Midpoint rule in (cos θ, φ) about the x-axis.
    let n = 3000;
    let (mut a, mut b, mut v) = (0.0, 0.0, [0.0; 3]);
    let mut m = [[0.0; 3]; 3];
    let h = 2.0 / n as f64 * 2.0 * PI / n as f64;
    for i in 0..n {
        let t = -1.0 + (i as f64 + 0.5) * 2.0 / n as f64;
        let st = (1.0 - t * t).sqrt();
        for j in 0..n {
            let (sp, cp) = ((j as f64 + 0.5) * 2.0 * PI / n as f64).sin_cos();
            let u = [t, st * cp, st * sp];
            let dens = 0.25 + if axis.dot(&u) >= 0.3 { 2.0 } else { 0.0 };
            let mu = z.dot(&u);
            a += h * dens * mu.abs().powf(alpha);
            b += h * dens * mu.signum() * mu.abs().powf(alpha);
            for k in 0..3 {
                v[k] -= h * dens * u[k];
                for l in 0..3 {
                    m[k][l] += 0.5 * h * dens * u[k] * u[l];
                }
            }
        }
    }
    assert!(close(a_alpha(&c, alpha, &z).unwrap(), a, 1e-4), "A {a}");
    assert!(close(b_alpha(&c, alpha, &z).unwrap(), b, 1e-4), "B {b}");
    let (gv, gm) = (drift_vector_v(&c), gaussian_matrix_m(&c));
    for k in 0..3 {
        assert!((gv[k] - v[k]).abs() < 1e-4, "v[{k}]");
        for l in 0..3 {
            assert!((gm.get(k, l) - m[k][l]).abs() < 1e-4, "M[{k}][{l}]");
        }
    }
    assert!(close(b_alpha(&c, 1.0, &z).unwrap(), -z.dot(&gv), 1e-12));
    assert!(close(a_alpha(&c, 2.0, &z).unwrap(), 2.0 * gm.quad_form(z.components()), 1e-12));
}
