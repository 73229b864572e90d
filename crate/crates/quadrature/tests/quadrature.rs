use num_complex::Complex64;
use proptest::prelude::*;
use quadrature::{
    contour_integral_truncated, integrate, integrate_with, monte_carlo, ConstrainedDomain, Method,
    QuadratureOptions, VarRange,
};

#[test]
fn unit_interval_integrates_to_one() {
    let dom = ConstrainedDomain::new(vec![VarRange::Positive], 1.0);
    let est = integrate(|_: &[f64]| 1.0, &dom, 1e-12).unwrap();
    assert!((est.value - 1.0).abs() < 1e-14);
}

#[test]
fn simplex_volume_in_three_dimensions() {
    let mut dom = ConstrainedDomain::new(vec![VarRange::Positive; 3], 2.0);
    dom.add_constraint(-1.0, &[(0, 1.0), (1, 1.0), (2, 1.0)], &[]);
    let est = integrate(|_: &[f64]| 1.0, &dom, 1e-12).unwrap();
    assert!((est.value - 1.0 / 6.0).abs() < 1e-12, "{}", est.value);
}

#[test]
fn empty_domain_gives_exact_zero() {
    let mut dom = ConstrainedDomain::new(vec![VarRange::Positive], 1.0);
    dom.add_constraint(1.0, &[(0, 1.0)], &[]);
    let est = integrate(|_: &[f64]| 1.0, &dom, 1e-12).unwrap();
    assert_eq!(est.value, 0.0);
    assert_eq!(est.error, 0.0);
    assert_eq!(est.method, Method::Empty);
}

#[test]
fn empty_high_dimensional_domain_gives_exact_zero() {
    let mut dom = ConstrainedDomain::new(vec![VarRange::Positive; 5], 1.0);
    dom.add_constraint(1.0, &[(0, 1.0), (3, 1.0)], &[(4, 0.5)]);
    let est = integrate(|_: &[f64]| 1.0, &dom, 1e-8).unwrap();
    assert_eq!((est.value, est.error), (0.0, 0.0));
}

#[test]
fn complex_integrands_are_supported() {
    let dom = ConstrainedDomain::boxed(vec![0.0], vec![std::f64::consts::PI]);
    let est = integrate(|x: &[f64]| Complex64::new(0.0, x[0]).exp(), &dom, 1e-12).unwrap();
    assert!((est.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
}

/// Exact integral of a cubic `Σ c_m Π x_j^{e_mj}` over a box.
fn monomial_integral(exps: &[u32], lo: &[f64], hi: &[f64]) -> f64 {
    exps.iter()
        .zip(lo.iter().zip(hi))
        .map(|(&e, (&a, &b))| (b.powi(e as i32 + 1) - a.powi(e as i32 + 1)) / (e + 1) as f64)
        .product()
}

fn all_exponents(d: usize, max_total: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|v: Vec<u32>| {
                (0..=max_total).map(move |e| {
                    let mut w = v.clone();
                    w.push(e);
                    w
                })
            })
            .filter(|v| v.iter().sum::<u32>() <= max_total)
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cubic_polynomials_over_boxes_are_exact(
        d in 1usize..=3,
        seed_coeffs in proptest::collection::vec(-2.0f64..2.0, 64),
        corners in proptest::collection::vec((-1.5f64..0.0, 0.1f64..1.5), 3),
    ) {
        let lo: Vec<f64> = corners[..d].iter().map(|c| c.0).collect();
        let hi: Vec<f64> = corners[..d].iter().map(|c| c.1).collect();
        let exps = all_exponents(d, 3);
        let coeffs = &seed_coeffs[..exps.len()];
        let poly = |x: &[f64]| -> f64 {
            exps.iter().zip(coeffs).map(|(e, c)| c * e.iter().zip(x).map(|(&p, v)| v.powi(p as i32)).product::<f64>()).sum()
        };
        let exact: f64 = exps.iter().zip(coeffs).map(|(e, c)| c * monomial_integral(e, &lo, &hi)).sum();
        let dom = ConstrainedDomain::boxed(lo.clone(), hi.clone());
        let est = integrate(poly, &dom, 1e-13).unwrap();
        prop_assert!((est.value - exact).abs() < 1e-12, "{} vs {}", est.value, exact);
    }

    #[test]
    fn variable_order_does_not_matter(
        a in 0.2f64..2.0, b in -1.0f64..1.0, c in 0.1f64..0.9,
    ) {
        // Triangle {x > 0, y > 0, x + c·y < 1} with a smooth integrand, in both orders.
        let f = |x: f64, y: f64| (a * x + b * y).cos() + x * y * y;
        let mut d1 = ConstrainedDomain::new(vec![VarRange::Positive; 2], 20.0);
        d1.add_constraint(-1.0, &[(0, 1.0), (1, c)], &[]);
        let mut d2 = ConstrainedDomain::new(vec![VarRange::Positive; 2], 20.0);
        d2.add_constraint(-1.0, &[(1, 1.0), (0, c)], &[]);
        let e1 = integrate(|v: &[f64]| f(v[0], v[1]), &d1, 1e-11).unwrap();
        let e2 = integrate(|v: &[f64]| f(v[1], v[0]), &d2, 1e-11).unwrap();
        prop_assert!((e1.value - e2.value).abs() < 1e-9 + 3.0 * (e1.error + e2.error));
    }
}

#[test]
fn quasi_monte_carlo_is_used_above_the_tensor_limit_and_is_accurate() {
    let mut dom = ConstrainedDomain::new(vec![VarRange::Positive; 4], 1.0);
    dom.add_constraint(-1.0, &[(0, 1.0), (1, 1.0), (2, 1.0), (3, 1.0)], &[]);
    let est = integrate(|_: &[f64]| 1.0, &dom, 1e-6).unwrap();
    assert_eq!(est.method, Method::QuasiMonteCarlo);
    let exact = 1.0 / 24.0;
    assert!((est.value - exact).abs() < 5.0 * est.error + 1e-4, "{} ± {}", est.value, est.error);
}

#[test]
fn four_dimensional_cubic_is_exact_when_nested_rule_is_forced() {
    let dom = ConstrainedDomain::boxed(vec![0.0, -1.0, 0.5, -0.5], vec![1.0, 0.5, 1.5, 0.0]);
    let opts = QuadratureOptions { abs_tol: 1e-13, max_tensor_dim: 4, ..Default::default() };
    let f = |x: &[f64]| x[0] * x[1] * x[2] + x[3].powi(3) - 2.0 * x[1] * x[1];
    let est = integrate_with(f, &dom, &opts).unwrap();
    let exact = monomial_integral(&[1, 1, 1, 0], &dom.lower, &dom.upper)
        + monomial_integral(&[0, 0, 0, 3], &dom.lower, &dom.upper)
        - 2.0 * monomial_integral(&[0, 2, 0, 0], &dom.lower, &dom.upper);
    assert!((est.value - exact).abs() < 1e-12);
}

#[test]
fn monte_carlo_error_shrinks_like_inverse_square_root() {
    let mut dom = ConstrainedDomain::new(vec![VarRange::Positive; 2], 1.0);
    dom.add_constraint(-1.0, &[(0, 1.0), (1, 1.0)], &[]);
    let f = |x: &[f64]| (x[0] - x[1]).exp();
    let trials = 20;
    let mut ratio_sum = 0.0;
    for t in 0..trials {
        let small = monte_carlo(f, &dom, 20_000, 100 + t).unwrap();
        let large = monte_carlo(f, &dom, 40_000, 1000 + t).unwrap();
        ratio_sum += large.error / small.error;
    }
    let ratio = ratio_sum / trials as f64;
    let expected = 1.0 / 2f64.sqrt();
    assert!((ratio - expected).abs() < 0.2 * expected, "ratio {ratio}");
}

#[test]
fn gaussian_along_imaginary_axis() {
    // On the line z = iy the function e^{z²} is the Gaussian e^{-y²}.
    let est = contour_integral_truncated(|z: Complex64| (z * z).exp(), 0.0, 8.0, 1e-12);
    let expected = Complex64::new(0.0, std::f64::consts::PI.sqrt());
    assert!((est.value - expected).norm() < 1e-10, "{}", est.value);
    assert!(est.warning.is_none());
}

#[test]
fn zero_integrand_and_linearity() {
    let zero = contour_integral_truncated(|_| Complex64::new(0.0, 0.0), 0.5, 10.0, 1e-12);
    assert_eq!(zero.value, Complex64::new(0.0, 0.0));
    let f = |z: Complex64| 1.0 / (z * z + 4.0);
    let a = Complex64::new(-1.3, 0.4);
    let base = contour_integral_truncated(f, 0.5, 30.0, 1e-12);
    let scaled = contour_integral_truncated(|z| a * f(z), 0.5, 30.0, 1e-12);
    assert!((scaled.value - a * base.value).norm() < 1e-11);
    // The 1/y² tail is far from negligible at this height.
    assert!(base.warning.is_some());
}
