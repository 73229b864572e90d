use approx::assert_relative_eq;
use num_complex::Complex64;
use quadrature::{adaptive_gk, GkOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use testfn::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn gk(f: impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    adaptive_gk(f, a, b, &GkOptions { abs_tol: 1e-14, rel_tol: 1e-13, max_intervals: 4000 }).value
}

#[test]
fn bump_values() {
    let g = BumpFunction::new(1.0);
    assert_eq!(bump_eval(&g, 1.0), 0.0);
    assert_eq!(bump_eval(&g, -1.5), 0.0);
    assert_relative_eq!(bump_eval(&g, 0.0), (-1.0f64).exp(), max_relative = 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let t = rng.random_range(-2.0..2.0);
        assert_eq!(g.eval(t), g.eval(-t));
    }
}

#[test]
fn transform_basics() {
    let g = BumpFunction::new(1.0);
    let h0 = h_from_g(&g, c(0.0));
    assert!(h0.re > 0.0);
    assert_relative_eq!(h0.re, gk(|t| g.eval(t), -1.0, 1.0), max_relative = 1e-12);
    assert!(h_from_g(&g, c(2.3)).im.abs() < 1e-10);
    assert!(h_from_g(&g, c(50.0)).norm() / h0.norm() < 1e-3);
    let (_, err) = g.h_with_error(c(7.0));
    assert!(err < 1e-10);
}

#[test]
fn transform_matches_fft() {
    // Periodic trapezoid sums are spectrally accurate for a bump that is flat at its ends,
    // so an FFT over a padded period reproduces h at the frequencies 2πk/L.
    let g = BumpFunction::new(1.0);
    let period = 4.0;
    let m = 4096;
    let step = period / m as f64;
    let mut buf: Vec<rustfft::num_complex::Complex<f64>> =
        (0..m).map(|j| {
            // Sample t_j = j·step, wrapped into [−L/2, L/2).
            let t = if j < m / 2 { j as f64 * step } else { (j as f64 - m as f64) * step };
            rustfft::num_complex::Complex::new(g.eval(t), 0.0)
        }).collect();
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    for (k, v) in buf.iter().enumerate().take(60) {
        let omega = 2.0 * PI * k as f64 / period;
        let h = h_from_g(&g, c(omega));
        assert!((h.re - v.re * step).abs() < 1e-8, "k={k}: {} vs {}", h.re, v.re * step);
        assert!((h.im - v.im * step).abs() < 1e-8);
    }
}

#[test]
fn phi_support_and_symmetry() {
    let phi = PhiFunction::with_budget(3, 3.8);
    assert_eq!(phi_eval(&phi, &[phi.rho, 0.0, 0.0]), 0.0);
    assert_eq!(phi_eval(&phi, &[0.1, -1.3, 0.0]), 0.0);
    assert_relative_eq!(phi_eval(&phi, &[0.0; 3]), (-3.0f64).exp(), max_relative = 1e-14);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..500 {
        let xi: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
        let neg: Vec<f64> = xi.iter().map(|x| -x).collect();
        assert_eq!(phi.eval(&xi), phi.eval(&neg));
        if xi.iter().map(|x| x.abs()).sum::<f64>() >= phi.budget() {
            assert_eq!(phi.eval(&xi), 0.0);
        }
    }
}

#[test]
fn f_transform_properties() {
    let phi1 = PhiFunction::with_budget(1, 1.8);
    for x in [0.0, 0.7, -3.0] {
        assert_eq!(f_from_phi(&phi1, &[c(x)]).unwrap(), c((-1.0f64).exp()));
    }
    let phi2 = PhiFunction::with_budget(2, 1.8);
    let oracle = gk(|s| phi2.eval(&[s, -s]), -0.9, 0.9);
    let got = f_from_phi(&phi2, &[c(0.0), c(0.0)]).unwrap();
    assert_relative_eq!(got.re, oracle, max_relative = 1e-9);
    assert!(got.im.abs() < 1e-12);
    // Translation invariance and symmetry at n = 3.
    let phi3 = PhiFunction::with_budget(3, 3.8);
    let x = [c(0.13), c(-0.4), c(0.9)];
    let base = f_from_phi(&phi3, &x).unwrap();
    let shifted: Vec<Complex64> = x.iter().map(|v| v + 0.77).collect();
    assert!((f_from_phi(&phi3, &shifted).unwrap() - base).norm() < 1e-8);
    let permuted = [x[2], x[0], x[1]];
    assert!((f_from_phi(&phi3, &permuted).unwrap() - base).norm() < 1e-8);
}

#[test]
fn kappa_values() {
    let g = BumpFunction::new(1.0);
    assert_relative_eq!(kappa_of(&[g]), 2.0 * PI * (-1.0f64).exp(), max_relative = 1e-14);
    let parseval = 2.0 * PI * gk(|t| g.eval(t) * g.eval(-t), -1.0, 1.0);
    assert_relative_eq!(kappa_of(&[g, g]), parseval, max_relative = 1e-10);
    // n = 3 against the defining integral ∫ h(u)³ du.
    let direct = gk(|u| h_from_g(&g, c(u)).re.powi(3), -150.0, 150.0);
    let k3 = kappa_of(&[g, g, g]);
    assert!(k3 > 0.0);
    assert_relative_eq!(k3, direct, max_relative = 1e-8);
}

#[test]
fn bundle_construction() {
    let b = TestFunctionBundle::canonical(2, 10, 1.8).unwrap();
    assert_eq!(b.slow_scale, 100.0);
    assert!(b.warnings.is_empty());
    assert_relative_eq!(b.phi.rho, 0.9);
    assert!(kappa(&b) > 0.0);
    let low = TestFunctionBundle::new(2, 10, 1.8, 1.0, 30.0).unwrap();
    assert_eq!(low.warnings.len(), 1);
    let back = TestFunctionBundle::from_config(&b.config()).unwrap();
    assert_eq!(back.phi, b.phi);
    assert!(TestFunctionBundle::canonical(0, 10, 1.8).is_err());
}

#[test]
fn assembled_test_function() {
    let mut zero = TestFunctionBundle::canonical(2, 10, 1.8).unwrap();
    for g in &mut zero.bumps {
        g.amplitude = 0.0;
    }
    assert_eq!(zero.assemble_f(&[c(0.3), c(-0.3)]).unwrap(), c(0.0));

    let b1 = TestFunctionBundle::canonical(1, 10, 1.8).unwrap();
    for theta in [0.0, 1.5, -20.0] {
        let z = Complex64::new(0.0, theta);
        let expect = b1.phi.at_origin() * h_from_g(&b1.bumps[0], Complex64::i() * z / b1.slow_scale);
        assert!((assemble_f(&b1, &[z]).unwrap() - expect).norm() < 1e-13);
    }

    // The h factors in the strip Re z = 3 are bounded by e^{3Δ/𝒯}·∫g.
    let b2 = TestFunctionBundle::canonical(2, 10, 1.8).unwrap();
    let g = b2.bumps[0];
    let g_int = g.integral();
    for y in [-50.0, -3.0, 0.0, 4.0, 200.0] {
        let h = g.h(Complex64::i() * Complex64::new(3.0, y) / b2.slow_scale);
        assert!(h.norm() <= g_int * (3.0 * g.half_width / b2.slow_scale).exp() * (1.0 + 1e-12));
    }
    // The assembled F in the strip |Re z| ≤ 0.3, bounded factor by factor.
    let h_bound = g_int * (0.3 * g.half_width / b2.slow_scale).exp();
    let f_bound = gk(|s| b2.phi.eval(&[s, -s]) * (10.0 * 0.6 * s.abs()).exp(), -0.9, 0.9);
    let bound = f_bound * h_bound * h_bound;
    for y in [-50.0, -3.0, 0.0, 4.0, 200.0] {
        let z = [Complex64::new(0.3, y), Complex64::new(-0.3, 0.5 * y)];
        assert!(b2.assemble_f(&z).unwrap().norm() <= bound * (1.0 + 1e-9));
    }
}
