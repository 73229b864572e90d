use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ratios_core::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Independent reference for z: the textbook formula without any stabilization.
fn z_naive(x: Complex64) -> Complex64 {
    1.0 / (1.0 - (-x).exp())
}

#[test]
fn z_closed_form_values() {
    assert!((z_fn(c(2f64.ln(), 0.0)).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
    let x = c(0.3, 0.7);
    assert!((z_fn(x).unwrap() + z_fn(-x).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
    let small = c(1e-4, 0.0);
    assert!(((small * z_fn(small).unwrap()).re - 1.0).abs() < 1e-3);
    for x in [c(0.2, -3.0), c(-1.7, 0.4), c(5.0, 2.0), c(-30.0, 1.0)] {
        assert!((z_fn(x).unwrap() - z_naive(x)).norm() < 1e-12 * z_naive(x).norm().max(1.0));
    }
}

#[test]
fn pole_guard_rejects_lattice_points() {
    for k in -3..=3 {
        let x = c(0.0, 2.0 * std::f64::consts::PI * k as f64);
        assert!(matches!(z_fn(x), Err(RatiosError::Pole(_))));
        assert!(zlog_deriv(x).is_err() && zlog_deriv_prime(x).is_err());
    }
    assert!(z_fn(c(1e-9, 0.0)).is_ok());
}

#[test]
fn logarithmic_derivative_values() {
    assert!((zlog_deriv(c(2f64.ln(), 0.0)).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
    let x = c(1e-4, 0.0);
    let v = zlog_deriv(x).unwrap();
    assert!(((v * x).re + 1.0).abs() < 1e-3);
    for i in 0..40 {
        for j in 0..40 {
            let x = c(0.5 + 0.1 * i as f64, -10.0 + 0.5 * j as f64);
            assert!(zlog_deriv(x).unwrap().norm() <= 2.0);
        }
    }
}

#[test]
fn logarithmic_derivative_is_one_minus_z() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let x = c(rng.random_range(-6.0..6.0), rng.random_range(-20.0..20.0));
        if pole_distance(x) < 1e-3 {
            continue;
        }
        let lhs = zlog_deriv(x).unwrap();
        let rhs = c(1.0, 0.0) - z_fn(x).unwrap();
        assert!((lhs - rhs).norm() <= 1e-14 * (1.0 + rhs.norm()), "{x}");
    }
}

/// Central difference with step h on a complex-analytic function.
fn central<F: Fn(Complex64) -> Complex64>(f: F, x: Complex64, h: f64) -> Complex64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

#[test]
fn finite_difference_checks_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 1000 {
        let x = c(rng.random_range(-4.0..4.0), rng.random_range(-12.0..12.0));
        if pole_distance(x) < 0.2 {
            continue;
        }
        checked += 1;
        let h = 1e-5;
        let fd_log = central(|y| z_naive(y).ln(), x, h);
        let d1 = zlog_deriv(x).unwrap();
        assert!((fd_log - d1).norm() <= 1e-6 * (1.0 + d1.norm()), "log z' at {x}");
        let fd_prime = central(|y| zlog_deriv(y).unwrap(), x, h);
        let d2 = zlog_deriv_prime(x).unwrap();
        assert!((fd_prime - d2).norm() <= 1e-6 * (1.0 + d2.norm()), "(z'/z)' at {x}");
        let fd_z = central(z_naive, x, h);
        let zp = z_prime(x).unwrap();
        assert!((fd_z - zp).norm() <= 1e-6 * (1.0 + zp.norm()), "z' at {x}");
    }
}

#[test]
fn derivative_of_logarithmic_derivative_near_zero_and_symmetry() {
    let x = c(1e-3, 0.0);
    let v = zlog_deriv_prime(x).unwrap();
    assert!((v.re * 1e-6 - 1.0).abs() < 1e-2);
    let x = c(0.7, 0.2);
    let fd = central(|y| zlog_deriv(y).unwrap(), x, 1e-5);
    assert!((fd - zlog_deriv_prime(x).unwrap()).norm() < 1e-6);
    for x in [c(0.3, 1.1), c(-2.0, 0.5), c(4.0, -7.0)] {
        assert!((zlog_deriv_prime(x.conj()).unwrap() - zlog_deriv_prime(x).unwrap().conj()).norm() < 1e-14);
    }
    // z(x)z(−x) = −(z'/z)'(x)
    let x = c(0.41, -0.9);
    let lhs = z_fn(x).unwrap() * z_fn(-x).unwrap();
    assert!((lhs + zlog_deriv_prime(x).unwrap()).norm() < 1e-13);
}

#[test]
fn z_products() {
    let a = c(0.3, 0.1);
    let b = c(0.2, -0.4);
    assert_eq!(z_product(&[], &[b]).unwrap(), c(1.0, 0.0));
    assert_eq!(z_product(&[a], &[]).unwrap(), c(1.0, 0.0));
    assert!((z_product(&[a], &[b]).unwrap() - z_fn(a + b).unwrap()).norm() < 1e-15);
    assert_eq!(z_dagger(&[a], &[-a]).unwrap(), c(1.0, 0.0));
    let s = [a, b];
    let s_neg = [-a, -b];
    let expected = z_fn(a - b).unwrap() * z_fn(b - a).unwrap();
    assert!((z_dagger(&s, &s_neg).unwrap() - expected).norm() < 1e-14);
}

#[test]
fn h_cases() {
    let a1 = c(0.3, 0.2);
    let a2 = c(0.5, -1.0);
    let b = c(0.4, 0.7);
    let b1 = c(0.25, 0.3);
    assert_eq!(h_st(Block::Alpha(a1), &[], &[]).unwrap(), c(0.0, 0.0));
    assert_eq!(h_st(Block::Pair(a1, b), &[], &[]).unwrap(), zlog_deriv_prime(a1 + b).unwrap());
    // S = {α₁}, T = {−β₁} with B holding −β₁.
    let beta1 = -b1;
    let v = h_st(Block::Alpha(a2), &[a1], &[-beta1]).unwrap();
    let expected = zlog_deriv(a2 - a1).unwrap() - zlog_deriv(a2 - beta1).unwrap();
    assert!((v - expected).norm() < 1e-15);
    let v = h_st(Block::Beta(b), &[a1], &[b1]).unwrap();
    let expected = zlog_deriv(b - b1).unwrap() - zlog_deriv(b + a1).unwrap();
    assert!((v - expected).norm() < 1e-15);
    assert_eq!(h_st(Block::Other, &[a1], &[b1]).unwrap(), c(0.0, 0.0));
}

#[test]
fn jstar_small_cases() {
    let empty = ArgumentSets::new(vec![], vec![], 5);
    assert_eq!(jstar_q(&empty, 1).unwrap(), c(1.0, 0.0));
    let a = c(0.3, 1.2);
    let b = c(0.2, -0.5);
    let one = ArgumentSets::new(vec![a], vec![b], 7);
    assert!((jstar_q(&one, 1).unwrap() - zlog_deriv_prime(a + b).unwrap()).norm() < 1e-14);
    // Full J* for one shift on each side: (1 − e^{−Nx}) / (4 sinh²(x/2)) with x = a + b.
    let x = a + b;
    let sinh = (x / 2.0).sinh();
    let expected = (1.0 - (-7.0 * x).exp()) / (4.0 * sinh * sinh);
    assert!((jstar_full(&one).unwrap() - expected).norm() < 1e-12);
    assert!(matches!(jstar_q(&one, 4), Err(RatiosError::InvalidOrder(4))));
}

#[test]
fn worked_example_has_three_partitions() {
    let args = ArgumentSets::new(
        vec![c(0.1, 0.0), c(0.2, 1.0), c(0.3, -1.0)],
        vec![c(0.15, 0.5), c(0.25, -0.3)],
        4,
    );
    let terms = jstar_terms(&args, 2).unwrap();
    let inner: Vec<_> = terms.iter().filter(|t| t.s == vec![0] && t.t == vec![0]).collect();
    assert_eq!(inner.len(), 3);
    let total: Complex64 = terms.iter().map(|t| t.value).sum();
    assert!((total - jstar_q(&args, 2).unwrap()).norm() < 1e-12);
    let dump = format_terms(&terms);
    assert_eq!(dump.lines().count(), terms.len());
}

/// Brute-force oracle: all set partitions of the labelled elements, filtered to blocks of
/// size one or mixed pairs.
fn brute_force_partitions(na: usize, nb: usize) -> (usize, usize, usize) {
    fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
        if items.is_empty() {
            return vec![vec![]];
        }
        let first = items[0];
        let mut out = Vec::new();
        for p in set_partitions(&items[1..]) {
            for i in 0..p.len() {
                let mut q = p.clone();
                q[i].insert(0, first);
                out.push(q);
            }
            let mut q = p.clone();
            q.insert(0, vec![first]);
            out.push(q);
        }
        out
    }
    let items: Vec<usize> = (0..na + nb).collect();
    let all = set_partitions(&items);
    let small = all.iter().filter(|p| p.iter().all(|b| b.len() <= 2)).count();
    let mixed = all
        .iter()
        .filter(|p| p.iter().all(|b| b.len() == 1 || (b.len() == 2 && (b[0] < na) != (b[1] < na))))
        .count();
    (all.len(), small, mixed)
}

#[test]
fn partition_enumeration_matches_brute_force() {
    assert_eq!(partition_blocks(0, 0).count(), 1);
    let two: Vec<_> = partition_blocks(1, 1).collect();
    assert_eq!(two.len(), 2);
    assert_eq!(partition_blocks(2, 1).count(), 3);
    assert_eq!(brute_force_partitions(2, 1), (5, 4, 3));
    for na in 0..=4 {
        for nb in 0..=4 {
            let got: Vec<_> = partition_blocks(na, nb).collect();
            let (_, _, mixed) = brute_force_partitions(na, nb);
            assert_eq!(got.len(), mixed, "({na},{nb})");
            assert_eq!(got.len(), partition_count(na, nb));
            let mut dedup = got.clone();
            dedup.dedup();
            assert_eq!(dedup.len(), got.len());
            assert!(got.windows(2).all(|w| w[0] < w[1]), "sorted order");
        }
    }
}

#[test]
fn layer_one_residues_cancel_in_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let n = rng.random_range(2..10usize);
        let a: Vec<Complex64> = (0..3).map(|_| c(rng.random_range(0.1..1.0), rng.random_range(-3.0..3.0))).collect();
        let b: Vec<Complex64> = (0..2).map(|_| c(rng.random_range(0.1..1.0), rng.random_range(-3.0..3.0))).collect();
        let args = ArgumentSets::new(a, b, n);
        let (r1, r2) = exchanged_residues(&args, 0, 1, 0, 1e-3, 64).unwrap();
        assert!(r1.norm() > 0.0, "residue should be nontrivial");
        assert!((r1 + r2).norm() < 1e-9 * r1.norm(), "{r1} {r2}");
        let vals: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&e| layer_one_near_coincidence(&args, 0, 1, c(e, 0.0)).unwrap().norm())
            .collect();
        let growth = vals.iter().cloned().fold(0.0, f64::max) / vals.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(growth < 2.0, "{vals:?}");
    }
}

#[test]
fn top_layer_decays_exponentially_in_the_real_part() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for q in 1..=2usize {
        for _ in 0..10 {
            let n = rng.random_range(2..8usize);
            let ims_a: Vec<f64> = (0..q).map(|_| rng.random_range(-2.0..2.0)).collect();
            let ims_b: Vec<f64> = (0..q).map(|_| rng.random_range(-2.0..2.0)).collect();
            let at = |delta: f64| {
                ArgumentSets::new(
                    ims_a.iter().map(|&y| c(delta, y)).collect(),
                    ims_b.iter().map(|&y| c(delta, y)).collect(),
                    n,
                )
            };
            let delta = 0.3;
            let v1 = jstar_layer(&at(delta), q).unwrap().norm();
            let v2 = jstar_layer(&at(2.0 * delta), q).unwrap().norm();
            let predicted = (-2.0 * n as f64 * delta * q as f64).exp();
            assert!(v2 / v1 <= 1.1 * predicted, "q={q} ratio {} vs {}", v2 / v1, predicted);
        }
    }
}

proptest! {
    #[test]
    fn ratios_closed_form_is_symmetric(
        ar in 0.05f64..1.0, ai in -2.0f64..2.0, br in 0.05f64..1.0, bi in -2.0f64..2.0,
        gr in 0.1f64..1.5, gi in -2.0f64..2.0, dr in 0.1f64..1.5, di in -2.0f64..2.0, n in 1usize..10,
    ) {
        let (al, be, ga, de) = (c(ar, ai), c(br, bi), c(gr, gi), c(dr, di));
        if let (Ok(x), Ok(y)) = (ratios_closed_form(n, al, be, ga, de), ratios_closed_form(n, be, al, de, ga)) {
            prop_assert!((x - y).norm() <= 1e-9 * (1.0 + x.norm()));
        }
    }
}

#[test]
fn ratios_closed_form_limits() {
    let (al, be, ga, de) = (c(20.0, 0.3), c(20.0, -0.1), c(0.3, 0.0), c(0.4, 0.0));
    let v = ratios_closed_form(5, al, be, ga, de).unwrap();
    let first = z_fn(al + be).unwrap() * z_fn(ga + de).unwrap() / (z_fn(al + de).unwrap() * z_fn(be + ga).unwrap());
    assert!((v - first).norm() < 1e-12);
    // Large γ, δ: Σ_{k=0}^{N} e^{−k(α+β)}.
    let (al, be) = (c(0.2, 0.0), c(0.2, 0.0));
    let v = ratios_closed_form(4, al, be, c(30.0, 0.0), c(30.0, 0.0)).unwrap();
    let expected: f64 = (0..=4).map(|k| (-0.4 * k as f64).exp()).sum();
    assert!((v.re - expected).abs() < 1e-10 && v.im.abs() < 1e-12);
}
