mod common;

use bklab_core::matpoly::{build_l, build_lambda, verify_norm_inequalities};
use bklab_core::MatrixPolynomial;
use common::*;
use proptest::prelude::*;

fn rel(a: &MatrixPolynomial, b: &MatrixPolynomial) -> f64 {
    a.sub(b).unwrap().frobenius_norm() / (1.0 + b.frobenius_norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn padding_keeps_the_norm(seed: u64, m in 1usize..4, n in 1usize..4, d in 0usize..6) {
        let p = random_poly(&mut rng(seed), m, n, d);
        prop_assert_eq!(p.with_grade(d + 5).unwrap().frobenius_norm(), p.frobenius_norm());
    }

    #[test]
    fn reversal_is_an_involution(seed: u64, m in 1usize..4, n in 1usize..4, d in 0usize..6, extra in 0usize..3) {
        let p = random_poly(&mut rng(seed), m, n, d);
        let g = d + extra;
        let back = p.reversal(g).unwrap().reversal(g).unwrap();
        prop_assert_eq!(back, p.with_grade(g).unwrap());
    }

    #[test]
    fn multiply_is_associative_and_bilinear(seed: u64, a in 1usize..4, b in 1usize..4, c in 1usize..4, e in 1usize..4, d in 0usize..4) {
        let mut r = rng(seed);
        let p = random_poly(&mut r, a, b, d);
        let q = random_poly(&mut r, b, c, d + 1);
        let q2 = random_poly(&mut r, b, c, d);
        let s = random_poly(&mut r, c, e, 2);
        let left = p.multiply(&q).unwrap().multiply(&s).unwrap();
        let right = p.multiply(&q.multiply(&s).unwrap()).unwrap();
        prop_assert!(rel(&left, &right) < 1e-12);
        let sum = p.multiply(&q.add(&q2).unwrap()).unwrap();
        let split = p.multiply(&q).unwrap().add(&p.multiply(&q2).unwrap()).unwrap();
        prop_assert!(rel(&sum, &split) < 1e-12);
    }

    #[test]
    fn convolution_represents_products(seed: u64, m in 1usize..4, k in 1usize..4, n in 1usize..4, dq in 0usize..4, j in 0usize..4) {
        let mut r = rng(seed);
        let q = random_poly(&mut r, m, k, dq);
        let z = random_poly(&mut r, k, n, j);
        let lhs = q.multiply(&z).unwrap().convolution(0).matrix;
        let rhs = &q.convolution(j).matrix * &z.convolution(0).matrix;
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-13 * (1.0 + lhs.frobenius_norm()));
    }

    #[test]
    fn convolution_norm_scales(seed: u64, m in 1usize..4, n in 1usize..4, d in 0usize..5, j in 0usize..5) {
        let q = random_poly(&mut rng(seed), m, n, d);
        let c = q.convolution(j).matrix.frobenius_norm();
        let want = ((j + 1) as f64).sqrt() * q.frobenius_norm();
        prop_assert!((c - want).abs() <= 1e-13 * want);
    }

    #[test]
    fn product_norm_inequalities(seed: u64, a in 1usize..4, b in 1usize..4, c in 1usize..4, d1 in 0usize..4, d2 in 0usize..4) {
        let mut r = rng(seed);
        let p = random_poly(&mut r, a, b, d1);
        let q = random_poly(&mut r, b, c, d2);
        prop_assert!(verify_norm_inequalities(&p, &q).unwrap().all());
    }
}

#[test]
fn l_times_lambda_vanishes_exactly() {
    for k in 0..10 {
        assert!(build_l(k).to_polynomial().multiply(&build_lambda(k)).unwrap().is_zero(), "k={k}");
    }
}
