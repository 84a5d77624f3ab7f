mod common;

use bklab_core::block_kronecker::{from_polynomial, Placement};
use bklab_core::eigenstructure::{
    generalized_eigenvalues, match_chordal, match_chordal_finite, min_chordal_gap, right_minimal_indices_by_convolution, shift_recovery,
    staircase_eigenstructure,
};
use bklab_core::{RankPolicy, C64};
use common::*;
use proptest::prelude::*;

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn staircase_matches_convolution_oracle(seed: u64, m in 2usize..4, n in 2usize..4, dg in 1usize..3, dh in 0usize..2, split in 0usize..4) {
        let policy = RankPolicy::default();
        let mut r = rng(seed);
        let rank = m.min(n) - 1;
        let p = int_singular_poly(&mut r, m, n, rank, dg, dh);
        let d = p.grade();
        let eps = split % d;
        let eta = d - 1 - eps;
        let l = from_polynomial(&p, eps, eta, &Placement::Hook).unwrap();
        let e = shift_recovery(&staircase_eigenstructure(&l.assemble(), &policy).unwrap(), eps, eta).unwrap();
        let oracle = right_minimal_indices_by_convolution(&p, 4 * d * n, &policy).unwrap();
        let left = right_minimal_indices_by_convolution(&p.transpose(), 4 * d * m, &policy).unwrap();
        // Exactly singular inputs can leave a roundoff singular value next to the threshold.
        let borderline = |log: &[bklab_core::RankDecision]| log.iter().any(|d| d.is_borderline());
        prop_assume!(!borderline(&e.rank_log) && !borderline(&oracle.rank_log) && !borderline(&left.rank_log));
        prop_assert_eq!(sorted(e.right.clone()), sorted(oracle.indices));
        prop_assert_eq!(sorted(e.left.clone()), sorted(left.indices));
    }

    #[test]
    fn linearizations_share_eigenvalues_with_det(seed: u64, n in 1usize..4, d in 1usize..5) {
        let policy = RankPolicy::default();
        let p = random_poly(&mut rng(seed), n, n, d);
        let a = from_polynomial(&p, 0, d - 1, &Placement::Hook).unwrap();
        let b = from_polynomial(&p, d - 1, 0, &Placement::Hook).unwrap();
        let ea = generalized_eigenvalues(&a.assemble(), &policy).unwrap();
        let eb = generalized_eigenvalues(&b.assemble(), &policy).unwrap();
        let roots = aberth_roots(&det_poly(&p));
        prop_assert_eq!(ea.infinite, eb.infinite);
        prop_assert_eq!(ea.finite.len(), roots.len());
        let ab = match_chordal_finite(&ea.finite, &eb.finite).unwrap();
        prop_assert!(ab.max_distance <= 1e-8, "pencils differ by {}", ab.max_distance);
        let ar = match_chordal_finite(&ea.finite, &roots).unwrap();
        prop_assert!(ar.max_distance <= 1e-8, "det roots differ by {}", ar.max_distance);
    }

    #[test]
    fn staircase_is_unitarily_invariant(seed: u64, m in 2usize..4, n in 2usize..4, split in 0usize..3) {
        let policy = RankPolicy::default();
        let mut r = rng(seed);
        let p = int_singular_poly(&mut r, m, n, m.min(n) - 1, 1, 1);
        let d = p.grade();
        let eps = split % d;
        let l = from_polynomial(&p, eps, d - 1 - eps, &Placement::Hook).unwrap().assemble();
        let (rows, cols) = l.shape();
        let u = random_unitary(&mut r, rows);
        let v = random_unitary(&mut r, cols);
        let lr = l.equivalence(&u, &v);
        let a = staircase_eigenstructure(&l, &policy).unwrap();
        let b = staircase_eigenstructure(&lr, &policy).unwrap();
        // Rotations perturb the pencil at roundoff level; decisions near the threshold are not well posed.
        prop_assume!(!a.has_borderline_decision() && !b.has_borderline_decision());
        prop_assert_eq!(sorted(a.right.clone()), sorted(b.right.clone()));
        prop_assert_eq!(sorted(a.left.clone()), sorted(b.left.clone()));
        prop_assert_eq!(&a.infinite, &b.infinite);
        // Multiple eigenvalues move by O(√u) under a rotation.
        let tol = if min_chordal_gap(&a.spectrum()) > 1e-4 { 1e-10 } else { 1e-6 };
        let mt = match_chordal(&a.spectrum(), &b.spectrum());
        prop_assert!(mt.is_some_and(|mt| mt.max_distance <= tol));
    }

    #[test]
    fn infinite_count_is_degree_deficit_of_det(seed: u64, n in 1usize..4, d in 1usize..4, drop in 1usize..3) {
        let policy = RankPolicy::default();
        let mut r = rng(seed);
        let mut p = int_poly(&mut r, n, n, d);
        // Zero the leading coefficient's trailing rows so that P has eigenvalues at infinity.
        let keep = n.saturating_sub(drop);
        let top = p.coeff_mut(d);
        for i in keep..n {
            for j in 0..n {
                top[(i, j)] = C64::new(0.0, 0.0);
            }
        }
        // Integer coefficients make the determinant exact; n·d − deg det P is the zero multiplicity of rev P at 0.
        let det = det_poly(&p);
        let deg = det.iter().rposition(|z| z.norm() != 0.0);
        prop_assume!(deg.is_some());
        let l = from_polynomial(&p, 0, d - 1, &Placement::Hook).unwrap().assemble();
        let a = staircase_eigenstructure(&l, &policy).unwrap();
        prop_assert_eq!(a.infinite.iter().sum::<usize>(), n * d - deg.unwrap());
        prop_assert_eq!(a.finite_count(), deg.unwrap());
    }
}
