mod common;

use bklab_core::backward_error::{assemble_step3, pipeline_radius, run_pipeline, solve_step2, PerturbationBlocks, PipelineOptions};
use bklab_core::block_kronecker::{from_polynomial, BlockKroneckerPencil, Placement};
use bklab_core::RankPolicy;
use common::*;
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;

fn setup(seed: u64, m: usize, n: usize, eps: usize, eta: usize) -> (ChaCha8Rng, BlockKroneckerPencil) {
    let mut r = rng(seed);
    let p = normalized(&random_poly(&mut r, m, n, eps + eta + 1));
    let l = from_polynomial(&p, eps, eta, &Placement::Hook).unwrap();
    (r, l)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bounds_hold_inside_radius(seed: u64, m in 1usize..3, n in 1usize..3, eps in 0usize..3, eta in 0usize..3, frac in 0.01f64..0.99) {
        let (mut r, l) = setup(seed, m, n, eps, eta);
        let (rows, cols) = l.shape();
        let dl = random_pencil(&mut r, rows, cols, frac * pipeline_radius(&l));
        let rep = run_pipeline(&l, &dl, &PipelineOptions::default()).unwrap();
        prop_assert!(rep.guaranteed);
        prop_assert!(rep.all_bounds_hold(), "{:?}", rep.failed_checks());
        prop_assert!(rep.step1.residual <= 10.0 * rep.step1.stop_tol || rep.step1.iterations == 0);

        let ks = &rep.step1.kappa;
        if let Some(g) = &rep.step1.gauge {
            prop_assert!(g.admissible());
            let lim = g.kappa_limit().unwrap();
            prop_assert!(ks.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(ks.iter().all(|&k| k <= lim));
        }

        let s = rep.spectra.as_ref().unwrap();
        prop_assert!(s.indices_agree, "{:?}", s);
        if s.applicable {
            prop_assert!(s.passed, "{:?}", s);
        }
    }

    #[test]
    fn eta_zero_matches_direct_degenerate_path(seed: u64, m in 1usize..3, n in 1usize..3, eps in 0usize..4) {
        let (mut r, l) = setup(seed, m, n, eps, 0);
        let (rows, cols) = l.shape();
        let dl = random_pencil(&mut r, rows, cols, 0.5 * pipeline_radius(&l));
        let rep = run_pipeline(&l, &dl, &PipelineOptions::default()).unwrap();
        let blocks = PerturbationBlocks::split(&l, &dl).unwrap();
        let policy = RankPolicy::default();
        let s2 = solve_step2(&blocks.l21(), eps, n, &policy, false).unwrap();
        let s2_eta = solve_step2(&blocks.l12().transpose(), 0, m, &policy, false).unwrap();
        let dp = assemble_step3(&l, &blocks.l11(), &s2.delta_r, &s2_eta.delta_r, false).unwrap();
        prop_assert_eq!(rep.delta_p, dp);
    }
}
