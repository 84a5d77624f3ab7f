use bklab_core::backward_error::build_t;
use bklab_core::linalg::singular_values;
use bklab_core::spectral::{
    build_g, g_singular_values, sigma_max_w_closed, sigma_min_from_w, sigma_min_t_closed, sweep, verify_w_direct_sum, SWEEP_TOL,
};
use proptest::prelude::*;

fn min_sv(eps: usize, eta: usize, m: usize, n: usize) -> f64 {
    *singular_values(&build_t(eps, eta, m, n).unwrap()).last().unwrap()
}

proptest! {
    #[test]
    fn t_identity_through_w(eps in 1usize..=8, eta in 1usize..=8) {
        let a = sigma_min_t_closed(eps, eta).unwrap();
        prop_assert!((a - sigma_min_from_w(eps, eta).unwrap()).abs() <= 1e-14);
        prop_assert!((a - (2.0 - sigma_max_w_closed(eps, eta).unwrap()).sqrt()).abs() <= 1e-14);
    }

    #[test]
    fn kronecker_factors_keep_sigma_min(eps in 1usize..=2, eta in 1usize..=2, m in 1usize..=3, n in 1usize..=3) {
        prop_assert!((min_sv(eps, eta, m, n) - min_sv(eps, eta, 1, 1)).abs() <= 1e-12);
    }
}

#[test]
fn closed_form_decreases_with_min_index() {
    for k in 1..8 {
        for extra in 0..3 {
            let here = sigma_min_t_closed(k + extra, k).unwrap();
            let next = sigma_min_t_closed(k + 1 + extra, k + 1).unwrap();
            assert!(next < here, "k={k} extra={extra}");
        }
    }
}

#[test]
fn direct_sum_over_desk_sweep() {
    for eps in 1..=6 {
        for eta in 1..=eps {
            assert!(verify_w_direct_sum(eps, eta, 1e-12).unwrap(), "({eps},{eta})");
        }
    }
}

#[test]
fn g_spectrum_fixture() {
    let text = include_str!("fixtures/g_spectrum.txt");
    let mut rows = 0;
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        let f: Vec<f64> = line.split_whitespace().map(|x| x.parse().unwrap()).collect();
        let (k, j) = (f[0] as usize, f[1] as usize);
        let ours = g_singular_values(k)[j - 1];
        let svd = singular_values(&build_g(k))[j - 1];
        assert!((ours - f[2]).abs() < 1e-13 && (ours - f[3]).abs() < 1e-13 && (ours - f[4]).abs() < 1e-13);
        assert!((svd - f[2]).abs() < 1e-13);
        rows += 1;
    }
    assert_eq!(rows, (1..=8).sum::<usize>());
}

#[test]
fn shipped_sweep_passes() {
    for row in sweep(5).unwrap() {
        assert!(row.passes(SWEEP_TOL), "{} gap {:e}", row.label, row.gap);
    }
}
