//! Closed-form singular values of the structured matrices behind the
//! backward-error constants, with numeric cross-checks.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use core::f64::consts::PI;
use num_traits::Float;

use crate::backward_error::build_t;
use crate::linalg::{singular_values, Matrix, C64};
use crate::matpoly::{build_l_kron, build_lambda_kron};
use crate::Error;

/// Gap accepted between a closed form and an SVD in the sweep.
pub const SWEEP_TOL: f64 = 1e-12;

fn require_positive(eps: usize, eta: usize) -> Result<(), Error> {
    if eps == 0 || eta == 0 {
        return Err(Error::Shape(format!("epsilon and eta must be at least 1, got ({eps}, {eta})")));
    }
    Ok(())
}

/// `σ_min(T)` for the Sylvester operator of an `(ε, η)` block Kronecker pencil.
pub fn sigma_min_t_closed(eps: usize, eta: usize) -> Result<f64, Error> {
    require_positive(eps, eta)?;
    let k = eps.min(eta) as f64;
    Ok(if eps == eta { 2.0 * (PI / (4.0 * k)).sin() } else { 2.0 * (PI / (4.0 * k + 2.0)).sin() })
}

/// `2√2/d`, a lower bound for `σ_min(T)` with `d = ε + η + 1`.
pub fn sigma_min_t_lower_bound(d: usize) -> f64 {
    2.0 * core::f64::consts::SQRT_2 / d as f64
}

/// `k × k` down-shift.
pub fn shift_matrix(k: usize) -> Matrix {
    Matrix::from_fn(k, k, |i, j| if i == j + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

/// `W_{ε,η} = I_ε ⊗ J_η + J_ε ⊗ I_η`.
pub fn build_w(eps: usize, eta: usize) -> Result<Matrix, Error> {
    require_positive(eps, eta)?;
    Ok(&Matrix::identity(eps).kron(&shift_matrix(eta)) + &shift_matrix(eps).kron(&Matrix::identity(eta)))
}

pub fn sigma_max_w_closed(eps: usize, eta: usize) -> Result<f64, Error> {
    require_positive(eps, eta)?;
    let k = eps.min(eta);
    Ok(match (eps == eta, k) {
        (true, 1) => 0.0,
        (false, 1) => 1.0,
        (false, _) => 2.0 * (PI / (2 * k + 1) as f64).cos(),
        (true, _) => 2.0 * (PI / (2 * k) as f64).cos(),
    })
}

/// `√(2 − σ_max(W_{ε,η}))`.
pub fn sigma_min_from_w(eps: usize, eta: usize) -> Result<f64, Error> {
    Ok((2.0 - sigma_max_w_closed(eps, eta)?).sqrt())
}

/// `k × k` upper bidiagonal matrix of ones.
pub fn build_m(k: usize) -> Matrix {
    Matrix::from_fn(k, k, |i, j| if j == i || j == i + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

/// `(k+1) × k` lower bidiagonal matrix of ones.
pub fn build_g(k: usize) -> Matrix {
    Matrix::from_fn(k + 1, k, |i, j| if i == j || i == j + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

/// `σ_j(M_k) = √(2 + 2cos(2jπ/(2k+1)))`, descending.
pub fn m_singular_values(k: usize) -> Vec<f64> {
    (1..=k).map(|j| (2.0 + 2.0 * (2.0 * j as f64 * PI / (2 * k + 1) as f64).cos()).max(0.0).sqrt()).collect()
}

/// `σ_j(G_k) = √(2 + 2cos(jπ/(k+1)))`, descending. The same multiset as
/// `√(2 − 2cos(jπ/(k+1)))`, the eigenvalues of `tridiag(1, 2, 1)`.
pub fn g_singular_values(k: usize) -> Vec<f64> {
    (1..=k).map(|j| (2.0 + 2.0 * (j as f64 * PI / (k + 1) as f64).cos()).max(0.0).sqrt()).collect()
}

fn sort_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Predicted singular values of `W_{ε,η}` for `ε ≥ η`: `ε − η` copies of
/// `σ(M_η)`, then `σ(G_k ⊕ G_k^T)` (including its zero) for `k < η`, then `0`.
pub fn w_direct_sum_prediction(eps: usize, eta: usize) -> Result<Vec<f64>, Error> {
    require_positive(eps, eta)?;
    if eps < eta {
        return Err(Error::Shape(format!("direct sum needs epsilon >= eta, got ({eps}, {eta}); swap the arguments")));
    }
    let mut out = Vec::with_capacity(eps * eta);
    for _ in 0..eps - eta {
        out.extend(m_singular_values(eta));
    }
    for k in 1..eta {
        let g = g_singular_values(k);
        out.extend(g.iter().copied());
        out.extend(g);
        out.push(0.0);
    }
    out.push(0.0);
    Ok(sort_desc(out))
}

/// Largest elementwise gap between sorted multisets; infinite on a size mismatch.
pub fn multiset_gap(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let (a, b) = (sort_desc(a.to_vec()), sort_desc(b.to_vec()));
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn verify_w_direct_sum(eps: usize, eta: usize, tol: f64) -> Result<bool, Error> {
    let predicted = w_direct_sum_prediction(eps, eta)?;
    Ok(multiset_gap(&predicted, &singular_values(&build_w(eps, eta)?)) <= tol)
}

/// Constants of the convolution matrices of `L_ε ⊗ I_n` and `Λ_ε^T ⊗ I_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvolutionConstants {
    /// `2sin(π/(4ε+2))`.
    pub closed: f64,
    /// `3/(2(ε+1))`.
    pub lower_bound: f64,
    /// `σ_min(C_{ε−1}(L_ε ⊗ I_n))`.
    pub numeric_square: f64,
    /// `σ_min(C_ε(L_ε ⊗ I_n))`.
    pub numeric_wide: f64,
    /// `σ_min(C_0(Λ_ε^T ⊗ I_n))`.
    pub lambda_c0: f64,
    /// `σ_min(C_1(Λ_ε^T ⊗ I_n))`.
    pub lambda_c1: f64,
    /// Gap of `σ(C_{ε−1}(L_ε))` against `⊔_k σ(M_k) ∪ σ(M_k^T)`.
    pub square_multiset_gap: f64,
    /// Gap of `σ(C_ε(L_ε))` against the same union with `σ(G_ε^T)`.
    pub wide_multiset_gap: f64,
}

impl ConvolutionConstants {
    pub fn max_gap(&self) -> f64 {
        [
            (self.closed - self.numeric_square).abs(),
            (self.closed - self.numeric_wide).abs(),
            (self.lambda_c0 - 1.0).abs(),
            (self.lambda_c1 - 1.0).abs(),
            self.square_multiset_gap,
            self.wide_multiset_gap,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn min_sv(a: &Matrix) -> f64 {
    singular_values(a).last().copied().unwrap_or(0.0)
}

/// Predicted `σ(C_{ε−1}(L_ε))`, and with `wide` that of `C_ε(L_ε)`.
pub fn convolution_l_prediction(eps: usize, wide: bool) -> Vec<f64> {
    let mut out = Vec::new();
    for k in 1..=eps {
        out.extend(m_singular_values(k));
        out.extend(m_singular_values(k));
    }
    if wide {
        out.extend(g_singular_values(eps));
    }
    sort_desc(out)
}

pub fn sigma_min_convolution_l(eps: usize, n: usize) -> Result<ConvolutionConstants, Error> {
    if eps == 0 || n == 0 {
        return Err(Error::Shape(format!("epsilon and n must be at least 1, got ({eps}, {n})")));
    }
    let l = build_l_kron(eps, n).to_polynomial();
    let lam_t = build_lambda_kron(eps, n).transpose();
    let l1 = build_l_kron(eps, 1).to_polynomial();
    Ok(ConvolutionConstants {
        closed: 2.0 * (PI / (4 * eps + 2) as f64).sin(),
        lower_bound: 1.5 / (eps + 1) as f64,
        numeric_square: min_sv(&l.convolution(eps - 1).matrix),
        numeric_wide: min_sv(&l.convolution(eps).matrix),
        lambda_c0: min_sv(&lam_t.convolution(0).matrix),
        lambda_c1: min_sv(&lam_t.convolution(1).matrix),
        square_multiset_gap: multiset_gap(&convolution_l_prediction(eps, false), &singular_values(&l1.convolution(eps - 1).matrix)),
        wide_multiset_gap: multiset_gap(&convolution_l_prediction(eps, true), &singular_values(&l1.convolution(eps).matrix)),
    })
}

/// One closed-form prediction checked against an SVD.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularValuePrediction {
    pub label: String,
    pub predicted: Vec<f64>,
    pub numeric: Vec<f64>,
    pub gap: f64,
}

impl SingularValuePrediction {
    fn new(label: String, predicted: Vec<f64>, numeric: Vec<f64>) -> Self {
        let gap = multiset_gap(&predicted, &numeric);
        Self { label, predicted, numeric, gap }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.gap <= tol
    }
}

/// Every shipped closed form for `1 ≤ ε, η, k ≤ max`.
pub fn sweep(max: usize) -> Result<Vec<SingularValuePrediction>, Error> {
    let mut out = Vec::new();
    for eps in 1..=max {
        for eta in 1..=max {
            let t = build_t(eps, eta, 1, 1)?;
            out.push(SingularValuePrediction::new(
                format!("sigma_min T({eps},{eta})"),
                [sigma_min_t_closed(eps, eta)?].into(),
                [min_sv(&t)].into(),
            ));
            let w = build_w(eps, eta)?;
            let smax = singular_values(&w).first().copied().unwrap_or(0.0);
            out.push(SingularValuePrediction::new(
                format!("sigma_max W({eps},{eta})"),
                [sigma_max_w_closed(eps, eta)?].into(),
                [smax].into(),
            ));
            let (hi, lo) = (eps.max(eta), eps.min(eta));
            out.push(SingularValuePrediction::new(
                format!("sigma W({eps},{eta}) direct sum"),
                w_direct_sum_prediction(hi, lo)?,
                singular_values(&w),
            ));
        }
    }
    for k in 1..=max {
        out.push(SingularValuePrediction::new(format!("sigma M_{k}"), m_singular_values(k), singular_values(&build_m(k))));
        out.push(SingularValuePrediction::new(format!("sigma G_{k}"), g_singular_values(k), singular_values(&build_g(k))));
        let c = sigma_min_convolution_l(k, 1)?;
        out.push(SingularValuePrediction::new(format!("sigma_min C_(eps-1)(L_{k})"), [c.closed].into(), [c.numeric_square].into()));
        out.push(SingularValuePrediction::new(format!("sigma_min C_eps(L_{k})"), [c.closed].into(), [c.numeric_wide].into()));
        out.push(SingularValuePrediction::new(format!("sigma_min C_1(Lambda_{k}^T)"), [1.0].into(), [c.lambda_c1].into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral_norm;

    #[test]
    fn closed_forms_at_anchors() {
        assert!((sigma_min_t_closed(1, 1).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((sigma_min_t_closed(2, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!(sigma_min_t_closed(0, 2).is_err());
        assert_eq!(sigma_max_w_closed(1, 1).unwrap(), 0.0);
        assert_eq!(sigma_max_w_closed(3, 1).unwrap(), 1.0);
        assert!((sigma_max_w_closed(2, 2).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((sigma_min_from_w(2, 2).unwrap() - 2.0 * (PI / 8.0).sin()).abs() < 1e-15);
        assert!((m_singular_values(2)[0] - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-6);
        assert!((m_singular_values(1)[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn small_w_layouts() {
        assert_eq!(build_w(1, 1).unwrap(), Matrix::zeros(1, 1));
        assert_eq!(build_w(2, 1).unwrap(), shift_matrix(2));
        let w = build_w(2, 2).unwrap();
        assert_eq!(w.block(0, 0, 2, 2), shift_matrix(2));
        assert_eq!(w.block(2, 2, 2, 2), shift_matrix(2));
        assert_eq!(w.block(2, 0, 2, 2), Matrix::identity(2));
        assert_eq!(w.block(0, 2, 2, 2), Matrix::zeros(2, 2));
    }

    #[test]
    fn w_and_t_identity() {
        for e in 1..=8 {
            for h in 1..=8 {
                assert!((sigma_min_t_closed(e, h).unwrap() - sigma_min_from_w(e, h).unwrap()).abs() < 1e-14, "({e},{h})");
            }
        }
    }

    #[test]
    fn t_closed_form_matches_svd() {
        for e in 1..=4 {
            for h in 1..=4 {
                let t = build_t(e, h, 1, 1).unwrap();
                let gap = (min_sv(&t) - sigma_min_t_closed(e, h).unwrap()).abs();
                assert!(gap < 1e-12, "({e},{h}) gap {gap}");
                assert!(sigma_min_t_closed(e, h).unwrap() >= sigma_min_t_lower_bound(e + h + 1));
            }
        }
    }

    #[test]
    fn bidiagonal_spectra_match_svd() {
        for k in 1..=8 {
            assert!(multiset_gap(&m_singular_values(k), &singular_values(&build_m(k))) < 1e-13, "M_{k}");
            assert!(multiset_gap(&g_singular_values(k), &singular_values(&build_g(k))) < 1e-13, "G_{k}");
            assert!(multiset_gap(&g_singular_values(k), &singular_values(&build_g(k).transpose())) < 1e-13);
        }
    }

    #[test]
    fn direct_sum_examples() {
        // (3,2): one copy of σ(M_2), σ(G_1 ⊕ G_1^T), and a trailing zero.
        let mut want = m_singular_values(2);
        want.extend([2f64.sqrt(), 2f64.sqrt(), 0.0, 0.0]);
        assert!(multiset_gap(&want, &w_direct_sum_prediction(3, 2).unwrap()) < 1e-15);
        assert!(w_direct_sum_prediction(2, 3).is_err());
        for e in 1..=6 {
            for h in 1..=e {
                assert!(verify_w_direct_sum(e, h, 1e-12).unwrap(), "({e},{h})");
            }
        }
    }

    #[test]
    fn convolution_constants() {
        let c = sigma_min_convolution_l(1, 1).unwrap();
        assert!((c.closed - 1.0).abs() < 1e-15);
        let c = sigma_min_convolution_l(3, 2).unwrap();
        assert!(c.max_gap() < 1e-12, "{c:?}");
        assert!(c.closed >= c.lower_bound);
        for e in 1..=5 {
            let c = sigma_min_convolution_l(e, 1).unwrap();
            assert!((c.lambda_c0 - 1.0).abs() < 1e-15 && (c.lambda_c1 - 1.0).abs() < 1e-14);
            assert!(c.max_gap() < 1e-12, "eps={e}");
        }
    }

    #[test]
    fn lambda_c1_spectrum() {
        let (e, n) = (3, 2);
        let c1 = build_lambda_kron(e, n).transpose().convolution(1).matrix;
        let mut want = alloc::vec![1.0; 2 * n];
        want.extend(alloc::vec![2f64.sqrt(); e * n]);
        assert!(multiset_gap(&want, &singular_values(&c1)) < 1e-14);
        assert!((spectral_norm(&c1) - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn sweep_passes() {
        let rows = sweep(4).unwrap();
        for r in &rows {
            assert!(r.passes(SWEEP_TOL), "{} gap {}", r.label, r.gap);
        }
    }
}
