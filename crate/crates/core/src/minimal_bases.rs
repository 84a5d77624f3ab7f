//! Minimal bases, dual minimal bases, the unimodular completions `V_k` and
//! the convolution-rank tests for Kronecker-type bases.

use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::block_kronecker::{from_polynomial, Placement};
use crate::eigenstructure::{shift_recovery, staircase_eigenstructure};
use crate::linalg::{Matrix, RankDecision, RankPolicy, C64};
use crate::matpoly::{build_l, MatrixPolynomial, Pencil};
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct RowDegreeProfile {
    pub degrees: Vec<usize>,
    /// Row `j` holds the coefficient of `λ^{d_j}` in row `j` of `Q`.
    pub highest: Matrix,
    pub row_reduced: bool,
    pub rank_decision: RankDecision,
}

pub fn row_degree_profile(q: &MatrixPolynomial, policy: &RankPolicy) -> Result<RowDegreeProfile, Error> {
    let (m, n) = q.shape();
    let mut degrees = Vec::with_capacity(m);
    let mut highest = Matrix::zeros(m, n);
    for i in 0..m {
        let deg = (0..=q.grade()).rev().find(|&k| q.coeff(k).row(i).iter().any(|x| !x.is_zero())).ok_or(Error::DegenerateRow { row: i })?;
        degrees.push(deg);
        for j in 0..n {
            highest[(i, j)] = q.coeff(deg)[(i, j)];
        }
    }
    let rank_decision = policy.rank_of("highest row degree coefficient", &highest);
    Ok(RowDegreeProfile { row_reduced: rank_decision.rank == m, degrees, highest, rank_decision })
}

/// Whether the rows of `Q` (`m × n`, `m < n`) form a minimal basis: row
/// reduced and of full row rank at every finite `λ0`.
///
/// Full rank everywhere is certified by the staircase on a first companion
/// linearization: the polynomial must have no finite eigenvalues and no
/// left minimal indices.
pub fn is_minimal_basis(q: &MatrixPolynomial, policy: &RankPolicy) -> Result<bool, Error> {
    if q.rows() >= q.cols() {
        return Err(Error::Shape(format!("a minimal basis needs fewer rows than columns, got {}x{}", q.rows(), q.cols())));
    }
    minimal_basis_check(q, policy)
}

/// Same test, also accepting square inputs (unimodular matrices) and empty ones.
fn minimal_basis_check(q: &MatrixPolynomial, policy: &RankPolicy) -> Result<bool, Error> {
    if q.rows() == 0 {
        return Ok(true);
    }
    let profile = row_degree_profile(q, policy)?;
    if !profile.row_reduced {
        return Ok(false);
    }
    let deg = q.degree().unwrap_or(0);
    if deg == 0 {
        return Ok(true);
    }
    let qd = q.with_grade(deg)?;
    let lin = from_polynomial(&qd, deg - 1, 0, &Placement::Frobenius1)?;
    let e = staircase_eigenstructure(&lin.assemble(), policy)?;
    Ok(match shift_recovery(&e, deg - 1, 0) {
        Ok(s) => s.finite.is_empty() && s.left.is_empty(),
        Err(_) => false,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualBasisCertificate {
    pub m1: usize,
    pub m2: usize,
    pub n: usize,
    /// `‖L·N^T‖_F`.
    pub residual: f64,
    pub tolerance: f64,
    pub first_minimal: bool,
    pub second_minimal: bool,
    pub accepted: bool,
}

pub fn are_dual_minimal_bases(l: &MatrixPolynomial, n: &MatrixPolynomial, policy: &RankPolicy) -> Result<DualBasisCertificate, Error> {
    if l.cols() != n.cols() {
        return Err(Error::Shape(format!("dual bases need equal column counts, got {} and {}", l.cols(), n.cols())));
    }
    let residual = l.multiply(&n.transpose())?.frobenius_norm();
    let tolerance = policy.threshold(l.rows().max(n.rows()), l.cols(), 1.0 + l.frobenius_norm() * n.frobenius_norm());
    let first_minimal = minimal_basis_check(l, policy)?;
    let second_minimal = minimal_basis_check(n, policy)?;
    let dims = l.rows() + n.rows() == l.cols();
    Ok(DualBasisCertificate {
        m1: l.rows(),
        m2: n.rows(),
        n: l.cols(),
        residual,
        tolerance,
        first_minimal,
        second_minimal,
        accepted: dims && residual <= tolerance && first_minimal && second_minimal,
    })
}

/// For dual minimal bases with constant row degrees `j` and `ℓ`, checks that
/// `rev_j K` and `rev_ℓ N` are dual minimal bases too.
pub fn check_reversal_duality(k: &MatrixPolynomial, n: &MatrixPolynomial, policy: &RankPolicy) -> Result<bool, Error> {
    let j = constant_row_degree(k, policy)?;
    let l = constant_row_degree(n, policy)?;
    if !are_dual_minimal_bases(k, n, policy)?.accepted {
        return Ok(false);
    }
    let rk = k.reversal(j)?;
    let rn = n.reversal(l)?;
    Ok(are_dual_minimal_bases(&rk, &rn, policy)?.accepted)
}

fn constant_row_degree(q: &MatrixPolynomial, policy: &RankPolicy) -> Result<usize, Error> {
    if q.rows() == 0 {
        return Ok(0);
    }
    let prof = row_degree_profile(q, policy)?;
    let d0 = prof.degrees[0];
    if prof.degrees.iter().any(|&d| d != d0) {
        return Err(Error::Shape(format!("row degrees {:?} are not constant", prof.degrees)));
    }
    Ok(d0)
}

/// `V_k = [L_k; e_{k+1}^T]`, unimodular of size `(k+1) × (k+1)`.
pub fn build_v(k: usize) -> MatrixPolynomial {
    let l = build_l(k);
    let mut e = Matrix::zeros(1, k + 1);
    e[(0, k)] = C64::one();
    let m0 = Matrix::vstack(&[l.m0(), &e]);
    let m1 = Matrix::vstack(&[l.m1(), &Matrix::zeros(1, k + 1)]);
    Pencil::new(m0, m1).expect("same shape").to_polynomial()
}

/// `V_k^{-1}`: row `i` holds `−λ^{j−i}` in columns `j = i..k−1` and the last
/// column is `Λ_k`. For `k = 0` this is `[1]`.
pub fn build_v_inverse(k: usize) -> MatrixPolynomial {
    let mut out = MatrixPolynomial::zeros(k + 1, k + 1, k);
    for i in 0..=k {
        for j in i..k {
            out.coeff_mut(j - i)[(i, j)] = -C64::one();
        }
        out.coeff_mut(k - i)[(i, k)] = C64::one();
    }
    out
}

/// `A + λB` of size `εn × (ε+1)n` is a minimal basis with row degrees 1 and
/// dual row degrees `ε` iff `C_{ε−1}` is nonsingular and `C_ε` has full row rank.
pub fn pencil_is_kronecker_minimal(p: &Pencil, policy: &RankPolicy) -> Result<bool, Error> {
    let (rows, cols) = p.shape();
    if cols <= rows || rows % (cols - rows) != 0 {
        return Err(Error::Shape(format!("expected an εn x (ε+1)n pencil, got {rows}x{cols}")));
    }
    let n = cols - rows;
    let eps = rows / n;
    if eps == 0 {
        return Ok(true);
    }
    let poly = p.to_polynomial();
    let c_prev = poly.convolution(eps - 1).matrix;
    let c_eps = poly.convolution(eps).matrix;
    Ok(policy.rank_of("C_{eps-1} nonsingularity", &c_prev).rank == c_prev.rows()
        && policy.rank_of("C_eps full row rank", &c_eps).rank == c_eps.rows())
}

/// `Q` of size `n × (ε+1)n` and grade `ε` has row degrees `ε` and is dual to
/// a pencil basis iff `C_0(Q)` is nonsingular and `C_1(Q)` has full row rank.
pub fn poly_is_kronecker_dual_minimal(q: &MatrixPolynomial, policy: &RankPolicy) -> Result<bool, Error> {
    let (n, cols) = q.shape();
    if n == 0 || cols % n != 0 || cols / n != q.grade() + 1 {
        return Err(Error::Shape(format!("expected an n x (ε+1)n polynomial of grade ε, got {n}x{cols} of grade {}", q.grade())));
    }
    let c0 = q.convolution(0).matrix;
    let c1 = q.convolution(1).matrix;
    Ok(policy.rank_of("C_0 nonsingularity", &c0).rank == c0.rows() && policy.rank_of("C_1 full row rank", &c1).rank == c1.rows())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::matpoly::{build_l_kron, build_lambda, build_lambda_kron};

    fn pol() -> RankPolicy {
        RankPolicy::default()
    }

    #[test]
    fn profile_of_l2() {
        let p = row_degree_profile(&build_l(2).to_polynomial(), &pol()).unwrap();
        assert_eq!(p.degrees, alloc::vec![1, 1]);
        assert_eq!(p.highest, Matrix::from_real(2, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0]));
        assert!(p.row_reduced);
    }

    #[test]
    fn profile_of_lambda_transpose() {
        let p = row_degree_profile(&build_lambda(2).transpose(), &pol()).unwrap();
        assert_eq!(p.degrees, alloc::vec![2]);
        assert_eq!(p.highest, Matrix::from_real(1, 3, &[1.0, 0.0, 0.0]));
        assert!(p.row_reduced);
    }

    #[test]
    fn profile_not_row_reduced() {
        let q = MatrixPolynomial::linear(Matrix::from_real(2, 2, &[0.0, 0.0, 1.0, 1.0]), Matrix::from_real(2, 2, &[1.0, 1.0, 0.0, 0.0]))
            .unwrap();
        let p = row_degree_profile(&q, &pol()).unwrap();
        assert_eq!(p.highest, Matrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0]));
        assert!(!p.row_reduced);
    }

    #[test]
    fn zero_row_is_rejected() {
        let q = MatrixPolynomial::zeros(2, 3, 1);
        assert_eq!(row_degree_profile(&q, &pol()), Err(Error::DegenerateRow { row: 0 }));
    }

    #[test]
    fn kronecker_l_is_minimal() {
        assert!(is_minimal_basis(&build_l_kron(3, 2).to_polynomial(), &pol()).unwrap());
    }

    #[test]
    fn common_root_is_not_minimal() {
        let q = MatrixPolynomial::linear(Matrix::from_real(1, 2, &[-1.0, -1.0]), Matrix::from_real(1, 2, &[1.0, 1.0])).unwrap();
        assert!(!is_minimal_basis(&q, &pol()).unwrap());
        assert!(matches!(is_minimal_basis(&MatrixPolynomial::identity(2), &pol()), Err(Error::Shape(_))));
    }

    #[test]
    fn l_and_lambda_are_dual() {
        for k in 1..5 {
            for p in 1..3 {
                let c = are_dual_minimal_bases(&build_l_kron(k, p).to_polynomial(), &build_lambda_kron(k, p).transpose(), &pol()).unwrap();
                assert!(c.accepted, "k={k} p={p}: {c:?}");
                assert_eq!(c.residual, 0.0);
            }
        }
    }

    #[test]
    fn perturbed_lambda_is_rejected() {
        let k = 2;
        let mut nt = build_lambda(k).transpose().scale(c64(2.0, 0.0)).with_grade(k + 1).unwrap();
        nt.coeff_mut(k + 1)[(0, 0)] = C64::one();
        let c = are_dual_minimal_bases(&build_l(k).to_polynomial(), &nt, &pol()).unwrap();
        assert!(!c.accepted);
        assert!(c.residual > 0.5);
    }

    #[test]
    fn reversal_duality_of_l_lambda() {
        for k in 1..5 {
            assert!(check_reversal_duality(&build_l(k).to_polynomial(), &build_lambda(k).transpose(), &pol()).unwrap());
        }
    }

    #[test]
    fn empty_pair_is_vacuously_dual() {
        let k = MatrixPolynomial::zeros(0, 3, 0);
        assert!(check_reversal_duality(&k, &MatrixPolynomial::identity(3), &pol()).unwrap());
    }

    #[test]
    fn v1_is_its_own_inverse() {
        let v = build_v(1);
        let w = build_v_inverse(1);
        assert_eq!(v, w);
        assert_eq!(v.coeff(0), &Matrix::from_real(2, 2, &[-1.0, 0.0, 0.0, 1.0]));
        assert_eq!(v.coeff(1), &Matrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn v_times_v_inverse_is_identity() {
        for k in 1..7 {
            let prod = build_v(k).multiply(&build_v_inverse(k)).unwrap();
            assert_eq!(prod.coeff(0), &Matrix::identity(k + 1));
            assert!(prod.coeffs()[1..].iter().all(Matrix::is_zero));
            let vinv = build_v_inverse(k);
            assert_eq!(vinv.block(0, k, k + 1, 1), build_lambda(k));
        }
    }

    #[test]
    fn kronecker_minimal_pencils() {
        assert!(pencil_is_kronecker_minimal(&build_l_kron(3, 2), &pol()).unwrap());
        let l = build_l_kron(2, 1);
        let b_zero = Pencil::new(l.m0().clone(), Matrix::zeros(2, 3)).unwrap();
        assert!(!pencil_is_kronecker_minimal(&b_zero, &pol()).unwrap());
        assert!(matches!(
            pencil_is_kronecker_minimal(&Pencil::new(Matrix::zeros(3, 3), Matrix::zeros(3, 3)).unwrap(), &pol()),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn kronecker_dual_minimal_polys() {
        let q = build_lambda_kron(3, 2).transpose();
        assert!(poly_is_kronecker_dual_minimal(&q, &pol()).unwrap());
        assert_eq!(q.convolution(0).matrix, Matrix::identity(8));
        let mut bad = q.clone();
        *bad.coeff_mut(3) = Matrix::zeros(2, 8);
        assert!(!poly_is_kronecker_dual_minimal(&bad, &pol()).unwrap());
    }
}
