//! `(ε, n, η, m)` block Kronecker pencils
//!
//! ```text
//! ⎡ λM_1 + M_0    L_η(λ)^T ⊗ I_m ⎤
//! ⎣ L_ε(λ) ⊗ I_n        0        ⎦
//! ```
//!
//! with the `(1,1)` block of size `(η+1)m × (ε+1)n`.

use alloc::format;
use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::matpoly::{build_l_kron, build_lambda_kron, MatrixPolynomial, Pencil};
use crate::minimal_bases::build_v_inverse;
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct BlockKroneckerPencil {
    epsilon: usize,
    eta: usize,
    m: usize,
    n: usize,
    m0: Matrix,
    m1: Matrix,
}

impl BlockKroneckerPencil {
    /// Stores the `(1,1)` block `λM_1 + M_0`; both must be `(η+1)m × (ε+1)n`.
    pub fn new(m0: Matrix, m1: Matrix, epsilon: usize, eta: usize, m: usize, n: usize) -> Result<Self, Error> {
        let want = ((eta + 1) * m, (epsilon + 1) * n);
        if m0.shape() != want {
            return Err(Error::DimensionMismatch { op: "block Kronecker M_0", left: m0.shape(), right: want });
        }
        if m1.shape() != want {
            return Err(Error::DimensionMismatch { op: "block Kronecker M_1", left: m1.shape(), right: want });
        }
        Ok(Self { epsilon, eta, m, n, m0, m1 })
    }

    pub fn epsilon(&self) -> usize {
        self.epsilon
    }

    pub fn eta(&self) -> usize {
        self.eta
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m0(&self) -> &Matrix {
        &self.m0
    }

    pub fn m1(&self) -> &Matrix {
        &self.m1
    }

    /// Grade `ε + η + 1` of the linearized polynomial.
    pub fn grade(&self) -> usize {
        self.epsilon + self.eta + 1
    }

    /// True when one of the two anti-diagonal blocks is empty.
    pub fn is_degenerate(&self) -> bool {
        self.epsilon == 0 || self.eta == 0
    }

    /// `((η+1)m + εn) × ((ε+1)n + ηm)`.
    pub fn shape(&self) -> (usize, usize) {
        ((self.eta + 1) * self.m + self.epsilon * self.n, (self.epsilon + 1) * self.n + self.eta * self.m)
    }

    /// Row and column counts of the `(1,1)` block.
    pub fn m_shape(&self) -> (usize, usize) {
        ((self.eta + 1) * self.m, (self.epsilon + 1) * self.n)
    }

    pub fn m_pencil(&self) -> Pencil {
        Pencil::new(self.m0.clone(), self.m1.clone()).expect("M_0 and M_1 share a shape")
    }

    pub fn m_polynomial(&self) -> MatrixPolynomial {
        self.m_pencil().to_polynomial()
    }

    pub fn m_norm(&self) -> f64 {
        self.m_pencil().frobenius_norm()
    }

    /// The full pencil with exact `L` blocks and an exact zero `(2,2)` block.
    pub fn assemble(&self) -> Pencil {
        let (rows, cols) = self.shape();
        let (mr, mc) = self.m_shape();
        let mut a = Matrix::zeros(rows, cols);
        let mut b = Matrix::zeros(rows, cols);
        a.set_block(0, 0, &self.m0);
        b.set_block(0, 0, &self.m1);
        if self.eta > 0 {
            let k2t = build_l_kron(self.eta, self.m).transpose();
            a.set_block(0, mc, k2t.m0());
            b.set_block(0, mc, k2t.m1());
        }
        if self.epsilon > 0 {
            let k1 = build_l_kron(self.epsilon, self.n);
            a.set_block(mr, 0, k1.m0());
            b.set_block(mr, 0, k1.m1());
        }
        Pencil::new(a, b).expect("assembled blocks share a shape")
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.assemble().frobenius_norm()
    }
}

/// Placement of the coefficients of `P` inside `λM_1 + M_0`.
#[derive(Clone, Debug, PartialEq)]
pub enum Placement {
    /// `M(λ) = [λP_d + P_{d−1}, P_{d−2}, …, P_0]`; needs `η = 0`.
    Frobenius1,
    /// The column analogue of `Frobenius1`; needs `ε = 0`.
    Frobenius2,
    /// `P_d` in `[M_1]_{11}`, then `P_{d−1}, …` along the first block row of
    /// `M_0` and down its last block column. Works for any `(ε, η)`.
    Hook,
    /// User-supplied blocks, accepted after [`validate_placement`].
    Custom { m0: Matrix, m1: Matrix },
}

impl Placement {
    pub fn tag(&self) -> &'static str {
        match self {
            Placement::Frobenius1 => "frobenius1",
            Placement::Frobenius2 => "frobenius2",
            Placement::Hook => "hook",
            Placement::Custom { .. } => "custom",
        }
    }
}

/// Tolerance used when accepting a custom placement, relative to `‖P‖_F`.
const CUSTOM_PLACEMENT_TOL: f64 = 1e-12;

/// Builds a block Kronecker linearization of `P` (grade `d = ε + η + 1`).
pub fn from_polynomial(p: &MatrixPolynomial, epsilon: usize, eta: usize, placement: &Placement) -> Result<BlockKroneckerPencil, Error> {
    let d = p.grade();
    if epsilon + eta + 1 != d {
        return Err(Error::Placement(format!("epsilon + eta + 1 = {} does not match grade {d}", epsilon + eta + 1)));
    }
    let (m, n) = p.shape();
    match placement {
        Placement::Frobenius1 if eta != 0 => Err(Error::Placement(format!("frobenius1 needs eta = 0, got {eta}"))),
        Placement::Frobenius2 if epsilon != 0 => Err(Error::Placement(format!("frobenius2 needs epsilon = 0, got {epsilon}"))),
        Placement::Frobenius1 | Placement::Frobenius2 | Placement::Hook => {
            let mut m0 = Matrix::zeros((eta + 1) * m, (epsilon + 1) * n);
            let mut m1 = m0.clone();
            m1.set_block(0, 0, p.coeff(d));
            for j in 1..=epsilon + 1 {
                m0.set_block(0, (j - 1) * n, p.coeff(d - j));
            }
            for i in 2..=eta + 1 {
                m0.set_block((i - 1) * m, epsilon * n, p.coeff(d - epsilon - i));
            }
            BlockKroneckerPencil::new(m0, m1, epsilon, eta, m, n)
        }
        Placement::Custom { m0, m1 } => {
            let l = BlockKroneckerPencil::new(m0.clone(), m1.clone(), epsilon, eta, m, n)?;
            let res = validate_placement(&l, p)?;
            let tol = CUSTOM_PLACEMENT_TOL * (1.0 + p.frobenius_norm());
            match res.iter().position(|&r| r > tol) {
                Some(k) => Err(Error::Placement(format!("custom placement misses P_{k} by {:.3e}", res[k]))),
                None => Ok(l),
            }
        }
    }
}

/// Per-`k` residuals of the antidiagonal coefficient condition
/// `Σ_{i+j=d+2−k} [M_1]_{ij} + Σ_{i+j=d+1−k} [M_0]_{ij} = P_k` (1-based blocks).
pub fn validate_placement(l: &BlockKroneckerPencil, p: &MatrixPolynomial) -> Result<Vec<f64>, Error> {
    let d = l.grade();
    if p.grade() != d {
        return Err(Error::Shape(format!("pencil linearizes grade {d}, polynomial has grade {}", p.grade())));
    }
    if p.shape() != (l.m, l.n) {
        return Err(Error::DimensionMismatch { op: "validate_placement", left: (l.m, l.n), right: p.shape() });
    }
    let (m, n) = (l.m, l.n);
    let mut out = Vec::with_capacity(d + 1);
    for k in 0..=d {
        let mut acc = p.coeff(k).scale_real(-1.0);
        for i in 1..=l.eta + 1 {
            for j in 1..=l.epsilon + 1 {
                if i + j + k == d + 2 {
                    acc.add_block(0, 0, &l.m1.block((i - 1) * m, (j - 1) * n, m, n));
                }
                if i + j + k == d + 1 {
                    acc.add_block(0, 0, &l.m0.block((i - 1) * m, (j - 1) * n, m, n));
                }
            }
        }
        out.push(acc.frobenius_norm());
    }
    Ok(out)
}

/// `Q(λ) = (Λ_η^T ⊗ I_m)(λM_1 + M_0)(Λ_ε ⊗ I_n)` at grade `ε + η + 1`.
pub fn recover_polynomial(l: &BlockKroneckerPencil) -> MatrixPolynomial {
    let left = build_lambda_kron(l.eta, l.m).transpose();
    let right = build_lambda_kron(l.epsilon, l.n);
    left.multiply(&l.m_polynomial()).and_then(|x| x.multiply(&right)).expect("block sizes are consistent by construction")
}

/// Block anti-triangular form obtained with the explicit unimodular factors
/// built from `V_η^{-1}` and `V_ε^{-1}`:
///
/// ```text
/// ⎡ Z  X  I ⎤
/// ⎢ Y  P  0 ⎥
/// ⎣ I  0  0 ⎦
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct AntiTriangularForm {
    pub transformed: MatrixPolynomial,
    pub x: MatrixPolynomial,
    pub y: MatrixPolynomial,
    pub z: MatrixPolynomial,
    pub p: MatrixPolynomial,
    pub left_factor: MatrixPolynomial,
    pub right_factor: MatrixPolynomial,
}

/// Layout tolerance, relative to `1 + ‖λM_1 + M_0‖_F`.
const LAYOUT_TOL: f64 = 1e-12;

pub fn anti_triangularize(l: &BlockKroneckerPencil) -> Result<AntiTriangularForm, Error> {
    let (eps, eta, m, n) = (l.epsilon, l.eta, l.m, l.n);
    let left_factor = direct_sum_identity(&build_v_inverse(eta).transpose().kron_identity(m), eps * n);
    let right_factor = direct_sum_identity(&build_v_inverse(eps).kron_identity(n), eta * m);
    let pencil = l.assemble().to_polynomial();
    let transformed = left_factor.multiply(&pencil)?.multiply(&right_factor)?;

    // Row blocks [ηm | m | εn], column blocks [εn | n | ηm].
    let (r1, r2) = (eta * m, eta * m + m);
    let (c1, c2) = (eps * n, eps * n + n);
    let blk = |r0: usize, nr: usize, c0: usize, nc: usize| transformed.block(r0, c0, nr, nc);
    let tol = LAYOUT_TOL * (1.0 + l.m_norm());
    let check = |name: &str, got: &MatrixPolynomial, want: &MatrixPolynomial| -> Result<(), Error> {
        let diff = got.max_abs_diff(want);
        if diff > tol {
            return Err(Error::Layout(format!("{name} block off by {diff:.3e}")));
        }
        Ok(())
    };
    check("(1,3)", &blk(0, eta * m, c2, eta * m), &MatrixPolynomial::identity(eta * m))?;
    check("(3,1)", &blk(r2, eps * n, 0, eps * n), &MatrixPolynomial::identity(eps * n))?;
    check("(2,3)", &blk(r1, m, c2, eta * m), &MatrixPolynomial::zeros(m, eta * m, 0))?;
    check("(3,2)", &blk(r2, eps * n, c1, n), &MatrixPolynomial::zeros(eps * n, n, 0))?;
    check("(3,3)", &blk(r2, eps * n, c2, eta * m), &MatrixPolynomial::zeros(eps * n, eta * m, 0))?;
    let p = blk(r1, m, c1, n);
    check("(2,2)", &p, &recover_polynomial(l))?;
    Ok(AntiTriangularForm {
        x: blk(0, eta * m, c1, n),
        y: blk(r1, m, 0, eps * n),
        z: blk(0, eta * m, 0, eps * n),
        p,
        transformed,
        left_factor,
        right_factor,
    })
}

fn direct_sum_identity(a: &MatrixPolynomial, k: usize) -> MatrixPolynomial {
    let mut out = MatrixPolynomial::zeros(a.rows() + k, a.cols() + k, a.grade());
    out.set_block(0, 0, a);
    out.set_block(a.rows(), a.cols(), &MatrixPolynomial::identity(k));
    out
}

/// Lifts right null vectors `h` of `Q = recover_polynomial(L)` (the columns
/// of an `n × p` polynomial matrix) to right null vectors of `L`:
/// `z = [(Λ_ε ⊗ I_n)h; −N̂_2 M (Λ_ε ⊗ I_n)h]`.
pub fn lift_right_null_vector(l: &BlockKroneckerPencil, h: &MatrixPolynomial, tol: f64) -> Result<MatrixPolynomial, Error> {
    if h.rows() != l.n {
        return Err(Error::DimensionMismatch { op: "lift_right_null_vector", left: (l.n, 1), right: h.shape() });
    }
    let q = recover_polynomial(l);
    let residual = q.multiply(h)?.frobenius_norm();
    if residual > tol {
        return Err(Error::NotInNullSpace { residual, tol });
    }
    let z1 = build_lambda_kron(l.epsilon, l.n).multiply(h)?;
    if l.eta == 0 {
        return Ok(z1);
    }
    let vinv = build_v_inverse(l.eta).kron_identity(l.m);
    let n2_hat = vinv.block(0, 0, vinv.rows(), l.eta * l.m).transpose();
    let z2 = n2_hat.multiply(&l.m_polynomial())?.multiply(&z1)?.scale(crate::c64(-1.0, 0.0));
    let grade = z1.grade().max(z2.grade());
    let z1 = z1.with_grade(grade)?;
    let z2 = z2.with_grade(grade)?;
    let mut z = MatrixPolynomial::zeros(z1.rows() + z2.rows(), h.cols(), grade);
    z.set_block(0, 0, &z1);
    z.set_block(z1.rows(), 0, &z2);
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
        Matrix::from_fn(r, c, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn random_poly(rng: &mut ChaCha8Rng, m: usize, n: usize, d: usize) -> MatrixPolynomial {
        MatrixPolynomial::new((0..=d).map(|_| random_matrix(rng, m, n)).collect()).unwrap()
    }

    /// Places `blocks` (block row, block column, matrix) into an `(η+1)m × (ε+1)n` zero matrix.
    fn blocks(rows: usize, cols: usize, m: usize, n: usize, entries: &[(usize, usize, &Matrix)]) -> Matrix {
        let mut out = Matrix::zeros(rows * m, cols * n);
        for &(i, j, b) in entries {
            out.add_block(i * m, j * n, b);
        }
        out
    }

    #[test]
    fn shape_of_small_pencil() {
        // M = [5λ + 2, 3] with ε = 1, η = 0, m = n = 1.
        let m0 = Matrix::from_real(1, 2, &[2.0, 3.0]);
        let m1 = Matrix::from_real(1, 2, &[5.0, 0.0]);
        let l = BlockKroneckerPencil::new(m0, m1, 1, 0, 1, 1).unwrap();
        let a = l.assemble();
        assert_eq!(a.shape(), (2, 2));
        assert_eq!(a.m0(), &Matrix::from_real(2, 2, &[2.0, 3.0, -1.0, 0.0]));
        assert_eq!(a.m1(), &Matrix::from_real(2, 2, &[5.0, 0.0, 0.0, 1.0]));
        assert!(matches!(
            BlockKroneckerPencil::new(Matrix::zeros(1, 3), Matrix::zeros(1, 3), 1, 0, 1, 1),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn trivial_shifts_give_m_itself() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_poly(&mut rng, 2, 3, 1);
        let l = from_polynomial(&p, 0, 0, &Placement::Hook).unwrap();
        let a = l.assemble();
        assert_eq!(a.m0(), p.coeff(0));
        assert_eq!(a.m1(), p.coeff(1));
        assert_eq!(recover_polynomial(&l), p);
        let f = anti_triangularize(&l).unwrap();
        assert_eq!(f.transformed, p);
    }

    #[test]
    fn first_grade_five_example_assembles_blockwise() {
        let p: Vec<Matrix> = (0..6).map(|k| Matrix::from_real(1, 1, &[(k + 1) as f64])).collect();
        let m0 = blocks(3, 3, 1, 1, &[(0, 0, &p[4]), (1, 1, &p[2]), (2, 2, &p[0])]);
        let m1 = blocks(3, 3, 1, 1, &[(0, 0, &p[5]), (1, 1, &p[3]), (2, 2, &p[1])]);
        let l = BlockKroneckerPencil::new(m0, m1, 2, 2, 1, 1).unwrap();
        let a = l.assemble();
        #[rustfmt::skip]
        let want0 = Matrix::from_real(5, 5, &[
            5.0, 0.0, 0.0, -1.0, 0.0,
            0.0, 3.0, 0.0, 0.0, -1.0,
            0.0, 0.0, 1.0, 0.0, 0.0,
            -1.0, 0.0, 0.0, 0.0, 0.0,
            0.0, -1.0, 0.0, 0.0, 0.0,
        ]);
        #[rustfmt::skip]
        let want1 = Matrix::from_real(5, 5, &[
            6.0, 0.0, 0.0, 0.0, 0.0,
            0.0, 4.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 2.0, 0.0, 1.0,
            0.0, 1.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 1.0, 0.0, 0.0,
        ]);
        assert_eq!(a.m0(), &want0);
        assert_eq!(a.m1(), &want1);
        let poly = MatrixPolynomial::new(p).unwrap();
        assert!(validate_placement(&l, &poly).unwrap().iter().all(|&r| r == 0.0));
    }

    #[test]
    fn second_grade_five_example_recovers_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (m, n) = (2, 3);
        let p = random_poly(&mut rng, m, n, 5);
        let c = |k: usize| p.coeff(k);
        let m1 = blocks(3, 3, m, n, &[(0, 0, c(5)), (0, 1, c(4)), (0, 2, c(3)), (1, 2, c(2)), (2, 2, c(1))]);
        let m0 = blocks(3, 3, m, n, &[(2, 2, c(0))]);
        let l = BlockKroneckerPencil::new(m0, m1, 2, 2, m, n).unwrap();
        assert!(recover_polynomial(&l).max_abs_diff(&p) <= 1e-14 * p.frobenius_norm());
    }

    #[test]
    fn third_grade_five_example_cancels_free_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (m, n) = (2, 2);
        let p = random_poly(&mut rng, m, n, 5);
        let a = random_matrix(&mut rng, m, n).scale_real(1e3);
        let b = random_matrix(&mut rng, m, n).scale_real(1e3);
        let (na, nb) = (-&a, -&b);
        let c = |k: usize| p.coeff(k);
        let m1 = blocks(3, 3, m, n, &[(0, 0, c(5)), (1, 0, c(4)), (2, 0, c(3)), (1, 1, &na), (1, 2, &b), (2, 1, &nb)]);
        let m0 = blocks(3, 3, m, n, &[(0, 1, &a), (0, 2, c(2)), (1, 2, c(1)), (2, 2, c(0))]);
        let l = BlockKroneckerPencil::new(m0, m1, 2, 2, m, n).unwrap();
        let res = validate_placement(&l, &p).unwrap();
        let scale = a.frobenius_norm() + b.frobenius_norm();
        assert!(res.iter().all(|&r| r <= 4.0 * f64::EPSILON * scale), "{res:?}");
        assert!(from_polynomial(&p, 2, 2, &Placement::Custom { m0: l.m0().clone(), m1: l.m1().clone() }).is_ok());
    }

    #[test]
    fn frobenius1_on_quadratic() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = random_poly(&mut rng, 2, 2, 2);
        let l = from_polynomial(&p, 1, 0, &Placement::Frobenius1).unwrap();
        assert_eq!(l.m1(), &Matrix::hstack(&[p.coeff(2), &Matrix::zeros(2, 2)]));
        assert_eq!(l.m0(), &Matrix::hstack(&[p.coeff(1), p.coeff(0)]));
        assert!(matches!(from_polynomial(&p, 0, 1, &Placement::Frobenius1), Err(Error::Placement(_))));
        assert!(matches!(from_polynomial(&p, 1, 0, &Placement::Frobenius2), Err(Error::Placement(_))));
        assert!(matches!(from_polynomial(&p, 1, 1, &Placement::Hook), Err(Error::Placement(_))));
    }

    #[test]
    fn frobenius2_is_column_shaped() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_poly(&mut rng, 2, 3, 3);
        let l = from_polynomial(&p, 0, 2, &Placement::Frobenius2).unwrap();
        assert_eq!(l.m1(), &Matrix::vstack(&[p.coeff(3), &Matrix::zeros(4, 3)]));
        assert_eq!(l.m0(), &Matrix::vstack(&[p.coeff(2), p.coeff(1), p.coeff(0)]));
    }

    #[test]
    fn hook_layout_and_corruption() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (m, n) = (2, 1);
        let p = random_poly(&mut rng, m, n, 5);
        let l = from_polynomial(&p, 2, 2, &Placement::Hook).unwrap();
        assert_eq!(&l.m0().block(0, 0, m, n), p.coeff(4));
        assert_eq!(&l.m0().block(0, n, m, n), p.coeff(3));
        assert_eq!(&l.m0().block(0, 2 * n, m, n), p.coeff(2));
        assert_eq!(&l.m0().block(m, 2 * n, m, n), p.coeff(1));
        assert_eq!(&l.m0().block(2 * m, 2 * n, m, n), p.coeff(0));
        assert_eq!(&l.m1().block(0, 0, m, n), p.coeff(5));
        assert!(validate_placement(&l, &p).unwrap().iter().all(|&r| r == 0.0));

        let e = random_matrix(&mut rng, m, n);
        let mut m0 = l.m0().clone();
        m0.add_block(0, 0, &e);
        let bad = BlockKroneckerPencil::new(m0.clone(), l.m1().clone(), 2, 2, m, n).unwrap();
        let res = validate_placement(&bad, &p).unwrap();
        assert!((res[4] - e.frobenius_norm()).abs() <= 1e-15);
        assert!(res.iter().enumerate().all(|(k, &r)| k == 4 || r == 0.0));
        let custom = Placement::Custom { m0, m1: l.m1().clone() };
        assert!(matches!(from_polynomial(&p, 2, 2, &custom), Err(Error::Placement(_))));
    }

    #[test]
    fn norm_identity_and_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (eps, eta, m, n) in [(1, 1, 2, 3), (2, 0, 1, 2), (0, 3, 2, 2), (2, 2, 1, 1)] {
            let d = eps + eta + 1;
            let p = random_poly(&mut rng, m, n, d);
            let l = from_polynomial(&p, eps, eta, &Placement::Hook).unwrap();
            let lhs = l.frobenius_norm().powi(2);
            let rhs = l.m_norm().powi(2) + 2.0 * (n * eps + m * eta) as f64;
            assert!((lhs - rhs).abs() <= 1e-13 * rhs);
            assert!(l.m_norm() >= p.frobenius_norm() / (2.0 * d as f64).sqrt());
        }
    }

    #[test]
    fn anti_triangular_layouts() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = random_poly(&mut rng, 2, 2, 3);
        let f = anti_triangularize(&from_polynomial(&p, 1, 1, &Placement::Hook).unwrap()).unwrap();
        assert_eq!(f.transformed.block(0, 4, 2, 2), MatrixPolynomial::identity(2).with_grade(f.transformed.grade()).unwrap());
        assert_eq!(f.transformed.block(4, 0, 2, 2), MatrixPolynomial::identity(2).with_grade(f.transformed.grade()).unwrap());
        assert!(f.p.max_abs_diff(&p) <= 1e-13 * p.frobenius_norm());

        let q = random_poly(&mut rng, 2, 3, 3);
        let g = anti_triangularize(&from_polynomial(&q, 2, 0, &Placement::Frobenius1).unwrap()).unwrap();
        assert!(g.p.max_abs_diff(&q) <= 1e-13 * q.frobenius_norm());
        assert_eq!(g.x.shape(), (0, 3));
        assert_eq!(g.y.shape(), (2, 6));
    }

    #[test]
    fn lift_of_scalar_row() {
        // P = [λ, λ²], h = (λ, −1).
        let p =
            MatrixPolynomial::new(vec![Matrix::zeros(1, 2), Matrix::from_real(1, 2, &[1.0, 0.0]), Matrix::from_real(1, 2, &[0.0, 1.0])])
                .unwrap();
        let h = MatrixPolynomial::new(vec![Matrix::from_real(2, 1, &[0.0, -1.0]), Matrix::from_real(2, 1, &[1.0, 0.0])]).unwrap();
        let l = from_polynomial(&p, 1, 0, &Placement::Frobenius1).unwrap();
        let z = lift_right_null_vector(&l, &h, 1e-12).unwrap();
        assert_eq!(z.degree(), Some(2));
        assert!(l.assemble().to_polynomial().multiply(&z).unwrap().is_zero());

        let bad = MatrixPolynomial::constant(Matrix::from_real(2, 1, &[1.0, 0.0]));
        assert!(matches!(lift_right_null_vector(&l, &bad, 1e-12), Err(Error::NotInNullSpace { .. })));
    }

    #[test]
    fn lift_with_both_shifts() {
        // P = [λ⁴, −λ³] (grade 4), h = (1, λ), ε = 1, η = 2.
        let mut coeffs = vec![Matrix::zeros(1, 2); 5];
        coeffs[4] = Matrix::from_real(1, 2, &[1.0, 0.0]);
        coeffs[3] = Matrix::from_real(1, 2, &[0.0, -1.0]);
        let p = MatrixPolynomial::new(coeffs).unwrap();
        let h = MatrixPolynomial::new(vec![Matrix::from_real(2, 1, &[1.0, 0.0]), Matrix::from_real(2, 1, &[0.0, 1.0])]).unwrap();
        let l = from_polynomial(&p, 1, 2, &Placement::Hook).unwrap();
        let z = lift_right_null_vector(&l, &h, 1e-12).unwrap();
        assert_eq!(z.degree(), Some(2));
        assert!(l.assemble().to_polynomial().multiply(&z).unwrap().is_zero());
        assert_eq!(z.rows(), l.shape().1);
    }
}
