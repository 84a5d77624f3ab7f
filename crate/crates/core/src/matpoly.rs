//! Matrix polynomials over ℂ, pencils, the `L_k` / `Λ_k` building blocks and
//! convolution matrices.
//!
//! Coefficients are stored in ascending order: `coeffs()[k]` multiplies `λ^k`.
//! Convolution matrices follow the descending block layout, so `C_0(Q)`
//! stacks `Q_q` on top and `Q_0` at the bottom.

use alloc::format;
use alloc::vec::Vec;

use num_traits::{Float, One, Zero};

use crate::linalg::{spectral_norm, Matrix, C64};
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPolynomial {
    rows: usize,
    cols: usize,
    coeffs: Vec<Matrix>,
}

impl MatrixPolynomial {
    /// Builds from ascending coefficients `P_0, …, P_d`.
    pub fn new(coeffs: Vec<Matrix>) -> Result<Self, Error> {
        let first = coeffs.first().ok_or_else(|| Error::Shape("a polynomial needs at least one coefficient".into()))?;
        let shape = first.shape();
        for c in &coeffs {
            if c.shape() != shape {
                return Err(Error::DimensionMismatch { op: "MatrixPolynomial::new", left: shape, right: c.shape() });
            }
        }
        Ok(Self { rows: shape.0, cols: shape.1, coeffs })
    }

    /// Builds with explicit dimensions, which keeps empty coefficient lists meaningful.
    pub fn with_shape(rows: usize, cols: usize, coeffs: Vec<Matrix>) -> Result<Self, Error> {
        if coeffs.is_empty() {
            return Err(Error::Shape("a polynomial needs at least one coefficient".into()));
        }
        for c in &coeffs {
            if c.shape() != (rows, cols) {
                return Err(Error::DimensionMismatch { op: "MatrixPolynomial::with_shape", left: (rows, cols), right: c.shape() });
            }
        }
        Ok(Self { rows, cols, coeffs })
    }

    pub fn zeros(rows: usize, cols: usize, grade: usize) -> Self {
        Self { rows, cols, coeffs: (0..=grade).map(|_| Matrix::zeros(rows, cols)).collect() }
    }

    pub fn constant(m: Matrix) -> Self {
        Self { rows: m.rows(), cols: m.cols(), coeffs: alloc::vec![m] }
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(Matrix::identity(n))
    }

    /// `m0 + λ·m1`.
    pub fn linear(m0: Matrix, m1: Matrix) -> Result<Self, Error> {
        Self::new(alloc::vec![m0, m1])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn grade(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Matrix] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Matrix {
        &self.coeffs[k]
    }

    pub fn coeff_mut(&mut self, k: usize) -> &mut Matrix {
        &mut self.coeffs[k]
    }

    pub fn into_coeffs(self) -> Vec<Matrix> {
        self.coeffs
    }

    /// Largest `k` with `P_k ≠ 0`; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    /// Largest `k` with `‖P_k‖_F > tol`.
    pub fn numerical_degree(&self, tol: f64) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.frobenius_norm() > tol)
    }

    /// Horner evaluation at `λ0`.
    pub fn eval(&self, lambda: C64) -> Matrix {
        let mut acc = self.coeffs[self.grade()].clone();
        for k in (0..self.grade()).rev() {
            acc = &acc.scale(lambda) + &self.coeffs[k];
        }
        acc
    }

    /// Re-declares the grade, padding with zeros or dropping zero leading coefficients.
    pub fn with_grade(&self, grade: usize) -> Result<Self, Error> {
        let deg = self.degree().unwrap_or(0);
        if grade < deg {
            return Err(Error::InvalidGrade { grade, degree: deg });
        }
        let coeffs = (0..=grade).map(|k| self.coeffs.get(k).cloned().unwrap_or_else(|| Matrix::zeros(self.rows, self.cols))).collect();
        Ok(Self { rows: self.rows, cols: self.cols, coeffs })
    }

    /// `rev_d P(λ) = λ^d P(1/λ)` as a grade-`d` polynomial.
    pub fn reversal(&self, d: usize) -> Result<Self, Error> {
        let padded = self.with_grade(d)?;
        let mut coeffs = padded.coeffs;
        coeffs.reverse();
        Ok(Self { rows: self.rows, cols: self.cols, coeffs })
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(Matrix::frobenius_norm_sqr).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    /// Product with grade `grade(P) + grade(Q)`.
    pub fn multiply(&self, other: &Self) -> Result<Self, Error> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { op: "multiply", left: self.shape(), right: other.shape() });
        }
        let grade = self.grade() + other.grade();
        let mut coeffs: Vec<Matrix> = (0..=grade).map(|_| Matrix::zeros(self.rows, other.cols)).collect();
        for (i, p) in self.coeffs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (j, q) in other.coeffs.iter().enumerate() {
                if q.is_zero() {
                    continue;
                }
                let prod = p * q;
                coeffs[i + j] = &coeffs[i + j] + &prod;
            }
        }
        Ok(Self { rows: self.rows, cols: other.cols, coeffs })
    }

    /// Coefficientwise sum; the grade is the larger of the two.
    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        self.combine(other, 1.0, "add")
    }

    pub fn sub(&self, other: &Self) -> Result<Self, Error> {
        self.combine(other, -1.0, "sub")
    }

    fn combine(&self, other: &Self, sign: f64, op: &'static str) -> Result<Self, Error> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch { op, left: self.shape(), right: other.shape() });
        }
        let grade = self.grade().max(other.grade());
        let zero = Matrix::zeros(self.rows, self.cols);
        let coeffs = (0..=grade)
            .map(|k| {
                let a = self.coeffs.get(k).unwrap_or(&zero);
                let b = other.coeffs.get(k).unwrap_or(&zero);
                &*a + &b.scale_real(sign)
            })
            .collect();
        Ok(Self { rows: self.rows, cols: self.cols, coeffs })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect() }
    }

    /// Coefficientwise plain transpose.
    pub fn transpose(&self) -> Self {
        Self { rows: self.cols, cols: self.rows, coeffs: self.coeffs.iter().map(Matrix::transpose).collect() }
    }

    /// `P(λ) ⊗ I_p`.
    pub fn kron_identity(&self, p: usize) -> Self {
        let ip = Matrix::identity(p);
        Self { rows: self.rows * p, cols: self.cols * p, coeffs: self.coeffs.iter().map(|c| c.kron(&ip)).collect() }
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self { rows: nr, cols: nc, coeffs: self.coeffs.iter().map(|c| c.block(r0, c0, nr, nc)).collect() }
    }

    /// Places `b` (with grade ≤ own grade) at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        assert!(b.grade() <= self.grade(), "set_block: block grade exceeds target grade");
        for (k, c) in b.coeffs.iter().enumerate() {
            self.coeffs[k].set_block(r0, c0, c);
        }
    }

    /// Largest absolute coefficient entry.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.max_abs()))
    }

    /// Largest absolute coefficient difference after padding to a common grade.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let g = self.grade().max(other.grade());
        let zero = Matrix::zeros(self.rows, self.cols);
        (0..=g).fold(0.0, |m, k| {
            let a = self.coeffs.get(k).unwrap_or(&zero);
            let b = other.coeffs.get(k).unwrap_or(&zero);
            m.max(a.max_abs_diff(b))
        })
    }

    /// Convolution matrix `C_j(P)` at the declared grade.
    pub fn convolution(&self, j: usize) -> ConvolutionMatrix {
        let q = self.grade();
        let (m, n) = self.shape();
        let mut mat = Matrix::zeros((q + j + 1) * m, (j + 1) * n);
        for c in 0..=j {
            for t in 0..=q {
                let r = c + t;
                mat.set_block(r * m, c * n, &self.coeffs[q - t]);
            }
        }
        ConvolutionMatrix { source_grade: q, blocks: j + 1, block_rows: m, block_cols: n, matrix: mat }
    }

    /// Inverse of `C_0`: reads a descending stack `[Q_q; …; Q_0]` of
    /// `block_rows`-row blocks.
    pub fn from_descending_stack(stack: &Matrix, block_rows: usize) -> Result<Self, Error> {
        if block_rows == 0 || stack.rows() % block_rows != 0 || stack.rows() == 0 {
            return Err(Error::Shape(format!("cannot split {} rows into blocks of {}", stack.rows(), block_rows)));
        }
        let count = stack.rows() / block_rows;
        let coeffs = (0..count).map(|k| stack.block((count - 1 - k) * block_rows, 0, block_rows, stack.cols())).collect();
        Ok(Self { rows: block_rows, cols: stack.cols(), coeffs })
    }
}

/// Frobenius norm of a pair of constant matrices of any sizes.
pub use crate::linalg::pair_norm;

/// Matrix pencil `M_0 + λM_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pencil {
    m0: Matrix,
    m1: Matrix,
}

impl Pencil {
    pub fn new(m0: Matrix, m1: Matrix) -> Result<Self, Error> {
        if m0.shape() != m1.shape() {
            return Err(Error::DimensionMismatch { op: "Pencil::new", left: m0.shape(), right: m1.shape() });
        }
        Ok(Self { m0, m1 })
    }

    pub fn m0(&self) -> &Matrix {
        &self.m0
    }

    pub fn m1(&self) -> &Matrix {
        &self.m1
    }

    pub fn rows(&self) -> usize {
        self.m0.rows()
    }

    pub fn cols(&self) -> usize {
        self.m0.cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.m0.shape()
    }

    pub fn to_polynomial(&self) -> MatrixPolynomial {
        MatrixPolynomial { rows: self.rows(), cols: self.cols(), coeffs: alloc::vec![self.m0.clone(), self.m1.clone()] }
    }

    pub fn frobenius_norm(&self) -> f64 {
        (self.m0.frobenius_norm_sqr() + self.m1.frobenius_norm_sqr()).sqrt()
    }

    pub fn transpose(&self) -> Self {
        Self { m0: self.m0.transpose(), m1: self.m1.transpose() }
    }

    /// `rev_1`: swaps the two coefficients.
    pub fn reversal(&self) -> Self {
        Self { m0: self.m1.clone(), m1: self.m0.clone() }
    }

    /// `U·(M_0 + λM_1)·V` for constant `U`, `V`.
    pub fn equivalence(&self, u: &Matrix, v: &Matrix) -> Self {
        Self { m0: &(u * &self.m0) * v, m1: &(u * &self.m1) * v }
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch { op: "Pencil::add", left: self.shape(), right: other.shape() });
        }
        Ok(Self { m0: &self.m0 + &other.m0, m1: &self.m1 + &other.m1 })
    }
}

impl TryFrom<MatrixPolynomial> for Pencil {
    type Error = Error;
    fn try_from(p: MatrixPolynomial) -> Result<Self, Error> {
        match p.grade() {
            1 => {
                let mut it = p.coeffs.into_iter();
                let m0 = it.next().unwrap_or_else(|| Matrix::zeros(0, 0));
                let m1 = it.next().unwrap_or_else(|| Matrix::zeros(0, 0));
                Ok(Self { m0, m1 })
            }
            0 => Ok(Self { m1: Matrix::zeros(p.rows, p.cols), m0: p.coeffs[0].clone() }),
            g => Err(Error::Shape(format!("a pencil has grade 1, got grade {g}"))),
        }
    }
}

/// `C_j(Q)` together with its block bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvolutionMatrix {
    pub source_grade: usize,
    pub blocks: usize,
    pub block_rows: usize,
    pub block_cols: usize,
    pub matrix: Matrix,
}

/// `L_k(λ)`: `k × (k+1)`, `−1` on the diagonal and `λ` on the superdiagonal.
pub fn build_l(k: usize) -> Pencil {
    build_l_kron(k, 1)
}

/// `L_k(λ) ⊗ I_p`.
pub fn build_l_kron(k: usize, p: usize) -> Pencil {
    let e = Matrix::from_fn(k, k + 1, |i, j| if i == j { C64::one() } else { C64::zero() });
    let f = Matrix::from_fn(k, k + 1, |i, j| if j == i + 1 { C64::one() } else { C64::zero() });
    let ip = Matrix::identity(p);
    Pencil { m0: e.kron(&ip).scale_real(-1.0), m1: f.kron(&ip) }
}

/// `Λ_k(λ) = [λ^k, …, λ, 1]^T`.
pub fn build_lambda(k: usize) -> MatrixPolynomial {
    build_lambda_kron(k, 1)
}

/// `Λ_k(λ) ⊗ I_p`, of size `(k+1)p × p` and grade `k`.
pub fn build_lambda_kron(k: usize, p: usize) -> MatrixPolynomial {
    let coeffs = (0..=k)
        .map(|deg| {
            let mut e = Matrix::zeros(k + 1, 1);
            e[(k - deg, 0)] = C64::one();
            e.kron(&Matrix::identity(p))
        })
        .collect();
    MatrixPolynomial { rows: (k + 1) * p, cols: p, coeffs }
}

/// Outcome of the five product-norm inequalities (a)–(e).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NormInequalityFlags {
    pub a: bool,
    pub b: bool,
    pub c: bool,
    pub d: bool,
    pub e: bool,
}

impl NormInequalityFlags {
    pub fn all(&self) -> bool {
        self.a && self.b && self.c && self.d && self.e
    }
}

const NORM_SLACK: f64 = 1e-12;

fn leq(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + NORM_SLACK) + f64::MIN_POSITIVE
}

/// Checks the product-norm bounds on `(P, Q)`.
///
/// Flags (d) and (e) are evaluated for every factorization
/// `cols(P) = (k+1)·p` and `rows(Q) = (k+1)·p` respectively.
pub fn verify_norm_inequalities(p: &MatrixPolynomial, q: &MatrixPolynomial) -> Result<NormInequalityFlags, Error> {
    let pq = p.multiply(q)?;
    let lhs = pq.frobenius_norm();
    let d = p.grade() as f64;
    let t = q.grade() as f64;
    let p2: f64 = p.coeffs().iter().map(|c| spectral_norm(c).powi(2)).sum::<f64>().sqrt();
    let q2: f64 = q.coeffs().iter().map(|c| spectral_norm(c).powi(2)).sum::<f64>().sqrt();
    let pf = p.frobenius_norm();
    let qf = q.frobenius_norm();
    let a = leq(lhs, (d + 1.0).sqrt() * p2 * qf);
    let b = leq(lhs, (t + 1.0).sqrt() * pf * q2);
    let c = leq(lhs, (d + 1.0).sqrt().min((t + 1.0).sqrt()) * pf * qf);

    let mut flag_d = true;
    for (k, blk) in factorizations(p.cols()) {
        let prod = p.multiply(&build_lambda_kron(k, blk))?;
        flag_d &= leq(prod.frobenius_norm(), (d + 1.0).sqrt().min(((k + 1) as f64).sqrt()) * pf);
    }
    let mut flag_e = true;
    for (k, blk) in factorizations(q.rows()) {
        let prod = build_lambda_kron(k, blk).transpose().multiply(q)?;
        flag_e &= leq(prod.frobenius_norm(), (t + 1.0).sqrt().min(((k + 1) as f64).sqrt()) * qf);
    }
    Ok(NormInequalityFlags { a, b, c, d: flag_d, e: flag_e })
}

/// All `(k, p)` with `(k+1)·p == n`.
fn factorizations(n: usize) -> Vec<(usize, usize)> {
    (1..=n).filter(|blk| n % blk == 0).map(|blk| (n / blk - 1, blk)).collect()
}
