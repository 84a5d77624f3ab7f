#![allow(dead_code)]

use bklab_core::linalg::Matrix;
use bklab_core::{c64, MatrixPolynomial, Pencil, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
    Matrix::from_fn(r, c, |_, _| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

pub fn random_real_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
    Matrix::from_fn(r, c, |_, _| c64(rng.sample(StandardNormal), 0.0))
}

pub fn random_poly(rng: &mut ChaCha8Rng, m: usize, n: usize, d: usize) -> MatrixPolynomial {
    MatrixPolynomial::new((0..=d).map(|_| random_matrix(rng, m, n)).collect()).unwrap()
}

pub fn normalized(p: &MatrixPolynomial) -> MatrixPolynomial {
    p.scale(c64(1.0 / p.frobenius_norm(), 0.0))
}

pub fn random_pencil(rng: &mut ChaCha8Rng, r: usize, c: usize, norm: f64) -> Pencil {
    let a = random_matrix(rng, r, c);
    let b = random_matrix(rng, r, c);
    let s = norm / bklab_core::linalg::pair_norm(&a, &b);
    Pencil::new(a.scale_real(s), b.scale_real(s)).unwrap()
}

/// Unitary factor of a Gaussian matrix by modified Gram-Schmidt.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let a = random_matrix(rng, n, n);
    let mut cols: Vec<Vec<C64>> = Vec::new();
    for j in 0..n {
        let mut v = a.column(j);
        for q in &cols {
            let dot: C64 = q.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= dot * qi;
            }
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / nrm).collect());
    }
    Matrix::from_fn(n, n, |i, j| cols[j][i])
}

/// `G(λ)·diag(I_r, 0)·H(λ)` with random linear `G`, `H`; singular when `r < min(m, n)`.
pub fn singular_poly(rng: &mut ChaCha8Rng, m: usize, n: usize, r: usize) -> MatrixPolynomial {
    let g = random_poly(rng, m, m, 1);
    let h = random_poly(rng, n, n, 1);
    let mid = MatrixPolynomial::constant(Matrix::from_fn(m, n, |i, j| if i == j && i < r { c64(1.0, 0.0) } else { c64(0.0, 0.0) }));
    g.multiply(&mid).unwrap().multiply(&h).unwrap()
}

// Scalar polynomials as ascending coefficient vectors.

fn padd(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![c64(0.0, 0.0); a.len().max(b.len())];
    for (i, z) in a.iter().enumerate() {
        out[i] += z;
    }
    for (i, z) in b.iter().enumerate() {
        out[i] += z;
    }
    out
}

fn pmul(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![c64(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `det P(λ)` by cofactor expansion over scalar polynomials.
pub fn det_poly(p: &MatrixPolynomial) -> Vec<C64> {
    let n = p.rows();
    assert_eq!(n, p.cols());
    let entry = |i: usize, j: usize| -> Vec<C64> { p.coeffs().iter().map(|c| c[(i, j)]).collect() };
    fn rec(rows: &[usize], cols: &[usize], entry: &dyn Fn(usize, usize) -> Vec<C64>) -> Vec<C64> {
        if rows.len() == 1 {
            return entry(rows[0], cols[0]);
        }
        let mut acc = vec![c64(0.0, 0.0)];
        for (k, &c) in cols.iter().enumerate() {
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let mut term = pmul(&entry(rows[0], c), &rec(&rows[1..], &rest, entry));
            if k % 2 == 1 {
                term.iter_mut().for_each(|z| *z = -*z);
            }
            acc = padd(&acc, &term);
        }
        acc
    }
    let idx: Vec<usize> = (0..n).collect();
    rec(&idx, &idx, &entry)
}

/// Roots of an ascending scalar polynomial by Aberth iteration.
pub fn aberth_roots(coeffs: &[C64]) -> Vec<C64> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c.last().unwrap().norm() == 0.0 {
        c.pop();
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let monic: Vec<C64> = c.iter().map(|z| z / lead).collect();
    let radius = 1.0 + monic[..deg].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut z: Vec<C64> =
        (0..deg).map(|k| C64::from_polar(0.5 * radius, 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4)).collect();
    let eval = |x: C64| -> (C64, C64) {
        let mut p = c64(0.0, 0.0);
        let mut dp = c64(0.0, 0.0);
        for a in monic.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: C64 = (0..deg).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (c64(1.0, 0.0) - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Small-integer coefficients with a nonzero `(0, 0)` entry in the leading coefficient.
pub fn int_poly(r: &mut ChaCha8Rng, rows: usize, cols: usize, d: usize) -> MatrixPolynomial {
    let mut coeffs: Vec<Matrix> = (0..=d).map(|_| Matrix::from_fn(rows, cols, |_, _| c64(r.random_range(-3i32..=3) as f64, 0.0))).collect();
    coeffs[d][(0, 0)] = c64(r.random_range(1i32..=3) as f64, 0.0);
    MatrixPolynomial::new(coeffs).unwrap()
}

/// `G(λ)·diag(I_r, 0)·H(λ)` with integer `G`, `H` of the given degrees; exact in floating point.
pub fn int_singular_poly(r: &mut ChaCha8Rng, m: usize, n: usize, rank: usize, dg: usize, dh: usize) -> MatrixPolynomial {
    let g = int_poly(r, m, m, dg);
    let h = int_poly(r, n, n, dh);
    let mid = MatrixPolynomial::constant(Matrix::from_fn(m, n, |i, j| if i == j && i < rank { c64(1.0, 0.0) } else { c64(0.0, 0.0) }));
    g.multiply(&mid).unwrap().multiply(&h).unwrap()
}
