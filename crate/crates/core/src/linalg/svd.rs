use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Float, Zero};

use super::{Matrix, C64};

const MAX_SWEEPS: usize = 80;

/// One-sided Hestenes–Jacobi on the columns of `a`.
///
/// Returns the final columns `w` (mutually orthogonal) and the unitary `v`
/// with `a·v = w`, both column-major.
fn jacobi_columns(a: &Matrix) -> (Vec<Vec<C64>>, Vec<Vec<C64>>) {
    let (m, n) = a.shape();
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![C64::zero(); n];
            e[j] = C64::new(1.0, 0.0);
            e
        })
        .collect();
    if m == 0 {
        return (w, v);
    }
    let eps = f64::EPSILON;
    let mut norms: Vec<f64> = w.iter().map(|c| c.iter().map(|x| x.norm_sqr()).sum()).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma: C64 = w[p].iter().zip(&w[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + 1.0.hypot(zeta));
                let c = 1.0 / 1.0.hypot(t);
                let s = c * t;
                let (wp, wq) = two_mut(&mut w, p, q);
                for (x, y) in wp.iter_mut().zip(wq.iter_mut()) {
                    let yq = *y * phase;
                    let xp = *x;
                    *x = xp * c - yq * s;
                    *y = xp * s + yq * c;
                }
                let (vp, vq) = two_mut(&mut v, p, q);
                for (x, y) in vp.iter_mut().zip(vq.iter_mut()) {
                    let yq = *y * phase;
                    let xp = *x;
                    *x = xp * c - yq * s;
                    *y = xp * s + yq * c;
                }
                norms[p] = w[p].iter().map(|x| x.norm_sqr()).sum();
                norms[q] = w[q].iter().map(|x| x.norm_sqr()).sum();
            }
        }
        if !rotated {
            break;
        }
    }
    (w, v)
}

fn two_mut<T>(s: &mut [T], p: usize, q: usize) -> (&mut T, &mut T) {
    debug_assert!(p < q);
    let (lo, hi) = s.split_at_mut(q);
    (&mut lo[p], &mut hi[0])
}

fn col_norm(c: &[C64]) -> f64 {
    c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn columns_to_matrix(cols: &[Vec<C64>], rows: usize, order: &[usize]) -> Matrix {
    Matrix::from_fn(rows, order.len(), |i, j| cols[order[j]][i])
}

/// Thin singular value decomposition `A = U·diag(s)·V^H`.
///
/// `s` has `min(rows, cols)` entries in descending order. Columns of `u`
/// (or `v`) paired with an exactly zero singular value are zero.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

impl Svd {
    pub fn new(a: &Matrix) -> Self {
        let (m, n) = a.shape();
        if m >= n {
            let (w, v) = jacobi_columns(a);
            let norms: Vec<f64> = w.iter().map(|c| col_norm(c)).collect();
            let order = descending(&norms);
            let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
            let u = Matrix::from_fn(m, n, |i, j| {
                let sj = s[j];
                if sj > 0.0 {
                    w[order[j]][i] / sj
                } else {
                    C64::zero()
                }
            });
            let v = columns_to_matrix(&v, n, &order);
            Self { u, s, v }
        } else {
            // A^H·V' = W' gives A = V'·W'^H.
            let (w, vt) = jacobi_columns(&a.adjoint());
            let norms: Vec<f64> = w.iter().map(|c| col_norm(c)).collect();
            let order = descending(&norms);
            let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
            let u = columns_to_matrix(&vt, m, &order);
            let v = Matrix::from_fn(n, m, |i, j| {
                let sj = s[j];
                if sj > 0.0 {
                    w[order[j]][i] / sj
                } else {
                    C64::zero()
                }
            });
            Self { u, s, v }
        }
    }

    pub fn sigma_max(&self) -> f64 {
        self.s.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.s.last().copied().unwrap_or(0.0)
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.s.iter().filter(|&&x| x > tol).count()
    }

    /// Minimum-norm least-squares solution `A^† b`, discarding singular
    /// values `≤ tol`.
    pub fn pseudo_solve(&self, b: &Matrix, tol: f64) -> Matrix {
        assert_eq!(self.u.rows(), b.rows(), "pseudo_solve dimension mismatch");
        let r = self.rank(tol);
        let ur = self.u.block(0, 0, self.u.rows(), r);
        let mut y = &ur.adjoint() * b;
        for i in 0..r {
            let inv = 1.0 / self.s[i];
            for j in 0..y.cols() {
                y[(i, j)] *= inv;
            }
        }
        let vr = self.v.block(0, 0, self.v.rows(), r);
        &vr * &y
    }
}

fn descending(x: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[b].total_cmp(&x[a]));
    idx
}

/// Singular values in descending order (`min(rows, cols)` of them).
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    let (m, n) = a.shape();
    let (w, _) = if m >= n { jacobi_columns(a) } else { jacobi_columns(&a.adjoint()) };
    let mut s: Vec<f64> = w.iter().map(|c| col_norm(c)).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn spectral_norm(a: &Matrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Unitary `V` (`cols × cols`) such that the columns of `A·V` are
/// orthogonal with norms `norms`, ordered ascending (null directions first).
pub fn right_compression(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.cols();
    let (w, v) = jacobi_columns(a);
    let norms: Vec<f64> = w.iter().map(|c| col_norm(c)).collect();
    let mut order = descending(&norms);
    order.reverse();
    (order.iter().map(|&j| norms[j]).collect(), columns_to_matrix(&v, n, &order))
}

/// Unitary `U` (`rows × rows`) such that the rows of `U^H·A` are
/// orthogonal with norms `norms`, ordered descending (dominant rows first).
pub fn left_compression(a: &Matrix) -> (Vec<f64>, Matrix) {
    let m = a.rows();
    let (w, v) = jacobi_columns(&a.adjoint());
    let norms: Vec<f64> = w.iter().map(|c| col_norm(c)).collect();
    let order = descending(&norms);
    (order.iter().map(|&j| norms[j]).collect(), columns_to_matrix(&v, m, &order))
}
