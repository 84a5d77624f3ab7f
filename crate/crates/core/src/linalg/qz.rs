use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use super::{givens, Matrix, C64};
use crate::Error;

/// Generalized eigenvalues of the square pencil `A − μB` by complex
/// single-shift QZ.
///
/// Returns pairs `(α, β)` with `μ = α/β`; `β == 0` exactly marks an
/// infinite eigenvalue. The pencil is assumed regular.
pub fn qz_eigenvalues(a: &Matrix, b: &Matrix) -> Result<Vec<(C64, C64)>, Error> {
    let n = a.rows();
    assert!(a.cols() == n && b.shape() == (n, n), "qz_eigenvalues expects square pencils");
    let mut h = a.clone();
    let mut t = b.clone();
    hessenberg_triangular(&mut h, &mut t);

    let ulp = f64::EPSILON;
    let atol = ulp * h.frobenius_norm();
    let btol = ulp * t.frobenius_norm();
    let zero = C64::zero();
    let mut eig = vec![(zero, zero); n];
    let mut ihi = n;
    let mut iter = 0usize;
    let mut total = 0usize;
    let max_total = 60 * n.max(1);

    while ihi > 0 {
        let last = ihi - 1;
        let mut ilo = 0;
        for k in (1..=last).rev() {
            let sub = h[(k, k - 1)].norm();
            if sub <= atol || sub <= ulp * (h[(k, k)].norm() + h[(k - 1, k - 1)].norm()) {
                h[(k, k - 1)] = zero;
                ilo = k;
                break;
            }
        }
        if ilo == last {
            let beta = if t[(last, last)].norm() <= btol { zero } else { t[(last, last)] };
            eig[last] = (h[(last, last)], beta);
            ihi = last;
            iter = 0;
            continue;
        }

        if let Some(k) = (ilo..ihi).find(|&k| t[(k, k)].norm() <= btol) {
            t[(k, k)] = zero;
            for j in k..last {
                let (c, s, _) = givens(t[(j, j + 1)], t[(j + 1, j + 1)]);
                t.rotate_rows(j, j + 1, c, s);
                h.rotate_rows(j, j + 1, c, s);
                t[(j + 1, j + 1)] = zero;
                if j > ilo {
                    let (c, s, _) = givens(h[(j + 1, j)], h[(j + 1, j - 1)]);
                    h.rotate_cols(j, j - 1, c, s);
                    t.rotate_cols(j, j - 1, c, s);
                    h[(j + 1, j - 1)] = zero;
                }
            }
            let (c, s, _) = givens(h[(last, last)], h[(last, last - 1)]);
            h.rotate_cols(last, last - 1, c, s);
            t.rotate_cols(last, last - 1, c, s);
            h[(last, last - 1)] = zero;
            t[(last, last - 1)] = zero;
            eig[last] = (h[(last, last)], zero);
            ihi = last;
            iter = 0;
            continue;
        }

        iter += 1;
        total += 1;
        if total > max_total {
            return Err(Error::NoConvergence { what: "QZ iteration", iterations: total });
        }
        let mu = if iter % 10 == 0 { exceptional_shift(&h, &t, last) } else { wilkinson_shift(&h, &t, last) };

        let x = h[(ilo, ilo)] - mu * t[(ilo, ilo)];
        let y = h[(ilo + 1, ilo)];
        let (c, s, _) = givens(x, y);
        h.rotate_rows(ilo, ilo + 1, c, s);
        t.rotate_rows(ilo, ilo + 1, c, s);
        for k in ilo..last {
            let (c, s, _) = givens(t[(k + 1, k + 1)], t[(k + 1, k)]);
            t.rotate_cols(k + 1, k, c, s);
            h.rotate_cols(k + 1, k, c, s);
            t[(k + 1, k)] = zero;
            if k + 2 <= last {
                let (c, s, _) = givens(h[(k + 1, k)], h[(k + 2, k)]);
                h.rotate_rows(k + 1, k + 2, c, s);
                t.rotate_rows(k + 1, k + 2, c, s);
                h[(k + 2, k)] = zero;
            }
        }
    }
    Ok(eig)
}

/// Unitary reduction to Hessenberg `h`, upper triangular `t`.
fn hessenberg_triangular(h: &mut Matrix, t: &mut Matrix) {
    let n = h.rows();
    let zero = C64::zero();
    for j in 0..n {
        for i in (j + 1..n).rev() {
            if t[(i, j)].is_zero() {
                continue;
            }
            let (c, s, _) = givens(t[(i - 1, j)], t[(i, j)]);
            t.rotate_rows(i - 1, i, c, s);
            h.rotate_rows(i - 1, i, c, s);
            t[(i, j)] = zero;
        }
    }
    for j in 0..n.saturating_sub(2) {
        for i in (j + 2..n).rev() {
            if h[(i, j)].is_zero() {
                continue;
            }
            let (c, s, _) = givens(h[(i - 1, j)], h[(i, j)]);
            h.rotate_rows(i - 1, i, c, s);
            t.rotate_rows(i - 1, i, c, s);
            h[(i, j)] = zero;
            if !t[(i, i - 1)].is_zero() {
                let (c, s, _) = givens(t[(i, i)], t[(i, i - 1)]);
                t.rotate_cols(i, i - 1, c, s);
                h.rotate_cols(i, i - 1, c, s);
                t[(i, i - 1)] = zero;
            }
        }
    }
}

/// Eigenvalue of the trailing 2×2 subpencil closest to `h_nn / t_nn`.
fn wilkinson_shift(h: &Matrix, t: &Matrix, last: usize) -> C64 {
    let l = last - 1;
    let (a11, a12, a21, a22) = (h[(l, l)], h[(l, last)], h[(last, l)], h[(last, last)]);
    let (b11, b12, b22) = (t[(l, l)], t[(l, last)], t[(last, last)]);
    let target = a22 / b22;
    let qa = b11 * b22;
    let qb = -(a11 * b22 + a22 * b11 - a21 * b12);
    let qc = a11 * a22 - a12 * a21;
    let mut disc = (qb * qb - qa * qc * 4.0).sqrt();
    if (qb.conj() * disc).re < 0.0 {
        disc = -disc;
    }
    let q = -(qb + disc) * 0.5;
    if q.is_zero() {
        return target;
    }
    let r1 = q / qa;
    let r2 = qc / q;
    let pick = if (r1 - target).norm() <= (r2 - target).norm() { r1 } else { r2 };
    if pick.re.is_finite() && pick.im.is_finite() {
        pick
    } else {
        target
    }
}

fn exceptional_shift(h: &Matrix, t: &Matrix, last: usize) -> C64 {
    let scale = h[(last, last - 1)].norm() / t[(last, last)].norm();
    h[(last, last)] / t[(last, last)] + C64::new(0.75, 0.437) * scale
}
