//! Complete eigenstructure of pencils: staircase reduction for the singular
//! and infinite parts, QZ on the regular core, a convolution-rank oracle for
//! right minimal indices of polynomials, and the index shift map of block
//! Kronecker linearizations.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Float, Zero};

use crate::linalg::{left_compression, qz_eigenvalues, right_compression, Matrix, RankDecision, RankPolicy, C64};
use crate::matpoly::{MatrixPolynomial, Pencil};
use crate::Error;

/// Fixed evaluation points used to certify normal rank.
const PROBE_POINTS: [C64; 3] = [C64::new(0.5833, 0.3127), C64::new(-1.2341, 0.7719), C64::new(0.3001, -2.1013)];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Eigenstructure {
    /// Finite eigenvalues with algebraic multiplicities.
    pub finite: Vec<(C64, usize)>,
    /// Degrees of the infinite elementary divisors, ascending.
    pub infinite: Vec<usize>,
    pub right: Vec<usize>,
    pub left: Vec<usize>,
    pub rank_log: Vec<RankDecision>,
}

impl Eigenstructure {
    /// Finite eigenvalues repeated by multiplicity.
    pub fn finite_values(&self) -> Vec<C64> {
        self.finite.iter().flat_map(|&(z, k)| core::iter::repeat_n(z, k)).collect()
    }

    pub fn finite_count(&self) -> usize {
        self.finite.iter().map(|&(_, k)| k).sum()
    }

    /// Finite eigenvalues plus one point at infinity per infinite divisor degree unit.
    pub fn spectrum(&self) -> Vec<SpectralPoint> {
        let mut v: Vec<SpectralPoint> = self.finite_values().into_iter().map(SpectralPoint::Finite).collect();
        let inf: usize = self.infinite.iter().sum();
        v.extend(core::iter::repeat_n(SpectralPoint::Infinite, inf));
        v
    }

    /// Left side of the index sum identity for pencils: total elementary
    /// divisor degree plus all minimal indices. Equals the normal rank.
    pub fn index_sum(&self) -> usize {
        self.finite_count() + self.infinite.iter().sum::<usize>() + self.right.iter().sum::<usize>() + self.left.iter().sum::<usize>()
    }

    pub fn has_borderline_decision(&self) -> bool {
        self.rank_log.iter().any(RankDecision::is_borderline)
    }
}

/// Finite eigenvalue multiset and infinite eigenvalue count of a regular pencil.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedEigenvalues {
    pub finite: Vec<C64>,
    pub infinite: usize,
}

/// Eigenvalues of the regular pencil `M_0 + λM_1`.
pub fn generalized_eigenvalues(pencil: &Pencil, policy: &RankPolicy) -> Result<GeneralizedEigenvalues, Error> {
    let (r, c) = pencil.shape();
    if r != c {
        return Err(Error::Shape(format!("generalized eigenvalues need a square pencil, got {r}x{c}")));
    }
    if r == 0 {
        return Ok(GeneralizedEigenvalues { finite: Vec::new(), infinite: 0 });
    }
    let poly = pencil.to_polynomial();
    let regular = PROBE_POINTS.iter().any(|&z| policy.rank_of("regularity probe", &poly.eval(z)).rank == r);
    if !regular {
        return Err(Error::SingularPencil);
    }
    let pairs = qz_eigenvalues(pencil.m0(), &pencil.m1().scale_real(-1.0))?;
    Ok(split_pairs(&pairs))
}

fn split_pairs(pairs: &[(C64, C64)]) -> GeneralizedEigenvalues {
    let mut finite = Vec::new();
    let mut infinite = 0;
    for &(alpha, beta) in pairs {
        if beta.is_zero() {
            infinite += 1;
        } else {
            finite.push(alpha / beta);
        }
    }
    sort_complex(&mut finite);
    GeneralizedEigenvalues { finite, infinite }
}

fn sort_complex(v: &mut [C64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Complete eigenstructure by staircase reduction.
///
/// Every rank decision uses the threshold `max(rows, cols)·eps·‖(M_0, M_1)‖_F`
/// of the input pencil, or `policy.tol` when set.
pub fn staircase_eigenstructure(pencil: &Pencil, policy: &RankPolicy) -> Result<Eigenstructure, Error> {
    let (rows, cols) = pencil.shape();
    let tol = policy.threshold(rows, cols, pencil.frobenius_norm());
    let mut out = Eigenstructure::default();
    let mut a = pencil.m0().clone();
    let mut b = pencil.m1().clone();
    let mut round = 0;
    loop {
        round += 1;
        let (steps, ra, rb) = deflate_right(a, b, tol, "right", round, &mut out.rank_log);
        accumulate(&steps, &mut out.right, &mut out.infinite);
        let (steps_t, la, lb) = deflate_right(ra.transpose(), rb.transpose(), tol, "left", round, &mut out.rank_log);
        accumulate(&steps_t, &mut out.left, &mut out.infinite);
        a = la.transpose();
        b = lb.transpose();
        if a.rows() == a.cols() {
            break;
        }
        if steps.is_empty() && steps_t.is_empty() {
            return Err(Error::Shape(format!("staircase left a {}x{} core with full-rank leading coefficient", a.rows(), a.cols())));
        }
    }
    if a.rows() > 0 {
        let pairs = qz_eigenvalues(&a, &b.scale_real(-1.0))?;
        let ev = split_pairs(&pairs);
        out.finite = ev.finite.into_iter().map(|z| (z, 1)).collect();
        out.infinite.extend(core::iter::repeat_n(1, ev.infinite));
    }
    out.infinite.sort_unstable();
    out.right.sort_unstable();
    out.left.sort_unstable();
    Ok(out)
}

/// Repeated column compression of `B` followed by row compression of `A`
/// on the null columns. Returns the `(ν_i, μ_i)` staircase widths and the
/// remaining subpencil.
fn deflate_right(
    mut a: Matrix,
    mut b: Matrix,
    tol: f64,
    side: &str,
    round: usize,
    log: &mut Vec<RankDecision>,
) -> (Vec<(usize, usize)>, Matrix, Matrix) {
    let mut steps = Vec::new();
    loop {
        let (r, c) = a.shape();
        if c == 0 {
            break;
        }
        let (norms, v) = right_compression(&b);
        let nu = norms.iter().filter(|&&s| s <= tol).count();
        let step = steps.len() + 1;
        log.push(RankDecision {
            context: format!("{side} pass {round}, step {step}: column compression of B"),
            rows: r,
            cols: c,
            singular_values: norms.iter().rev().copied().collect(),
            rank: c - nu,
            tolerance: tol,
        });
        if nu == 0 {
            break;
        }
        let a1 = &a * &v;
        let b1 = &b * &v;
        let (row_norms, u) = left_compression(&a1.block(0, 0, r, nu));
        let mu = row_norms.iter().filter(|&&s| s > tol).count();
        log.push(RankDecision {
            context: format!("{side} pass {round}, step {step}: row compression of A"),
            rows: r,
            cols: nu,
            singular_values: row_norms,
            rank: mu,
            tolerance: tol,
        });
        let uh = u.adjoint();
        let a2 = &uh * &a1;
        let b2 = &uh * &b1;
        a = a2.block(mu, nu, r - mu, c - nu);
        b = b2.block(mu, nu, r - mu, c - nu);
        steps.push((nu, mu));
    }
    (steps, a, b)
}

/// `ν_i − μ_i` indices equal to `i−1`; `μ_i − ν_{i+1}` infinite blocks of size `i`.
fn accumulate(steps: &[(usize, usize)], indices: &mut Vec<usize>, infinite: &mut Vec<usize>) {
    for (i, &(nu, mu)) in steps.iter().enumerate() {
        indices.extend(core::iter::repeat_n(i, nu.saturating_sub(mu)));
        let next_nu = steps.get(i + 1).map_or(0, |s| s.0);
        infinite.extend(core::iter::repeat_n(i + 1, mu.saturating_sub(next_nu)));
    }
}

/// Result of the convolution-rank scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvolutionIndices {
    pub indices: Vec<usize>,
    /// `ν_j = nullity(C_j(Q))` for every scanned `j`.
    pub nullities: Vec<usize>,
    pub normal_rank: usize,
    pub rank_log: Vec<RankDecision>,
}

/// Normal rank of `Q`, the largest numerical rank over fixed probe points.
pub fn normal_rank(q: &MatrixPolynomial, policy: &RankPolicy) -> (usize, Vec<RankDecision>) {
    let log: Vec<RankDecision> = PROBE_POINTS.iter().map(|&z| policy.rank_of("normal rank probe", &q.eval(z))).collect();
    (log.iter().map(|d| d.rank).max().unwrap_or(0), log)
}

/// Right minimal indices of `Q` from the nullities of its convolution matrices.
///
/// `ν_j − ν_{j−1}` counts the indices `≤ j`, since the polynomial null
/// vectors of grade `j` form a space of dimension `Σ_{ε_i ≤ j} (j − ε_i + 1)`.
pub fn right_minimal_indices_by_convolution(q: &MatrixPolynomial, j_max: usize, policy: &RankPolicy) -> Result<ConvolutionIndices, Error> {
    let (rank, mut rank_log) = normal_rank(q, policy);
    let expected = q.cols() - rank;
    let mut out = ConvolutionIndices { indices: Vec::new(), nullities: Vec::new(), normal_rank: rank, rank_log: Vec::new() };
    if expected == 0 {
        out.rank_log = rank_log;
        return Ok(out);
    }
    let mut nu_prev = 0usize;
    let mut count_prev = 0usize;
    for j in 0..=j_max {
        let c = q.convolution(j).matrix;
        let dec = policy.rank_of(&format!("nullity of C_{j}(Q)"), &c);
        let nu = dec.nullity();
        rank_log.push(dec);
        out.nullities.push(nu);
        let count = nu.saturating_sub(nu_prev);
        out.indices.extend(core::iter::repeat_n(j, count.saturating_sub(count_prev)));
        if count >= expected {
            out.indices.truncate(expected);
            out.rank_log = rank_log;
            return Ok(out);
        }
        nu_prev = nu;
        count_prev = count;
    }
    Err(Error::Inconclusive { j_max, found: out.indices.len(), expected })
}

/// Maps the eigenstructure of an `(ε, n, η, m)` block Kronecker pencil to
/// that of the polynomial it linearizes.
pub fn shift_recovery(e: &Eigenstructure, epsilon: usize, eta: usize) -> Result<Eigenstructure, Error> {
    let shift = |v: &[usize], s: usize, side: &'static str| -> Result<Vec<usize>, Error> {
        v.iter().map(|&i| i.checked_sub(s).ok_or(Error::NotBlockKronecker { side, index: i, shift: s })).collect()
    };
    Ok(Eigenstructure {
        finite: e.finite.clone(),
        infinite: e.infinite.clone(),
        right: shift(&e.right, epsilon, "right")?,
        left: shift(&e.left, eta, "left")?,
        rank_log: e.rank_log.clone(),
    })
}

/// A point of the extended complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralPoint {
    Finite(C64),
    Infinite,
}

/// `|a − b| / √((1+|a|²)(1+|b|²))`, extended to infinity.
pub fn chordal_distance(a: SpectralPoint, b: SpectralPoint) -> f64 {
    match (a, b) {
        (SpectralPoint::Infinite, SpectralPoint::Infinite) => 0.0,
        (SpectralPoint::Finite(z), SpectralPoint::Infinite) | (SpectralPoint::Infinite, SpectralPoint::Finite(z)) => {
            1.0 / (1.0 + z.norm_sqr()).sqrt()
        }
        (SpectralPoint::Finite(x), SpectralPoint::Finite(y)) => {
            (x - y).norm() / ((1.0 + x.norm_sqr()).sqrt() * (1.0 + y.norm_sqr()).sqrt())
        }
    }
}

/// Minimum-cost perfect matching of two equally sized spectra under the chordal metric.
#[derive(Clone, Debug, PartialEq)]
pub struct ChordalMatching {
    /// `pairs[i] = j` matches `a[i]` with `b[j]`.
    pub pairs: Vec<usize>,
    pub max_distance: f64,
    pub total: f64,
}

/// Returns `None` when the multisets have different sizes.
pub fn match_chordal(a: &[SpectralPoint], b: &[SpectralPoint]) -> Option<ChordalMatching> {
    if a.len() != b.len() {
        return None;
    }
    let n = a.len();
    let cost: Vec<Vec<f64>> = a.iter().map(|&x| b.iter().map(|&y| chordal_distance(x, y)).collect()).collect();
    let pairs = hungarian(&cost, n);
    let dists: Vec<f64> = (0..n).map(|i| cost[i][pairs[i]]).collect();
    Some(ChordalMatching { max_distance: dists.iter().copied().fold(0.0, f64::max), total: dists.iter().sum(), pairs })
}

/// Convenience wrapper for finite sets.
pub fn match_chordal_finite(a: &[C64], b: &[C64]) -> Option<ChordalMatching> {
    let pa: Vec<SpectralPoint> = a.iter().map(|&z| SpectralPoint::Finite(z)).collect();
    let pb: Vec<SpectralPoint> = b.iter().map(|&z| SpectralPoint::Finite(z)).collect();
    match_chordal(&pa, &pb)
}

/// Smallest chordal distance between two distinct entries; infinite when fewer than two.
pub fn min_chordal_gap(points: &[SpectralPoint]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            gap = gap.min(chordal_distance(points[i], points[j]));
        }
    }
    gap
}

/// Kuhn–Munkres with potentials on a square cost matrix.
fn hungarian(cost: &[Vec<f64>], n: usize) -> Vec<usize> {
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}
