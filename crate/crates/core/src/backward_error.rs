//! Finite backward-error map for block Kronecker pencils.
//!
//! Given `L` linearizing `P` and a perturbation `ΔL`, the pipeline
//!
//! 1. finds constant `C`, `D` with `[C I](L+ΔL)[D; I] = 0`, restoring the zero
//!    `(2,2)` block by a strict equivalence,
//! 2. perturbs `Λ_ε ⊗ I_n` and `Λ_η ⊗ I_m` into bases dual to the perturbed
//!    off-diagonal blocks,
//! 3. multiplies everything back into `P + ΔP`,
//!
//! and evaluates the a priori bounds on every intermediate quantity.

use alloc::vec::Vec;

use num_traits::Float;

use crate::block_kronecker::{from_polynomial, recover_polynomial, BlockKroneckerPencil, Placement};
use crate::eigenstructure::{match_chordal, min_chordal_gap, staircase_eigenstructure};
use crate::linalg::{pair_norm, spectral_norm, Matrix, RankPolicy, Svd};
use crate::matpoly::{build_l_kron, build_lambda_kron, MatrixPolynomial, Pencil};
use crate::spectral::sigma_min_t_closed;
use crate::Error;

const SQRT2_M1: f64 = core::f64::consts::SQRT_2 - 1.0;

/// `ΔL` split along the natural partition of `L`: `ΔL_ij = ΔA_ij + λΔB_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationBlocks {
    pub a11: Matrix,
    pub b11: Matrix,
    pub a12: Matrix,
    pub b12: Matrix,
    pub a21: Matrix,
    pub b21: Matrix,
    pub a22: Matrix,
    pub b22: Matrix,
}

impl PerturbationBlocks {
    pub fn split(l: &BlockKroneckerPencil, dl: &Pencil) -> Result<Self, Error> {
        if dl.shape() != l.shape() {
            return Err(Error::DimensionMismatch { op: "perturbation of block Kronecker pencil", left: l.shape(), right: dl.shape() });
        }
        let (r1, c1) = l.m_shape();
        let (rows, cols) = l.shape();
        let (r2, c2) = (rows - r1, cols - c1);
        let (a, b) = (dl.m0(), dl.m1());
        Ok(Self {
            a11: a.block(0, 0, r1, c1),
            b11: b.block(0, 0, r1, c1),
            a12: a.block(0, c1, r1, c2),
            b12: b.block(0, c1, r1, c2),
            a21: a.block(r1, 0, r2, c1),
            b21: b.block(r1, 0, r2, c1),
            a22: a.block(r1, c1, r2, c2),
            b22: b.block(r1, c1, r2, c2),
        })
    }

    pub fn assemble(&self) -> Pencil {
        let a = Matrix::vstack(&[&Matrix::hstack(&[&self.a11, &self.a12]), &Matrix::hstack(&[&self.a21, &self.a22])]);
        let b = Matrix::vstack(&[&Matrix::hstack(&[&self.b11, &self.b12]), &Matrix::hstack(&[&self.b21, &self.b22])]);
        Pencil::new(a, b).expect("blocks are conformal")
    }

    pub fn l11(&self) -> Pencil {
        Pencil::new(self.a11.clone(), self.b11.clone()).expect("same shape")
    }

    pub fn l12(&self) -> Pencil {
        Pencil::new(self.a12.clone(), self.b12.clone()).expect("same shape")
    }

    pub fn l21(&self) -> Pencil {
        Pencil::new(self.a21.clone(), self.b21.clone()).expect("same shape")
    }

    pub fn l22(&self) -> Pencil {
        Pencil::new(self.a22.clone(), self.b22.clone()).expect("same shape")
    }
}

fn e_block(k: usize, l: usize) -> Matrix {
    build_l_kron(k, l).m0().scale_real(-1.0)
}

fn f_block(k: usize, l: usize) -> Matrix {
    build_l_kron(k, l).m1().clone()
}

fn require_nondegenerate(eps: usize, eta: usize) -> Result<(), Error> {
    if eps == 0 || eta == 0 {
        return Err(Error::Shape(alloc::format!("the Sylvester operator needs epsilon, eta >= 1, got ({eps}, {eta})")));
    }
    Ok(())
}

/// The operator `T` of the linearized Sylvester system acting on
/// `[vec C; vec D]` (column-major vectorization).
pub fn build_t(eps: usize, eta: usize, m: usize, n: usize) -> Result<Matrix, Error> {
    require_nondegenerate(eps, eta)?;
    let ien = Matrix::identity(eps * n);
    let iem = Matrix::identity(eta * m);
    let top = Matrix::hstack(&[&e_block(eta, m).kron(&ien), &iem.kron(&e_block(eps, n))]);
    let bot = Matrix::hstack(&[&f_block(eta, m).kron(&ien), &iem.kron(&f_block(eps, n))]);
    Ok(Matrix::vstack(&[&top, &bot]))
}

/// The perturbation `ΔT` built from the off-diagonal blocks of `ΔL`.
pub fn build_delta_t(blocks: &PerturbationBlocks, eps: usize, eta: usize, m: usize, n: usize) -> Result<Matrix, Error> {
    require_nondegenerate(eps, eta)?;
    let ien = Matrix::identity(eps * n);
    let iem = Matrix::identity(eta * m);
    let top = Matrix::hstack(&[&blocks.a12.transpose().scale_real(-1.0).kron(&ien), &iem.kron(&blocks.a21.scale_real(-1.0))]);
    let bot = Matrix::hstack(&[&blocks.b12.transpose().kron(&ien), &iem.kron(&blocks.b21)]);
    Ok(Matrix::vstack(&[&top, &bot]))
}

/// Scalars that govern solvability of the quadratic Sylvester system.
#[derive(Clone, Debug, PartialEq)]
pub struct SylvesterGauge {
    /// Closed-form `σ_min(T)`.
    pub sigma_min_t: f64,
    /// `‖ΔT‖_2` when it was computed exactly.
    pub delta_t_norm: Option<f64>,
    /// `‖[ΔA_12^T; ΔB_12^T]‖_F + ‖[ΔA_21; ΔB_21]‖_F ≥ ‖ΔT‖_2`.
    pub delta_t_bound: f64,
    /// `σ_min(T) − ‖ΔT‖_2`, using the exact norm when available.
    pub delta: f64,
    pub theta: f64,
    pub omega: f64,
}

impl SylvesterGauge {
    /// `θω/δ²`, the first term of the majorizing sequence.
    pub fn kappa1(&self) -> f64 {
        self.theta * self.omega / (self.delta * self.delta)
    }

    pub fn admissible(&self) -> bool {
        self.delta > 0.0 && self.kappa1() < 0.25
    }

    /// Smaller fixed point of `g(x) = κ_1(1+x)²`; `None` when `κ_1 ≥ 1/4`.
    pub fn kappa_limit(&self) -> Option<f64> {
        let k1 = self.kappa1();
        if !(k1 < 0.25) {
            return None;
        }
        Some(2.0 * k1 / (1.0 - 2.0 * k1 + (1.0 - 4.0 * k1).sqrt()))
    }
}

/// `κ_1, κ_2, …` with `κ_{i+1} = κ_1(1+κ_i)²`.
pub fn kappa_sequence(kappa1: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut k = kappa1;
    for _ in 0..len {
        out.push(k);
        k = kappa1 * (1.0 + k) * (1.0 + k);
    }
    out
}

/// Largest `T` (rows × cols) whose spectral norms are computed exactly for the gauge.
const EXACT_GAUGE_ENTRIES: usize = 400_000;

pub fn sylvester_gauge(l: &BlockKroneckerPencil, blocks: &PerturbationBlocks) -> Result<SylvesterGauge, Error> {
    let (eps, eta, m, n) = (l.epsilon(), l.eta(), l.m(), l.n());
    let sigma_min_t = sigma_min_t_closed(eps, eta)?;
    let delta_t_bound = pair_norm(&blocks.a12, &blocks.b12) + pair_norm(&blocks.a21, &blocks.b21);
    let rows = 2 * eps * eta * m * n;
    let cols = rows + (eps + eta) * m * n;
    let delta_t_norm =
        (rows * cols <= EXACT_GAUGE_ENTRIES).then(|| build_delta_t(blocks, eps, eta, m, n).map(|dt| spectral_norm(&dt))).transpose()?;
    let theta = pair_norm(&blocks.a22, &blocks.b22);
    let omega = pair_norm(&(l.m0() + &blocks.a11), &(l.m1() + &blocks.b11));
    Ok(SylvesterGauge {
        sigma_min_t,
        delta_t_norm,
        delta_t_bound,
        delta: sigma_min_t - delta_t_norm.unwrap_or(delta_t_bound),
        theta,
        omega,
    })
}

/// `‖ΔL‖_F` radius under which Step 1 is guaranteed to succeed.
pub fn step1_radius(d: usize, m_norm: f64) -> f64 {
    let r = SQRT2_M1 / d as f64;
    r * r / (1.0 + m_norm)
}

/// `‖ΔL‖_F` radius of the main theorem for `ε, η ≥ 1`.
pub fn nondegenerate_radius(d: usize, m_norm: f64) -> f64 {
    SQRT2_M1 * SQRT2_M1 / (d as f64).powf(2.5) / (1.0 + m_norm)
}

/// `‖ΔL‖_F` radius when `ε = 0` or `η = 0`.
pub fn degenerate_radius(d: usize) -> f64 {
    0.5 / (d as f64).powf(1.5)
}

/// Radius applicable to `l`.
pub fn pipeline_radius(l: &BlockKroneckerPencil) -> f64 {
    if l.is_degenerate() {
        degenerate_radius(l.grade())
    } else {
        nondegenerate_radius(l.grade(), l.m_norm())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step1Result {
    /// `εn × (η+1)m`.
    pub c: Matrix,
    /// `(ε+1)n × ηm`.
    pub d: Matrix,
    /// `ΔL̃_12 = (M + ΔL_11)D + ΔL_12`.
    pub l12_tilde: Pencil,
    /// `ΔL̃_21 = C(M + ΔL_11) + ΔL_21`.
    pub l21_tilde: Pencil,
    pub gauge: Option<SylvesterGauge>,
    /// `‖(C_i, D_i)‖_F` for `i = 0, 1, …`.
    pub iterate_norms: Vec<f64>,
    /// `‖(C_{i+1} − C_i, D_{i+1} − D_i)‖_F`.
    pub step_norms: Vec<f64>,
    /// Majorizing `κ_i`, one per iteration.
    pub kappa: Vec<f64>,
    pub iterations: usize,
    /// `‖[C I](L+ΔL)[D; I]‖_F` as a pencil.
    pub residual: f64,
    /// Stopping tolerance at the last iterate.
    pub stop_tol: f64,
}

impl Step1Result {
    pub fn cd_norm(&self) -> f64 {
        pair_norm(&self.c, &self.d)
    }
}

/// Step 1: fixed-point iteration on minimum-norm solutions of the
/// linearized Sylvester system. Passes `ΔL` through when `ε = 0` or `η = 0`.
pub fn solve_step1(l: &BlockKroneckerPencil, dl: &Pencil, policy: &RankPolicy, max_iter: usize, force: bool) -> Result<Step1Result, Error> {
    let blocks = PerturbationBlocks::split(l, dl)?;
    let (eps, eta, m, n) = (l.epsilon(), l.eta(), l.m(), l.n());
    let c_shape = (eps * n, (eta + 1) * m);
    let d_shape = ((eps + 1) * n, eta * m);
    if l.is_degenerate() {
        return Ok(Step1Result {
            c: Matrix::zeros(c_shape.0, c_shape.1),
            d: Matrix::zeros(d_shape.0, d_shape.1),
            l12_tilde: blocks.l12(),
            l21_tilde: blocks.l21(),
            gauge: None,
            iterate_norms: Vec::new(),
            step_norms: Vec::new(),
            kappa: Vec::new(),
            iterations: 0,
            residual: 0.0,
            stop_tol: 0.0,
        });
    }

    let radius = step1_radius(l.grade(), l.m_norm());
    let dl_norm = dl.frobenius_norm();
    if !force && dl_norm >= radius {
        return Err(Error::Precondition { what: "step 1 radius on ||dL||_F", value: dl_norm, bound: radius });
    }
    let gauge = sylvester_gauge(l, &blocks)?;
    if !force {
        if gauge.delta <= 0.0 {
            return Err(Error::Precondition { what: "delta = sigma_min(T) - ||dT||_2 > 0", value: gauge.delta, bound: 0.0 });
        }
        if gauge.kappa1() >= 0.25 {
            return Err(Error::Precondition { what: "theta*omega/delta^2 < 1/4", value: gauge.kappa1(), bound: 0.25 });
        }
    }

    let m0p = l.m0() + &blocks.a11;
    let m1p = l.m1() + &blocks.b11;
    let nc = c_shape.0 * c_shape.1;
    let unpack = |x: &Matrix| {
        let v = x.as_slice();
        (Matrix::unvec(&v[..nc], c_shape.0, c_shape.1), Matrix::unvec(&v[nc..], d_shape.0, d_shape.1))
    };
    let stack = |top: &Matrix, bot: &Matrix| Matrix::vstack(&[&top.vec(), &bot.vec()]);

    let mut c = Matrix::zeros(c_shape.0, c_shape.1);
    let mut d = Matrix::zeros(d_shape.0, d_shape.1);
    let mut iterate_norms = Vec::new();
    let mut step_norms = Vec::new();
    let mut iterations = 0;
    let mut stop_tol = 0.0;
    if gauge.theta > 0.0 {
        let k = &build_t(eps, eta, m, n)? + &build_delta_t(&blocks, eps, eta, m, n)?;
        let svd = Svd::new(&k);
        let tol = policy.threshold(k.rows(), k.cols(), svd.sigma_max());
        let rank = svd.rank(tol);
        if rank < k.rows() {
            return Err(Error::RankDeficient { what: "T + dT", rank, expected: k.rows() });
        }
        let x0 = svd.pseudo_solve(&stack(&blocks.a22, &blocks.b22.scale_real(-1.0)), tol);
        let mut x = x0.clone();
        (c, d) = unpack(&x);
        iterate_norms.push(x.frobenius_norm());
        let mut converged = false;
        while iterations < max_iter {
            let q0 = &(&c * &m0p) * &d;
            let q1 = &(&c * &m1p) * &d;
            let next = &x0 + &svd.pseudo_solve(&stack(&q0, &q1.scale_real(-1.0)), tol);
            let step = (&next - &x).frobenius_norm();
            x = next;
            (c, d) = unpack(&x);
            iterations += 1;
            iterate_norms.push(x.frobenius_norm());
            step_norms.push(step);
            stop_tol = 100.0 * f64::EPSILON * (1.0 + x.frobenius_norm());
            if !step.is_finite() {
                break;
            }
            if step <= stop_tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { what: "step 1 fixed-point iteration", iterations });
        }
    }

    let l12_tilde = Pencil::new(&(&m0p * &d) + &blocks.a12, &(&m1p * &d) + &blocks.b12)?;
    let l21_tilde = Pencil::new(&(&c * &m0p) + &blocks.a21, &(&c * &m1p) + &blocks.b21)?;
    let residual = sylvester_residual(l, dl, &c, &d)?;
    Ok(Step1Result {
        kappa: kappa_sequence(gauge.kappa1(), iterations.max(1)),
        c,
        d,
        l12_tilde,
        l21_tilde,
        gauge: Some(gauge),
        iterate_norms,
        step_norms,
        iterations,
        residual,
        stop_tol,
    })
}

/// `‖[C I](L+ΔL)[D; I]‖_F`, the `(2,2)` block after the strict equivalence.
pub fn sylvester_residual(l: &BlockKroneckerPencil, dl: &Pencil, c: &Matrix, d: &Matrix) -> Result<f64, Error> {
    let full = l.assemble().add(dl)?;
    let left = Matrix::hstack(&[c, &Matrix::identity(c.rows())]);
    let right = Matrix::vstack(&[d, &Matrix::identity(d.cols())]);
    let r0 = &(&left * full.m0()) * &right;
    let r1 = &(&left * full.m1()) * &right;
    Ok(pair_norm(&r0, &r1))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step2Result {
    /// `(ε+1)n × n`, grade `ε`.
    pub delta_r: MatrixPolynomial,
    /// `‖(L_ε⊗I_n + ΔL̃)(Λ_ε⊗I_n + ΔR)‖_F`.
    pub duality_residual: f64,
    /// `σ_min(C_ε(L_ε⊗I_n + ΔL̃))`; `None` for `ε = 0`.
    pub sigma_min_conv: Option<f64>,
}

/// `‖ΔL̃_21‖_F` radius for Step 2.
pub fn step2_radius(eps: usize) -> f64 {
    0.5 / ((eps + 1) as f64).powf(1.5)
}

/// Step 2: minimum-norm `ΔR_ε` with `(L_ε⊗I_n + ΔL̃_21)(Λ_ε⊗I_n + ΔR_ε) = 0`.
/// Apply to `ΔL̃_12^T` with `(η, m)` for the other side.
pub fn solve_step2(l21_tilde: &Pencil, eps: usize, n: usize, policy: &RankPolicy, force: bool) -> Result<Step2Result, Error> {
    let want = (eps * n, (eps + 1) * n);
    if l21_tilde.shape() != want {
        return Err(Error::DimensionMismatch { op: "solve_step2", left: want, right: l21_tilde.shape() });
    }
    if eps == 0 {
        return Ok(Step2Result { delta_r: MatrixPolynomial::zeros(n, n, 0), duality_residual: 0.0, sigma_min_conv: None });
    }
    let norm = l21_tilde.frobenius_norm();
    let radius = step2_radius(eps);
    if !force && norm >= radius {
        return Err(Error::Precondition { what: "step 2 radius on ||dL21~||_F", value: norm, bound: radius });
    }
    let k = build_l_kron(eps, n).add(l21_tilde)?.to_polynomial();
    let lam = build_lambda_kron(eps, n);
    let c_eps = k.convolution(eps).matrix;
    let svd = Svd::new(&c_eps);
    let tol = policy.threshold(c_eps.rows(), c_eps.cols(), svd.sigma_max());
    let rank = svd.rank(tol);
    if rank < c_eps.rows() {
        return Err(Error::RankDeficient { what: "C_eps(L_eps x I_n + dL21~)", rank, expected: c_eps.rows() });
    }
    let rhs = l21_tilde.to_polynomial().multiply(&lam)?.convolution(0).matrix;
    let x = svd.pseudo_solve(&rhs, tol).scale_real(-1.0);
    let delta_r = MatrixPolynomial::from_descending_stack(&x, (eps + 1) * n)?;
    let duality_residual = k.multiply(&lam.add(&delta_r)?)?.frobenius_norm();
    Ok(Step2Result { delta_r, duality_residual, sigma_min_conv: Some(svd.sigma_min()) })
}

/// Step 3: `P + ΔP = (Λ_η^T⊗I_m + ΔR_η^T)(M + ΔL_11)(Λ_ε⊗I_n + ΔR_ε)`; returns `ΔP`.
pub fn assemble_step3(
    l: &BlockKroneckerPencil,
    dl11: &Pencil,
    dr_eps: &MatrixPolynomial,
    dr_eta: &MatrixPolynomial,
    force: bool,
) -> Result<MatrixPolynomial, Error> {
    let lim = core::f64::consts::FRAC_1_SQRT_2;
    for (what, r) in [("||dR_eps||_F < 1/sqrt(2)", dr_eps), ("||dR_eta||_F < 1/sqrt(2)", dr_eta)] {
        if !force && r.frobenius_norm() >= lim {
            return Err(Error::Precondition { what, value: r.frobenius_norm(), bound: lim });
        }
    }
    let left = build_lambda_kron(l.eta(), l.m()).add(dr_eta)?.transpose();
    let mid = l.m_pencil().add(dl11)?.to_polynomial();
    let right = build_lambda_kron(l.epsilon(), l.n()).add(dr_eps)?;
    let perturbed = left.multiply(&mid)?.multiply(&right)?;
    perturbed.sub(&recover_polynomial(l))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineOptions {
    /// Run even when a radius condition fails; the report is then unguaranteed.
    pub force: bool,
    pub policy: RankPolicy,
    pub max_iter: usize,
    /// Compare the spectra of `L + ΔL` and of a hook linearization of `P + ΔP`.
    pub check_spectra: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { force: false, policy: RankPolicy::default(), max_iter: 200, check_spectra: true }
    }
}

/// One a priori inequality `value ≤ bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.value <= self.bound
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralConsistency {
    /// Smallest chordal distance between distinct eigenvalues of `L + ΔL`.
    pub eigenvalue_gap: f64,
    /// Largest chordal distance in the optimal matching; infinite if the counts differ.
    pub max_chordal: f64,
    pub indices_agree: bool,
    /// Only meaningful when the eigenvalues are well separated.
    pub applicable: bool,
    pub passed: bool,
}

/// Chordal tolerance for the spectral consistency check.
pub const CONSISTENCY_TOL: f64 = 1e-6;
/// Minimum eigenvalue separation for the consistency check to apply.
pub const CONSISTENCY_GAP: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq)]
pub struct BackwardErrorReport {
    pub epsilon: usize,
    pub eta: usize,
    pub m: usize,
    pub n: usize,
    pub grade: usize,
    pub norm_p: f64,
    pub norm_m: f64,
    pub norm_l: f64,
    pub norm_dl: f64,
    pub radius: f64,
    /// Every radius condition held, so the bounds are theorems for this run.
    pub guaranteed: bool,
    pub step1: Step1Result,
    pub step2_eps: Step2Result,
    pub step2_eta: Step2Result,
    pub delta_p: MatrixPolynomial,
    pub norm_delta_p: f64,
    /// `‖ΔP‖_F / ‖P‖_F`.
    pub ratio: f64,
    /// Main theorem right-hand side for the ratio.
    pub theorem_bound: f64,
    /// `d³√(m+n)·‖ΔL‖/‖L‖`, meaningful when `‖M‖ ≈ ‖P‖ ≈ 1`.
    pub informal_bound: f64,
    pub checks: Vec<BoundCheck>,
    pub spectra: Option<SpectralConsistency>,
}

impl BackwardErrorReport {
    pub fn all_bounds_hold(&self) -> bool {
        self.checks.iter().all(BoundCheck::holds)
    }

    pub fn failed_checks(&self) -> Vec<&BoundCheck> {
        self.checks.iter().filter(|c| !c.holds()).collect()
    }
}

pub fn run_pipeline(l: &BlockKroneckerPencil, dl: &Pencil, opts: &PipelineOptions) -> Result<BackwardErrorReport, Error> {
    let (eps, eta, m, n) = (l.epsilon(), l.eta(), l.m(), l.n());
    let d = l.grade();
    let df = d as f64;
    let p = recover_polynomial(l);
    let norm_p = p.frobenius_norm();
    let norm_m = l.m_norm();
    let norm_l = l.frobenius_norm();
    let norm_dl = dl.frobenius_norm();
    let radius = pipeline_radius(l);
    let mut guaranteed = norm_dl < radius;
    if !opts.force && !guaranteed {
        let what = if l.is_degenerate() { "degenerate radius on ||dL||_F" } else { "main radius on ||dL||_F" };
        return Err(Error::Precondition { what, value: norm_dl, bound: radius });
    }

    let blocks = PerturbationBlocks::split(l, dl)?;
    let step1 = solve_step1(l, dl, &opts.policy, opts.max_iter, opts.force)?;
    let l21t = &step1.l21_tilde;
    let l12t_t = step1.l12_tilde.transpose();
    let tilde_max = l21t.frobenius_norm().max(l12t_t.frobenius_norm());
    guaranteed &= l21t.frobenius_norm() < step2_radius(eps) && l12t_t.frobenius_norm() < step2_radius(eta);
    let step2_eps = solve_step2(l21t, eps, n, &opts.policy, opts.force)?;
    let step2_eta = solve_step2(&l12t_t, eta, m, &opts.policy, opts.force)?;
    let r_eps = step2_eps.delta_r.frobenius_norm();
    let r_eta = step2_eta.delta_r.frobenius_norm();
    guaranteed &= r_eps.max(r_eta) < core::f64::consts::FRAC_1_SQRT_2;
    let dl11 = blocks.l11();
    let delta_p = assemble_step3(l, &dl11, &step2_eps.delta_r, &step2_eta.delta_r, opts.force)?;
    let norm_delta_p = delta_p.frobenius_norm();
    let ratio = if norm_p > 0.0 { norm_delta_p / norm_p } else { f64::INFINITY };
    let rel_dl = if norm_l > 0.0 { norm_dl / norm_l } else { 0.0 };
    let dl11_norm = dl11.frobenius_norm();

    let mut checks = Vec::new();
    let theorem_bound;
    for (side, k, tilde, r) in [("eps", eps, l21t.frobenius_norm(), r_eps), ("eta", eta, l12t_t.frobenius_norm(), r_eta)] {
        if k > 0 {
            let name = if side == "eps" { "||dR_eps|| <= sqrt2 (eps+1) ||dL21~||" } else { "||dR_eta|| <= sqrt2 (eta+1) ||dL12~||" };
            checks.push(BoundCheck { name, value: r, bound: SQRT_2 * (k + 1) as f64 * tilde });
        }
    }
    if l.is_degenerate() {
        theorem_bound = 2.0 * df * (norm_l / norm_p) * (1.0 + norm_m) * rel_dl;
        let r = r_eps.max(r_eta);
        if eps == 0 && eta == 0 {
            let rounding = 4.0 * f64::EPSILON * (norm_m + dl11_norm);
            checks.push(BoundCheck { name: "dP == dL11", value: delta_p.sub(&dl11.to_polynomial())?.frobenius_norm(), bound: rounding });
        } else {
            checks.push(BoundCheck {
                name: "dP <= 3 ||dL11|| + sqrt2 ||M|| ||dR||",
                value: norm_delta_p,
                bound: 3.0 * dl11_norm + SQRT_2 * norm_m * r,
            });
        }
    } else {
        theorem_bound = 14.0 * df.powf(2.5) * (norm_l / norm_p) * (1.0 + norm_m + norm_m * norm_m) * rel_dl;
        let cd = step1.cd_norm();
        if let Some(g) = &step1.gauge {
            if g.admissible() {
                checks.push(BoundCheck { name: "||(C,D)|| <= 2 theta / delta", value: cd, bound: 2.0 * g.theta / g.delta });
            }
        }
        checks.push(BoundCheck { name: "||(C,D)|| <= d ||dL|| / (sqrt2 - 1)", value: cd, bound: df * norm_dl / SQRT2_M1 });
        checks.push(BoundCheck {
            name: "max ||dL~|| <= ||dL|| (1 + d (||M|| + ||dL||) / (sqrt2 - 1))",
            value: tilde_max,
            bound: norm_dl * (1.0 + df * (norm_m + norm_dl) / SQRT2_M1),
        });
        checks.push(BoundCheck { name: "max ||dR|| <= sqrt2 d max ||dL~||", value: r_eps.max(r_eta), bound: SQRT_2 * df * tilde_max });
        checks.push(BoundCheck {
            name: "||dP|| <= sqrt(d) (5 ||dL11|| + 4 ||M|| max ||dR||)",
            value: norm_delta_p,
            bound: df.sqrt() * (5.0 * dl11_norm + 4.0 * norm_m * r_eps.max(r_eta)),
        });
        checks.push(BoundCheck { name: "step 1 residual <= 10 stop tol", value: step1.residual, bound: 10.0 * step1.stop_tol });
    }
    checks.push(BoundCheck { name: "ratio <= theorem bound", value: ratio, bound: theorem_bound });
    let informal_bound = df.powi(3) * ((m + n) as f64).sqrt() * rel_dl;

    let spectra = if opts.check_spectra { Some(spectral_consistency(l, dl, &p.add(&delta_p)?, &opts.policy)?) } else { None };

    Ok(BackwardErrorReport {
        epsilon: eps,
        eta,
        m,
        n,
        grade: d,
        norm_p,
        norm_m,
        norm_l,
        norm_dl,
        radius,
        guaranteed,
        step1,
        step2_eps,
        step2_eta,
        delta_p,
        norm_delta_p,
        ratio,
        theorem_bound,
        informal_bound,
        checks,
        spectra,
    })
}

const SQRT_2: f64 = core::f64::consts::SQRT_2;

/// Compares the complete eigenstructure of `L + ΔL` with that of the hook
/// linearization of `P + ΔP` (same `ε`, `η`, hence the same index shifts).
pub fn spectral_consistency(
    l: &BlockKroneckerPencil,
    dl: &Pencil,
    perturbed: &MatrixPolynomial,
    policy: &RankPolicy,
) -> Result<SpectralConsistency, Error> {
    let a = staircase_eigenstructure(&l.assemble().add(dl)?, policy)?;
    let hook = from_polynomial(perturbed, l.epsilon(), l.eta(), &Placement::Hook)?;
    let b = staircase_eigenstructure(&hook.assemble(), policy)?;
    let sa = a.spectrum();
    let eigenvalue_gap = min_chordal_gap(&sa);
    let max_chordal = match_chordal(&sa, &b.spectrum()).map_or(f64::INFINITY, |mt| mt.max_distance);
    let indices_agree = a.right == b.right && a.left == b.left;
    let applicable = eigenvalue_gap > CONSISTENCY_GAP;
    Ok(SpectralConsistency {
        eigenvalue_gap,
        max_chordal,
        indices_agree,
        applicable,
        passed: max_chordal <= CONSISTENCY_TOL && indices_agree,
    })
}
