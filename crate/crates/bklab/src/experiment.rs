//! Seeded random polynomials, perturbations and batch backward-error studies.

use std::fmt;
use std::str::FromStr;

use bklab_core::backward_error::{run_pipeline, PipelineOptions};
use bklab_core::block_kronecker::{from_polynomial, Placement};
use bklab_core::matpoly::build_l_kron;
use bklab_core::{c64, Error, Matrix, MatrixPolynomial, Pencil, RankPolicy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PlacementTag {
    Frobenius1,
    Frobenius2,
    Hook,
    Custom,
}

impl PlacementTag {
    /// `(ε, η)` forced by the placement, if any.
    pub fn forced_split(self, d: usize) -> Option<(usize, usize)> {
        match self {
            PlacementTag::Frobenius1 => Some((d - 1, 0)),
            PlacementTag::Frobenius2 => Some((0, d - 1)),
            PlacementTag::Hook | PlacementTag::Custom => None,
        }
    }
}

/// Inclusive integer range written `a` or `a:b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeRange {
    pub lo: usize,
    pub hi: usize,
}

impl SizeRange {
    pub fn fixed(v: usize) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        rng.random_range(self.lo..=self.hi)
    }
}

impl FromStr for SizeRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad range bound {t:?}: {e}"));
        let r = match s.split_once(':') {
            Some((a, b)) => Self { lo: parse(a)?, hi: parse(b)? },
            None => Self::fixed(parse(s)?),
        };
        if r.lo > r.hi {
            return Err(format!("empty range {s}"));
        }
        Ok(r)
    }
}

impl fmt::Display for SizeRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}:{}", self.lo, self.hi)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: usize,
    pub m: SizeRange,
    pub n: SizeRange,
    pub d: SizeRange,
    pub epsilon: Option<usize>,
    pub eta: Option<usize>,
    pub mag: f64,
    pub placement: PlacementTag,
    pub tol: Option<f64>,
    pub unit_roundoff: f64,
    pub force: bool,
    pub check_spectra: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 10,
            m: SizeRange::fixed(2),
            n: SizeRange::fixed(2),
            d: SizeRange::fixed(3),
            epsilon: None,
            eta: None,
            mag: 1e-8,
            placement: PlacementTag::Hook,
            tol: None,
            unit_roundoff: f64::EPSILON,
            force: false,
            check_spectra: true,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.m.lo == 0 || self.n.lo == 0 || self.d.lo == 0 {
            return Err("m, n and d must be at least 1".into());
        }
        if !(self.mag >= 0.0 && self.mag.is_finite()) {
            return Err(format!("perturbation magnitude must be finite and nonnegative, got {}", self.mag));
        }
        if let (Some(e), Some(h)) = (self.epsilon, self.eta) {
            let d = e + h + 1;
            if d < self.d.lo || d > self.d.hi {
                return Err(format!("epsilon + eta + 1 = {d} lies outside the grade range {}", self.d));
            }
        }
        match self.placement {
            PlacementTag::Frobenius1 if self.eta.is_some_and(|h| h != 0) => Err("frobenius1 needs eta = 0".into()),
            PlacementTag::Frobenius2 if self.epsilon.is_some_and(|e| e != 0) => Err("frobenius2 needs epsilon = 0".into()),
            _ => Ok(()),
        }
    }

    pub fn policy(&self) -> RankPolicy {
        RankPolicy::with_eps(self.unit_roundoff).with_tol(self.tol)
    }

    /// Resolves `(d, ε, η)` for one trial; `ε + η + 1 = d` always holds.
    pub fn split(&self, rng: &mut ChaCha8Rng) -> (usize, usize, usize) {
        if let (Some(e), Some(h)) = (self.epsilon, self.eta) {
            return (e + h + 1, e, h);
        }
        match (self.placement, self.epsilon, self.eta) {
            (PlacementTag::Frobenius1, Some(e), None) => return (e + 1, e, 0),
            (PlacementTag::Frobenius2, None, Some(h)) => return (h + 1, 0, h),
            _ => {}
        }
        let d = match (self.epsilon, self.eta) {
            (Some(k), None) | (None, Some(k)) => SizeRange { lo: self.d.lo.max(k + 1), hi: self.d.hi.max(k + 1) }.sample(rng),
            _ => self.d.sample(rng),
        };
        if let Some((e, h)) = self.placement.forced_split(d) {
            return (d, e, h);
        }
        match (self.epsilon, self.eta) {
            (Some(e), None) => (d, e, d - 1 - e),
            (None, Some(h)) => (d, d - 1 - h, h),
            _ => {
                let e = rng.random_range(0..d);
                (d, e, d - 1 - e)
            }
        }
    }
}

/// Independent stream for trial `index`; parallel and serial runs agree.
pub fn trial_rng(master: u64, index: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(master);
    r.set_stream(index as u64);
    r
}

/// I.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Matrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(s * re, s * im)
    })
}

/// Gaussian coefficients normalized to `‖P‖_F = 1`.
pub fn random_polynomial(rng: &mut ChaCha8Rng, m: usize, n: usize, d: usize) -> MatrixPolynomial {
    let p = MatrixPolynomial::new((0..=d).map(|_| gaussian_matrix(rng, m, n)).collect()).expect("nonempty coefficient list");
    p.scale(c64(1.0 / p.frobenius_norm(), 0.0))
}

fn integer_polynomial(rng: &mut ChaCha8Rng, rows: usize, cols: usize, d: usize) -> MatrixPolynomial {
    let mut coeffs: Vec<Matrix> =
        (0..=d).map(|_| Matrix::from_fn(rows, cols, |_, _| c64(rng.random_range(-3i32..=3) as f64, 0.0))).collect();
    for i in 0..rows.min(cols) {
        coeffs[d][(i, i)] = c64(rng.random_range(1i32..=3) as f64, 0.0);
    }
    MatrixPolynomial::new(coeffs).expect("nonempty coefficient list")
}

/// `G(λ)·[I_r 0; 0 0]·H(λ)` with small-integer `G` (`m × m`, degree `dg`) and
/// `H` (`n × n`, degree `dh`). Every product is exact in floating point, so
/// the rank is exactly `r` when `G` and `H` are regular.
pub fn singular_polynomial(rng: &mut ChaCha8Rng, m: usize, n: usize, rank: usize, dg: usize, dh: usize) -> MatrixPolynomial {
    let g = integer_polynomial(rng, m, m, dg);
    let h = integer_polynomial(rng, n, n, dh);
    let mid = MatrixPolynomial::constant(Matrix::from_fn(m, n, |i, j| if i == j && i < rank { c64(1.0, 0.0) } else { c64(0.0, 0.0) }));
    g.multiply(&mid).and_then(|x| x.multiply(&h)).expect("conformal factors")
}

/// Dense Gaussian pencil scaled to `‖ΔL‖_F = mag`.
pub fn random_perturbation(rng: &mut ChaCha8Rng, rows: usize, cols: usize, mag: f64) -> Pencil {
    let a = gaussian_matrix(rng, rows, cols);
    let b = gaussian_matrix(rng, rows, cols);
    let norm = bklab_core::linalg::pair_norm(&a, &b);
    let s = if norm > 0.0 { mag / norm } else { 0.0 };
    Pencil::new(a.scale_real(s), b.scale_real(s)).expect("same shape")
}

/// Hook blocks plus `(L_η^T⊗I_m)X + Y(L_ε⊗I_n)` with Gaussian `X`, `Y`; linearizes the same `P`.
pub fn random_custom_placement(rng: &mut ChaCha8Rng, p: &MatrixPolynomial, eps: usize, eta: usize) -> Result<Placement, Error> {
    let (m, n) = p.shape();
    let hook = from_polynomial(p, eps, eta, &Placement::Hook)?;
    let mut m0 = hook.m0().clone();
    let mut m1 = hook.m1().clone();
    if eta > 0 {
        let k2t = build_l_kron(eta, m).transpose();
        let x = gaussian_matrix(rng, eta * m, (eps + 1) * n);
        let x = x.scale_real(0.5 / x.frobenius_norm());
        m0 = &m0 + &(k2t.m0() * &x);
        m1 = &m1 + &(k2t.m1() * &x);
    }
    if eps > 0 {
        let k1 = build_l_kron(eps, n);
        let y = gaussian_matrix(rng, (eta + 1) * m, eps * n);
        let y = y.scale_real(0.5 / y.frobenius_norm());
        m0 = &m0 + &(&y * k1.m0());
        m1 = &m1 + &(&y * k1.m1());
    }
    Ok(Placement::Custom { m0, m1 })
}

pub fn placement_for(tag: PlacementTag, rng: &mut ChaCha8Rng, p: &MatrixPolynomial, eps: usize, eta: usize) -> Result<Placement, Error> {
    Ok(match tag {
        PlacementTag::Frobenius1 => Placement::Frobenius1,
        PlacementTag::Frobenius2 => Placement::Frobenius2,
        PlacementTag::Hook => Placement::Hook,
        PlacementTag::Custom => random_custom_placement(rng, p, eps, eta)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialStatus {
    Pass,
    Fail,
    /// A radius condition failed and `force` was off.
    Skipped,
    /// Run under `force` outside the radius; bounds are reported, not judged.
    Unguaranteed,
    Error,
}

/// One CSV/JSON row per trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub epsilon: usize,
    pub eta: usize,
    pub placement: PlacementTag,
    pub status: TrialStatus,
    pub norm_m: f64,
    pub norm_l: f64,
    pub norm_dl: f64,
    pub radius: f64,
    pub ratio: Option<f64>,
    pub theorem_bound: Option<f64>,
    /// `ratio / theorem_bound`; below 1 when the main bound holds.
    pub quotient: Option<f64>,
    pub informal_bound: Option<f64>,
    pub iterations: Option<usize>,
    pub step1_residual: Option<f64>,
    pub cd_norm: Option<f64>,
    pub duality_residual: Option<f64>,
    /// Smallest `bound − value` over all checks.
    pub min_margin: Option<f64>,
    pub failed_checks: String,
    pub spectra_applicable: Option<bool>,
    pub spectra_max_chordal: Option<f64>,
    pub spectra_passed: Option<bool>,
    pub message: String,
}

pub fn run_trial(cfg: &ExperimentConfig, index: usize) -> TrialRow {
    let mut rng = trial_rng(cfg.seed, index);
    let m = cfg.m.sample(&mut rng);
    let n = cfg.n.sample(&mut rng);
    let (d, eps, eta) = cfg.split(&mut rng);
    let p = random_polynomial(&mut rng, m, n, d);
    let mut row = TrialRow {
        trial: index,
        m,
        n,
        d,
        epsilon: eps,
        eta,
        placement: cfg.placement,
        status: TrialStatus::Error,
        norm_m: f64::NAN,
        norm_l: f64::NAN,
        norm_dl: f64::NAN,
        radius: f64::NAN,
        ratio: None,
        theorem_bound: None,
        quotient: None,
        informal_bound: None,
        iterations: None,
        step1_residual: None,
        cd_norm: None,
        duality_residual: None,
        min_margin: None,
        failed_checks: String::new(),
        spectra_applicable: None,
        spectra_max_chordal: None,
        spectra_passed: None,
        message: String::new(),
    };
    let l = match placement_for(cfg.placement, &mut rng, &p, eps, eta).and_then(|pl| from_polynomial(&p, eps, eta, &pl)) {
        Ok(l) => l,
        Err(e) => {
            row.message = e.to_string();
            return row;
        }
    };
    let (rows, cols) = l.shape();
    let dl = random_perturbation(&mut rng, rows, cols, cfg.mag);
    row.norm_m = l.m_norm();
    row.norm_l = l.frobenius_norm();
    row.norm_dl = dl.frobenius_norm();
    row.radius = bklab_core::backward_error::pipeline_radius(&l);
    let opts = PipelineOptions { force: cfg.force, policy: cfg.policy(), max_iter: 200, check_spectra: cfg.check_spectra };
    match run_pipeline(&l, &dl, &opts) {
        Err(e @ Error::Precondition { .. }) => {
            row.status = TrialStatus::Skipped;
            row.message = e.to_string();
        }
        Err(e) => row.message = e.to_string(),
        Ok(r) => {
            row.ratio = Some(r.ratio);
            row.theorem_bound = Some(r.theorem_bound);
            row.quotient = (r.theorem_bound > 0.0).then(|| r.ratio / r.theorem_bound);
            row.informal_bound = Some(r.informal_bound);
            row.iterations = Some(r.step1.iterations);
            row.step1_residual = Some(r.step1.residual);
            row.cd_norm = Some(r.step1.cd_norm());
            row.duality_residual = Some(r.step2_eps.duality_residual.max(r.step2_eta.duality_residual));
            row.min_margin = r.checks.iter().map(|c| c.bound - c.value).reduce(f64::min);
            row.failed_checks = r.failed_checks().iter().map(|c| c.name).collect::<Vec<_>>().join("; ");
            let mut spectra_ok = true;
            if let Some(s) = &r.spectra {
                row.spectra_applicable = Some(s.applicable);
                row.spectra_max_chordal = s.max_chordal.is_finite().then_some(s.max_chordal);
                row.spectra_passed = Some(s.passed);
                spectra_ok = s.indices_agree && (!s.applicable || s.passed);
            }
            row.status = if !r.guaranteed {
                TrialStatus::Unguaranteed
            } else if r.all_bounds_hold() && spectra_ok {
                TrialStatus::Pass
            } else {
                TrialStatus::Fail
            };
        }
    }
    row
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub unguaranteed: usize,
    pub errors: usize,
    pub max_ratio: Option<f64>,
    pub max_quotient: Option<f64>,
}

impl BatchSummary {
    /// No failures and no errors; skipped trials do not count against a batch.
    pub fn ok(&self) -> bool {
        self.failed == 0 && self.errors == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub config: ExperimentConfig,
    pub rows: Vec<TrialRow>,
    pub summary: BatchSummary,
    /// Seconds since the Unix epoch; the only field that varies between identical runs.
    pub generated_at: u64,
}

pub fn summarize(rows: &[TrialRow]) -> BatchSummary {
    let count = |s: TrialStatus| rows.iter().filter(|r| r.status == s).count();
    let max = |f: fn(&TrialRow) -> Option<f64>| rows.iter().filter_map(f).reduce(f64::max);
    BatchSummary {
        trials: rows.len(),
        passed: count(TrialStatus::Pass),
        failed: count(TrialStatus::Fail),
        skipped: count(TrialStatus::Skipped),
        unguaranteed: count(TrialStatus::Unguaranteed),
        errors: count(TrialStatus::Error),
        max_ratio: max(|r| r.ratio),
        max_quotient: max(|r| r.quotient),
    }
}

pub fn run_batch(cfg: &ExperimentConfig) -> BatchReport {
    let rows: Vec<TrialRow> = (0..cfg.trials).into_par_iter().map(|i| run_trial(cfg, i)).collect();
    let summary = summarize(&rows);
    let generated_at = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs());
    BatchReport { config: cfg.clone(), rows, summary, generated_at }
}
