//! JSON and CSV shapes for polynomials, pencils, eigenstructures and reports.
//!
//! Complex entries are `[re, im]` pairs and matrices are lists of rows.

use std::fmt;
use std::path::Path;

use bklab_core::backward_error::{BackwardErrorReport, SpectralConsistency, Step1Result, Step2Result, SylvesterGauge};
use bklab_core::block_kronecker::BlockKroneckerPencil;
use bklab_core::eigenstructure::Eigenstructure;
use bklab_core::{c64, Matrix, MatrixPolynomial, Pencil, RankDecision};
use serde::{Deserialize, Serialize};

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

/// Error raised while reading or decoding an input file.
#[derive(Debug)]
pub enum FormatError {
    Io(String, std::io::Error),
    Json(serde_json::Error),
    Shape(String),
    Core(bklab_core::Error),
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Io(path, e) => write!(f, "{path}: {e}"),
            FormatError::Json(e) => write!(f, "invalid JSON: {e}"),
            FormatError::Shape(s) => write!(f, "{s}"),
            FormatError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for FormatError {}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json(e)
    }
}

impl From<bklab_core::Error> for FormatError {
    fn from(e: bklab_core::Error) -> Self {
        FormatError::Core(e)
    }
}

pub fn matrix_to_json(a: &Matrix) -> MatrixJson {
    (0..a.rows()).map(|i| a.row(i).iter().map(|z| [z.re, z.im]).collect()).collect()
}

/// `rows × cols` must be given because an empty list of rows carries no column count.
pub fn matrix_from_json(j: &MatrixJson, rows: usize, cols: usize, what: &str) -> Result<Matrix, FormatError> {
    if j.len() != rows || j.iter().any(|r| r.len() != cols) {
        return Err(FormatError::Shape(format!("{what}: expected {rows}x{cols} entries")));
    }
    Ok(Matrix::from_fn(rows, cols, |i, k| c64(j[i][k][0], j[i][k][1])))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub m: usize,
    pub n: usize,
    pub grade: usize,
    pub coeffs: Vec<MatrixJson>,
}

impl PolynomialJson {
    pub fn from_poly(p: &MatrixPolynomial) -> Self {
        Self { m: p.rows(), n: p.cols(), grade: p.grade(), coeffs: p.coeffs().iter().map(matrix_to_json).collect() }
    }

    pub fn to_poly(&self) -> Result<MatrixPolynomial, FormatError> {
        if self.coeffs.len() != self.grade + 1 {
            return Err(FormatError::Shape(format!(
                "grade {} needs {} coefficients, found {}",
                self.grade,
                self.grade + 1,
                self.coeffs.len()
            )));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| matrix_from_json(c, self.m, self.n, &format!("coefficient {k}")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MatrixPolynomial::with_shape(self.m, self.n, coeffs)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockKroneckerJson {
    pub epsilon: usize,
    pub eta: usize,
    pub m: usize,
    pub n: usize,
    #[serde(rename = "M0")]
    pub m0: MatrixJson,
    #[serde(rename = "M1")]
    pub m1: MatrixJson,
}

impl BlockKroneckerJson {
    pub fn from_pencil(l: &BlockKroneckerPencil) -> Self {
        Self { epsilon: l.epsilon(), eta: l.eta(), m: l.m(), n: l.n(), m0: matrix_to_json(l.m0()), m1: matrix_to_json(l.m1()) }
    }

    pub fn to_pencil(&self) -> Result<BlockKroneckerPencil, FormatError> {
        let (r, c) = ((self.eta + 1) * self.m, (self.epsilon + 1) * self.n);
        let m0 = matrix_from_json(&self.m0, r, c, "M0")?;
        let m1 = matrix_from_json(&self.m1, r, c, "M1")?;
        Ok(BlockKroneckerPencil::new(m0, m1, self.epsilon, self.eta, self.m, self.n)?)
    }
}

pub fn pencil_to_json(p: &Pencil) -> PolynomialJson {
    PolynomialJson::from_poly(&p.to_polynomial())
}

/// Any file the CLI accepts as input.
#[derive(Clone, Debug, PartialEq)]
pub enum InputFile {
    Polynomial(MatrixPolynomial),
    BlockKronecker(BlockKroneckerPencil),
}

pub fn parse_input(text: &str) -> Result<InputFile, FormatError> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    if v.get("epsilon").is_some() {
        Ok(InputFile::BlockKronecker(serde_json::from_value::<BlockKroneckerJson>(v)?.to_pencil()?))
    } else {
        Ok(InputFile::Polynomial(serde_json::from_value::<PolynomialJson>(v)?.to_poly()?))
    }
}

pub fn read_input(path: &Path) -> Result<InputFile, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|e| FormatError::Io(path.display().to_string(), e))?;
    parse_input(&text)
}

pub fn read_polynomial(path: &Path) -> Result<MatrixPolynomial, FormatError> {
    match read_input(path)? {
        InputFile::Polynomial(p) => Ok(p),
        InputFile::BlockKronecker(_) => {
            Err(FormatError::Shape(format!("{}: expected a polynomial, found a block Kronecker pencil", path.display())))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankDecisionJson {
    pub context: String,
    pub rows: usize,
    pub cols: usize,
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub tolerance: f64,
    pub borderline: bool,
}

impl From<&RankDecision> for RankDecisionJson {
    fn from(d: &RankDecision) -> Self {
        Self {
            context: d.context.clone(),
            rows: d.rows,
            cols: d.cols,
            singular_values: d.singular_values.clone(),
            rank: d.rank,
            tolerance: d.tolerance,
            borderline: d.is_borderline(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenstructureJson {
    /// `[re, im, multiplicity]`.
    pub finite: Vec<[f64; 3]>,
    pub infinite: Vec<usize>,
    pub right: Vec<usize>,
    pub left: Vec<usize>,
    pub rank_log: Vec<RankDecisionJson>,
}

impl From<&Eigenstructure> for EigenstructureJson {
    fn from(e: &Eigenstructure) -> Self {
        Self {
            finite: e.finite.iter().map(|&(z, k)| [z.re, z.im, k as f64]).collect(),
            infinite: e.infinite.clone(),
            right: e.right.clone(),
            left: e.left.clone(),
            rank_log: e.rank_log.iter().map(RankDecisionJson::from).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckJson {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeJson {
    pub sigma_min_t: f64,
    pub delta_t_norm: Option<f64>,
    pub delta_t_bound: f64,
    pub delta: f64,
    pub theta: f64,
    pub omega: f64,
    pub kappa1: f64,
    pub kappa_limit: Option<f64>,
    pub admissible: bool,
}

impl From<&SylvesterGauge> for GaugeJson {
    fn from(g: &SylvesterGauge) -> Self {
        Self {
            sigma_min_t: g.sigma_min_t,
            delta_t_norm: g.delta_t_norm,
            delta_t_bound: g.delta_t_bound,
            delta: g.delta,
            theta: g.theta,
            omega: g.omega,
            kappa1: g.kappa1(),
            kappa_limit: g.kappa_limit(),
            admissible: g.admissible(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step1Json {
    pub c: MatrixJson,
    pub d: MatrixJson,
    pub cd_norm: f64,
    pub gauge: Option<GaugeJson>,
    pub iterations: usize,
    pub iterate_norms: Vec<f64>,
    pub step_norms: Vec<f64>,
    pub kappa: Vec<f64>,
    pub residual: f64,
    pub stop_tol: f64,
    pub l12_tilde_norm: f64,
    pub l21_tilde_norm: f64,
}

impl From<&Step1Result> for Step1Json {
    fn from(s: &Step1Result) -> Self {
        Self {
            c: matrix_to_json(&s.c),
            d: matrix_to_json(&s.d),
            cd_norm: s.cd_norm(),
            gauge: s.gauge.as_ref().map(GaugeJson::from),
            iterations: s.iterations,
            iterate_norms: s.iterate_norms.clone(),
            step_norms: s.step_norms.clone(),
            kappa: s.kappa.clone(),
            residual: s.residual,
            stop_tol: s.stop_tol,
            l12_tilde_norm: s.l12_tilde.frobenius_norm(),
            l21_tilde_norm: s.l21_tilde.frobenius_norm(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step2Json {
    pub delta_r: PolynomialJson,
    pub norm: f64,
    pub duality_residual: f64,
    pub sigma_min_conv: Option<f64>,
}

impl From<&Step2Result> for Step2Json {
    fn from(s: &Step2Result) -> Self {
        Self {
            delta_r: PolynomialJson::from_poly(&s.delta_r),
            norm: s.delta_r.frobenius_norm(),
            duality_residual: s.duality_residual,
            sigma_min_conv: s.sigma_min_conv,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectraJson {
    pub eigenvalue_gap: Option<f64>,
    pub max_chordal: Option<f64>,
    pub indices_agree: bool,
    pub applicable: bool,
    pub passed: bool,
}

fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl From<&SpectralConsistency> for SpectraJson {
    fn from(s: &SpectralConsistency) -> Self {
        Self {
            eigenvalue_gap: finite_or_none(s.eigenvalue_gap),
            max_chordal: finite_or_none(s.max_chordal),
            indices_agree: s.indices_agree,
            applicable: s.applicable,
            passed: s.passed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
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
    pub guaranteed: bool,
    pub step1: Step1Json,
    pub step2_eps: Step2Json,
    pub step2_eta: Step2Json,
    pub delta_p: PolynomialJson,
    pub norm_delta_p: f64,
    pub ratio: f64,
    pub theorem_bound: f64,
    pub informal_bound: f64,
    pub checks: Vec<BoundCheckJson>,
    pub all_bounds_hold: bool,
    pub spectra: Option<SpectraJson>,
}

impl From<&BackwardErrorReport> for ReportJson {
    fn from(r: &BackwardErrorReport) -> Self {
        Self {
            epsilon: r.epsilon,
            eta: r.eta,
            m: r.m,
            n: r.n,
            grade: r.grade,
            norm_p: r.norm_p,
            norm_m: r.norm_m,
            norm_l: r.norm_l,
            norm_dl: r.norm_dl,
            radius: r.radius,
            guaranteed: r.guaranteed,
            step1: (&r.step1).into(),
            step2_eps: (&r.step2_eps).into(),
            step2_eta: (&r.step2_eta).into(),
            delta_p: PolynomialJson::from_poly(&r.delta_p),
            norm_delta_p: r.norm_delta_p,
            ratio: r.ratio,
            theorem_bound: r.theorem_bound,
            informal_bound: r.informal_bound,
            checks: r
                .checks
                .iter()
                .map(|c| BoundCheckJson { name: c.name.to_string(), value: c.value, bound: c.bound, holds: c.holds() })
                .collect(),
            all_bounds_hold: r.all_bounds_hold(),
            spectra: r.spectra.as_ref().map(SpectraJson::from),
        }
    }
}

/// Serializes CSV rows with a header line.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
