//! Command-line surface. Every subcommand returns an [`Outcome`] so it can be
//! driven in-process from tests as well as from `main`.

use std::path::{Path, PathBuf};

use bklab_core::backward_error::{run_pipeline, PipelineOptions};
use bklab_core::block_kronecker::{
    anti_triangularize, from_polynomial, recover_polynomial, validate_placement, BlockKroneckerPencil, Placement,
};
use bklab_core::eigenstructure::{right_minimal_indices_by_convolution, shift_recovery, staircase_eigenstructure};
use bklab_core::spectral::sweep;
use bklab_core::{Error, MatrixPolynomial, Pencil, RankPolicy};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::experiment::{random_custom_placement, random_perturbation, run_batch, ExperimentConfig, PlacementTag, SizeRange};
use crate::formats::{
    read_input, read_polynomial, to_csv, BlockKroneckerJson, EigenstructureJson, FormatError, InputFile, PolynomialJson, ReportJson,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_BOUND: i32 = 4;

/// Tolerance for `check` on placement residuals, relative to `1 + ‖M‖_F`.
const CHECK_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "bklab", version, about = "Block Kronecker linearizations: construction, eigenstructure and backward error")]
pub struct Cli {
    /// Unit roundoff used by every rank decision.
    #[arg(long, global = true, env = "BKLAB_EPS", default_value_t = f64::EPSILON)]
    pub unit_roundoff: f64,
    /// Absolute rank tolerance; overrides the relative default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a block Kronecker pencil from a polynomial.
    Linearize(LinearizeArgs),
    /// Eigenvalues and minimal indices of a polynomial or pencil.
    Eig(EigArgs),
    /// Draw a random pencil perturbation for a block Kronecker pencil.
    Perturb(PerturbArgs),
    /// Map a pencil perturbation to a polynomial one and check the bounds.
    BackwardError(BackwardErrorArgs),
    /// Closed-form singular values against numerical ones.
    Constants(ConstantsArgs),
    /// Validate a block Kronecker pencil file.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct LinearizeArgs {
    /// Polynomial JSON file.
    pub input: PathBuf,
    #[arg(long)]
    pub epsilon: usize,
    #[arg(long)]
    pub eta: usize,
    #[arg(long, value_enum, default_value_t = PlacementTag::Hook)]
    pub placement: PlacementTag,
    /// Block Kronecker file whose M0/M1 are the custom placement.
    #[arg(long)]
    pub custom: Option<PathBuf>,
    /// Seed for a random custom placement when no file is given.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EigArgs {
    /// Polynomial or block Kronecker JSON file.
    pub input: PathBuf,
    /// Split used to linearize a polynomial input.
    #[arg(long)]
    pub epsilon: Option<usize>,
    #[arg(long)]
    pub eta: Option<usize>,
    /// Also compute minimal indices from convolution ranks.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    /// Block Kronecker JSON file.
    pub pencil: PathBuf,
    /// Frobenius norm of the perturbation.
    #[arg(long)]
    pub mag: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct BackwardErrorArgs {
    /// Block Kronecker pencil; selects single mode together with `--delta`.
    #[arg(long, requires = "delta")]
    pub pencil: Option<PathBuf>,
    /// Pencil perturbation as a grade-1 polynomial.
    #[arg(long, requires = "pencil")]
    pub delta: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value = "2")]
    pub m: SizeRange,
    #[arg(long, default_value = "2")]
    pub n: SizeRange,
    #[arg(long, default_value = "3")]
    pub d: SizeRange,
    #[arg(long)]
    pub epsilon: Option<usize>,
    #[arg(long)]
    pub eta: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    pub mag: f64,
    #[arg(long, value_enum, default_value_t = PlacementTag::Hook)]
    pub placement: PlacementTag,
    /// Run outside the guaranteed radius and report bounds without judging them.
    #[arg(long)]
    pub force: bool,
    /// Skip the eigenstructure comparison.
    #[arg(long)]
    pub no_spectra: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    /// Largest ε and η in the sweep.
    #[arg(long, default_value_t = 6)]
    pub max: usize,
    /// Largest allowed gap between predicted and computed values.
    #[arg(long, default_value_t = 1e-10)]
    pub gap: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Block Kronecker JSON file.
    pub pencil: PathBuf,
    /// Polynomial the pencil is supposed to linearize.
    #[arg(long)]
    pub poly: Option<PathBuf>,
}

/// Captured result of one command.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn fail(code: i32, msg: impl std::fmt::Display) -> Self {
        Self { stdout: String::new(), stderr: format!("error: {msg}\n"), code }
    }

    fn note(&mut self, msg: impl AsRef<str>) {
        self.stderr.push_str(msg.as_ref());
        self.stderr.push('\n');
    }
}

/// Exit code for a library error.
pub fn core_code(e: &Error) -> i32 {
    match e {
        Error::DimensionMismatch { .. } | Error::InvalidGrade { .. } | Error::Shape(_) => EXIT_USAGE,
        Error::Placement(_)
        | Error::Layout(_)
        | Error::NotInNullSpace { .. }
        | Error::NotBlockKronecker { .. }
        | Error::Precondition { .. } => EXIT_VALIDATION,
        _ => EXIT_RUNTIME,
    }
}

fn format_code(e: &FormatError) -> i32 {
    match e {
        FormatError::Io(..) => EXIT_RUNTIME,
        FormatError::Json(_) | FormatError::Shape(_) => EXIT_USAGE,
        FormatError::Core(c) => core_code(c),
    }
}

impl From<FormatError> for Outcome {
    fn from(e: FormatError) -> Self {
        Outcome::fail(format_code(&e), e)
    }
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Self {
        Outcome::fail(core_code(&e), e)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            }
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let policy = RankPolicy::with_eps(cli.unit_roundoff).with_tol(cli.tol);
    let res = match &cli.command {
        Command::Linearize(a) => linearize(a),
        Command::Eig(a) => eig(a, &policy),
        Command::Perturb(a) => perturb(a),
        Command::BackwardError(a) => backward_error(a, cli),
        Command::Constants(a) => constants(a),
        Command::Check(a) => check(a),
    };
    res.unwrap_or_else(|o| o)
}

type CmdResult = Result<Outcome, Outcome>;

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

/// Writes `text` to `out` if given, otherwise returns it for stdout.
fn emit(text: String, out: Option<&Path>) -> Result<String, Outcome> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Outcome::fail(EXIT_RUNTIME, format!("{}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn read_pencil(path: &Path) -> Result<BlockKroneckerPencil, Outcome> {
    match read_input(path)? {
        InputFile::BlockKronecker(l) => Ok(l),
        InputFile::Polynomial(_) => Err(Outcome::fail(EXIT_USAGE, format!("{}: expected a block Kronecker pencil", path.display()))),
    }
}

fn linearize(a: &LinearizeArgs) -> CmdResult {
    let p = read_polynomial(&a.input)?;
    if a.epsilon + a.eta + 1 != p.grade() {
        return Err(Outcome::fail(
            EXIT_USAGE,
            format!("epsilon + eta + 1 = {} but the polynomial has grade {}", a.epsilon + a.eta + 1, p.grade()),
        ));
    }
    let placement = match (a.placement, &a.custom) {
        (PlacementTag::Custom, Some(path)) => {
            let l = read_pencil(path)?;
            Placement::Custom { m0: l.m0().clone(), m1: l.m1().clone() }
        }
        (PlacementTag::Custom, None) => random_custom_placement(&mut ChaCha8Rng::seed_from_u64(a.seed), &p, a.epsilon, a.eta)?,
        (PlacementTag::Frobenius1, _) => Placement::Frobenius1,
        (PlacementTag::Frobenius2, _) => Placement::Frobenius2,
        (PlacementTag::Hook, _) => Placement::Hook,
    };
    let l = from_polynomial(&p, a.epsilon, a.eta, &placement)?;
    let res = validate_placement(&l, &p)?;
    let mut o = Outcome::default();
    let (r, c) = l.shape();
    o.note(format!("{} pencil {r}x{c}, epsilon {} eta {}", placement.tag(), a.epsilon, a.eta));
    o.note(format!("placement residual max {:.3e} over {} coefficients", res.iter().copied().fold(0.0, f64::max), res.len()));
    o.stdout = emit(json(&BlockKroneckerJson::from_pencil(&l)), a.out.as_deref())?;
    Ok(o)
}

#[derive(Serialize)]
struct OracleJson {
    right: Vec<usize>,
    left: Vec<usize>,
    agrees: bool,
}

#[derive(Serialize)]
struct EigJson {
    source: &'static str,
    epsilon: usize,
    eta: usize,
    pencil: EigenstructureJson,
    polynomial: EigenstructureJson,
    oracle: Option<OracleJson>,
}

fn default_split(d: usize, epsilon: Option<usize>, eta: Option<usize>) -> Result<(usize, usize), Outcome> {
    let bad = |e: usize, h: usize| Outcome::fail(EXIT_USAGE, format!("epsilon + eta + 1 = {} but the polynomial has grade {d}", e + h + 1));
    if d == 0 {
        return Err(Outcome::fail(EXIT_USAGE, "a grade-0 polynomial has no block Kronecker linearization"));
    }
    match (epsilon, eta) {
        (Some(e), Some(h)) if e + h + 1 == d => Ok((e, h)),
        (Some(e), Some(h)) => Err(bad(e, h)),
        (Some(e), None) if e < d => Ok((e, d - 1 - e)),
        (None, Some(h)) if h < d => Ok((d - 1 - h, h)),
        (Some(e), None) => Err(bad(e, 0)),
        (None, Some(h)) => Err(bad(0, h)),
        (None, None) => Ok(((d - 1) / 2, d - 1 - (d - 1) / 2)),
    }
}

fn eig(a: &EigArgs, policy: &RankPolicy) -> CmdResult {
    let (source, l) = match read_input(&a.input)? {
        InputFile::BlockKronecker(l) => ("block_kronecker", l),
        InputFile::Polynomial(p) => {
            let (e, h) = default_split(p.grade(), a.epsilon, a.eta)?;
            ("polynomial", from_polynomial(&p, e, h, &Placement::Hook)?)
        }
    };
    let pencil_es = staircase_eigenstructure(&l.assemble(), policy)?;
    let poly_es = shift_recovery(&pencil_es, l.epsilon(), l.eta())?;
    let mut o = Outcome::default();
    if pencil_es.has_borderline_decision() {
        o.note("warning: at least one rank decision lies within a decade of the threshold");
    }
    let oracle = if a.oracle {
        let p = recover_polynomial(&l);
        let j_max = p.grade() * p.rows().min(p.cols()) + 1;
        let right = right_minimal_indices_by_convolution(&p, j_max, policy)?.indices;
        let left = right_minimal_indices_by_convolution(&p.transpose(), j_max, policy)?.indices;
        let agrees = right == poly_es.right && left == poly_es.left;
        if !agrees {
            o.note("warning: convolution oracle disagrees with the staircase indices");
        }
        Some(OracleJson { right, left, agrees })
    } else {
        None
    };
    let report = EigJson { source, epsilon: l.epsilon(), eta: l.eta(), pencil: (&pencil_es).into(), polynomial: (&poly_es).into(), oracle };
    o.stdout = emit(json(&report), a.out.as_deref())?;
    Ok(o)
}

fn perturb(a: &PerturbArgs) -> CmdResult {
    if !(a.mag >= 0.0 && a.mag.is_finite()) {
        return Err(Outcome::fail(EXIT_USAGE, format!("--mag must be finite and nonnegative, got {}", a.mag)));
    }
    let l = read_pencil(&a.pencil)?;
    let (r, c) = l.shape();
    let dl = random_perturbation(&mut ChaCha8Rng::seed_from_u64(a.seed), r, c, a.mag);
    let mut o = Outcome::default();
    o.note(format!("perturbation {r}x{c}, norm {:.6e}", dl.frobenius_norm()));
    o.stdout = emit(json(&PolynomialJson::from_poly(&dl.to_polynomial())), a.out.as_deref())?;
    Ok(o)
}

fn read_delta(path: &Path, shape: (usize, usize)) -> Result<Pencil, Outcome> {
    let q: MatrixPolynomial = read_polynomial(path)?;
    if q.grade() > 1 {
        return Err(Outcome::fail(
            EXIT_USAGE,
            format!("{}: a pencil perturbation has grade at most 1, found {}", path.display(), q.grade()),
        ));
    }
    if q.shape() != shape {
        return Err(Outcome::fail(
            EXIT_USAGE,
            format!("{}: perturbation is {}x{}, pencil is {}x{}", path.display(), q.rows(), q.cols(), shape.0, shape.1),
        ));
    }
    let q = q.with_grade(1).map_err(Outcome::from)?;
    Ok(Pencil::new(q.coeff(0).clone(), q.coeff(1).clone())?)
}

fn backward_error(a: &BackwardErrorArgs, cli: &Cli) -> CmdResult {
    if let (Some(pp), Some(dp)) = (&a.pencil, &a.delta) {
        let l = read_pencil(pp)?;
        let dl = read_delta(dp, l.shape())?;
        let opts = PipelineOptions {
            force: a.force,
            policy: RankPolicy::with_eps(cli.unit_roundoff).with_tol(cli.tol),
            max_iter: 200,
            check_spectra: !a.no_spectra,
        };
        let r = run_pipeline(&l, &dl, &opts)?;
        let mut o = Outcome::default();
        o.note(format!("||dP||/||P|| = {:.6e}, bound {:.6e}", r.ratio, r.theorem_bound));
        if !r.guaranteed {
            o.note("warning: outside the guaranteed radius; bounds are informational");
        }
        let spectra_ok = r.spectra.as_ref().is_none_or(|s| s.indices_agree && (!s.applicable || s.passed));
        if r.guaranteed && !(r.all_bounds_hold() && spectra_ok) {
            for c in r.failed_checks() {
                o.note(format!("violated: {} ({:.6e} > {:.6e})", c.name, c.value, c.bound));
            }
            if !spectra_ok {
                o.note("violated: eigenstructure of P + dP does not match L + dL");
            }
            o.code = EXIT_BOUND;
        }
        o.stdout = emit(json(&ReportJson::from(&r)), a.out.as_deref())?;
        return Ok(o);
    }
    let cfg = ExperimentConfig {
        seed: a.seed,
        trials: a.trials,
        m: a.m,
        n: a.n,
        d: a.d,
        epsilon: a.epsilon,
        eta: a.eta,
        mag: a.mag,
        placement: a.placement,
        tol: cli.tol,
        unit_roundoff: cli.unit_roundoff,
        force: a.force,
        check_spectra: !a.no_spectra,
    };
    cfg.validate().map_err(|e| Outcome::fail(EXIT_USAGE, e))?;
    let report = run_batch(&cfg);
    let s = &report.summary;
    let mut o = Outcome::default();
    o.note(format!(
        "{} trials: {} passed, {} failed, {} skipped, {} unguaranteed, {} errors",
        s.trials, s.passed, s.failed, s.skipped, s.unguaranteed, s.errors
    ));
    if let Some(q) = s.max_quotient {
        o.note(format!("max ratio / bound = {q:.6e}"));
    }
    if !s.ok() {
        o.code = EXIT_BOUND;
    }
    let text = match a.format {
        OutputFormat::Json => json(&report),
        OutputFormat::Csv => to_csv(&report.rows).map_err(|e| Outcome::fail(EXIT_RUNTIME, e))?,
    };
    o.stdout = emit(text, a.out.as_deref())?;
    Ok(o)
}

#[derive(Serialize)]
struct ConstantRow {
    label: String,
    predicted: Vec<f64>,
    numeric: Vec<f64>,
    gap: f64,
    passes: bool,
}

fn constants(a: &ConstantsArgs) -> CmdResult {
    if a.max == 0 {
        return Err(Outcome::fail(EXIT_USAGE, "--max must be at least 1"));
    }
    let rows: Vec<ConstantRow> = sweep(a.max)?
        .into_iter()
        .map(|p| {
            let passes = p.passes(a.gap);
            ConstantRow { label: p.label, predicted: p.predicted, numeric: p.numeric, gap: p.gap, passes }
        })
        .collect();
    let failed: Vec<&str> = rows.iter().filter(|r| !r.passes).map(|r| r.label.as_str()).collect();
    let mut o = Outcome::default();
    o.note(format!("{} predictions, {} outside {:.1e}", rows.len(), failed.len(), a.gap));
    for f in &failed {
        o.note(format!("gap: {f}"));
    }
    if !failed.is_empty() {
        o.code = EXIT_BOUND;
    }
    o.stdout = emit(json(&rows), a.out.as_deref())?;
    Ok(o)
}

#[derive(Serialize)]
struct CheckJson {
    epsilon: usize,
    eta: usize,
    m: usize,
    n: usize,
    grade: usize,
    recovered: PolynomialJson,
    placement_residuals: Option<Vec<f64>>,
    placement_ok: Option<bool>,
    anti_triangular: bool,
    layout_error: Option<String>,
}

fn check(a: &CheckArgs) -> CmdResult {
    let l = read_pencil(&a.pencil)?;
    let (layout_ok, layout_error) = match anti_triangularize(&l) {
        Ok(_) => (true, None),
        Err(e @ Error::Layout(_)) => (false, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let (residuals, placement_ok) = match &a.poly {
        Some(path) => {
            let p = read_polynomial(path)?;
            let res = validate_placement(&l, &p)?;
            let tol = CHECK_TOL * (1.0 + p.frobenius_norm());
            let ok = res.iter().all(|&r| r <= tol);
            (Some(res), Some(ok))
        }
        None => (None, None),
    };
    let mut o = Outcome::default();
    if let Some(e) = &layout_error {
        o.note(format!("violated: {e}"));
    }
    if placement_ok == Some(false) {
        o.note("violated: antidiagonal sums do not reproduce the polynomial");
    }
    if !layout_ok || placement_ok == Some(false) {
        o.code = EXIT_VALIDATION;
    }
    let report = CheckJson {
        epsilon: l.epsilon(),
        eta: l.eta(),
        m: l.m(),
        n: l.n(),
        grade: l.grade(),
        recovered: PolynomialJson::from_poly(&recover_polynomial(&l)),
        placement_residuals: residuals,
        placement_ok,
        anti_triangular: layout_ok,
        layout_error,
    };
    o.stdout = json(&report);
    Ok(o)
}
