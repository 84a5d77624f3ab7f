use alloc::string::String;
use core::fmt;

/// Errors reported by the library.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    DimensionMismatch { op: &'static str, left: (usize, usize), right: (usize, usize) },
    InvalidGrade { grade: usize, degree: usize },
    Shape(String),
    DegenerateRow { row: usize },
    Precondition { what: &'static str, value: f64, bound: f64 },
    Placement(String),
    Layout(String),
    NotInNullSpace { residual: f64, tol: f64 },
    Inconclusive { j_max: usize, found: usize, expected: usize },
    SingularPencil,
    NotBlockKronecker { side: &'static str, index: usize, shift: usize },
    NoConvergence { what: &'static str, iterations: usize },
    RankDeficient { what: &'static str, rank: usize, expected: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { op, left, right } => {
                write!(f, "{op}: dimension mismatch {}x{} vs {}x{}", left.0, left.1, right.0, right.1)
            }
            Error::InvalidGrade { grade, degree } => {
                write!(f, "grade {grade} is smaller than degree {degree}")
            }
            Error::Shape(msg) => write!(f, "shape error: {msg}"),
            Error::DegenerateRow { row } => write!(f, "row {row} is identically zero"),
            Error::Precondition { what, value, bound } => {
                write!(f, "precondition violated: {what} ({value:.6e} vs bound {bound:.6e})")
            }
            Error::Placement(msg) => write!(f, "placement error: {msg}"),
            Error::Layout(msg) => write!(f, "layout check failed: {msg}"),
            Error::NotInNullSpace { residual, tol } => {
                write!(f, "vector is not in the right null space (residual {residual:.3e} > {tol:.3e})")
            }
            Error::Inconclusive { j_max, found, expected } => {
                write!(f, "convolution scan reached j = {j_max} with {found} of {expected} indices")
            }
            Error::SingularPencil => write!(f, "pencil is singular; use the staircase reduction"),
            Error::NotBlockKronecker { side, index, shift } => {
                write!(f, "{side} minimal index {index} is below the shift {shift}")
            }
            Error::NoConvergence { what, iterations } => {
                write!(f, "{what} did not converge after {iterations} iterations")
            }
            Error::RankDeficient { what, rank, expected } => {
                write!(f, "{what} has rank {rank}, expected {expected}")
            }
        }
    }
}

impl core::error::Error for Error {}
