use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Float;

use super::{singular_values, Matrix};

/// Numerical rank policy shared by every rank decision in the crate.
///
/// The default threshold is `max(rows, cols) · eps · scale`, where `scale`
/// is `σ_max` of the matrix unless the caller supplies another reference
/// norm. `tol` replaces the threshold outright.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankPolicy {
    pub eps: f64,
    pub tol: Option<f64>,
}

impl Default for RankPolicy {
    fn default() -> Self {
        Self { eps: f64::EPSILON, tol: None }
    }
}

impl RankPolicy {
    pub fn with_eps(eps: f64) -> Self {
        Self { eps, tol: None }
    }

    pub fn with_tol(self, tol: Option<f64>) -> Self {
        Self { tol, ..self }
    }

    pub fn threshold(&self, rows: usize, cols: usize, scale: f64) -> f64 {
        self.tol.unwrap_or_else(|| rows.max(cols) as f64 * self.eps * scale)
    }

    /// Rank decision on precomputed singular values (descending or not).
    pub fn decide(&self, context: &str, rows: usize, cols: usize, sv: Vec<f64>, scale: f64) -> RankDecision {
        let tolerance = self.threshold(rows, cols, scale);
        let rank = sv.iter().filter(|&&s| s > tolerance).count();
        RankDecision { context: String::from(context), rows, cols, singular_values: sv, rank, tolerance }
    }

    /// Rank of `a` with the threshold scaled by its own `σ_max`.
    pub fn rank_of(&self, context: &str, a: &Matrix) -> RankDecision {
        let sv = singular_values(a);
        let smax = sv.first().copied().unwrap_or(0.0);
        self.decide(context, a.rows(), a.cols(), sv, smax)
    }
}

/// A logged rank decision.
#[derive(Clone, Debug, PartialEq)]
pub struct RankDecision {
    pub context: String,
    pub rows: usize,
    pub cols: usize,
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub tolerance: f64,
}

impl RankDecision {
    pub fn nullity(&self) -> usize {
        self.cols - self.rank
    }

    /// True when some singular value lies within a factor of 10 below or
    /// 100 above the threshold, so a modest change of tolerance could flip
    /// the decision.
    pub fn is_borderline(&self) -> bool {
        let t = self.tolerance;
        t > 0.0 && self.singular_values.iter().any(|&s| s > 0.1 * t && s < 100.0 * t)
    }

    /// `log10` distance from the threshold to the nearest singular value.
    pub fn margin_decades(&self) -> f64 {
        let t = self.tolerance;
        self.singular_values.iter().filter(|&&s| s > 0.0 && t > 0.0).map(|&s| (s / t).log10().abs()).fold(f64::INFINITY, f64::min)
    }
}
