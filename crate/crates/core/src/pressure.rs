//! Partition sums, pressure, the roots `s_k`, and the dimension quantities
//! built from them.

use std::fmt;

use crate::error::{IakError, Result};
use crate::ifs::{IFSystem, Level, MapFamily, WordBudget};
use crate::linalg::compensated_sum;

/// Default root tolerance in `t`.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Longest word length the doubling scheme will attempt.
const MAX_DOUBLING_LEVEL: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureEvaluation {
    pub k: usize,
    pub t: f64,
    pub partition_sum: f64,
    /// `P_k(t) = (1/k) log partition_sum`.
    pub pressure: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimensionMethod {
    SimilarityExact,
    Affinity,
    /// Abstract maps: product bounds stand in for the true constants, so
    /// every `s_k` is an upper-bound surrogate.
    LipschitzEnumeration,
}

impl DimensionMethod {
    fn for_family(family: MapFamily) -> Self {
        match family {
            MapFamily::Similarity => DimensionMethod::SimilarityExact,
            MapFamily::Affine => DimensionMethod::Affinity,
            MapFamily::AbstractLipschitz => DimensionMethod::LipschitzEnumeration,
        }
    }
}

impl fmt::Display for DimensionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DimensionMethod::SimilarityExact => "similarity-exact",
            DimensionMethod::Affinity => "affinity",
            DimensionMethod::LipschitzEnumeration => "lipschitz-enumeration (bound)",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkEntry {
    pub k: usize,
    pub s_k: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionReport {
    pub s_k_sequence: Vec<SkEntry>,
    /// Last value of the doubling chain; an upper bound for the upper
    /// Lipschitz dimension.
    pub best_upper_bound: f64,
    pub method: DimensionMethod,
    pub converged: bool,
    /// Set by [`affinity_dimension_le1`] when the bound exceeds 1.
    pub out_of_regime: bool,
}

fn level_sum(lip_plus: impl Iterator<Item = f64>, t: f64) -> f64 {
    compensated_sum(lip_plus.map(|l| l.powf(t)))
}

/// `Σ_{𝐢 ∈ 𝓘^k} Lip⁺(S_𝐢)^t`.
pub fn partition_sum(ifs: &IFSystem, k: usize, t: f64) -> Result<f64> {
    check_t(t)?;
    let level = Level::build(ifs, k, ifs.budget())?;
    Ok(level_sum(level.lip_plus(), t))
}

pub fn pressure(ifs: &IFSystem, k: usize, t: f64) -> Result<PressureEvaluation> {
    let sum = partition_sum(ifs, k, t)?;
    Ok(PressureEvaluation { k, t, partition_sum: sum, pressure: sum.ln() / k as f64 })
}

fn check_t(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(IakError::InvalidInput(format!("t must be a finite value >= 0: got {t}")))
    }
}

/// Unique `t >= 0` with `Σ lips^t = 1` by bisection. The sum is continuous
/// and strictly decreasing because every value lies in (0,1).
///
/// Stops once the bracket is narrower than `tol` and the residual is within
/// `tol`, or when the bracket can no longer shrink.
pub fn solve_unit_sum(lips: &[f64], tol: f64) -> f64 {
    let f = |t: f64| level_sum(lips.iter().cloned(), t) - 1.0;
    if f(0.0) <= 0.0 {
        return 0.0;
    }
    let mut hi = 2.0_f64;
    while f(hi) >= 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0_f64;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let v = f(mid);
        if v == 0.0 || (hi - lo <= tol && v.abs() <= tol) {
            return mid;
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Root `s_k` of `Σ_{𝐢 ∈ 𝓘^k} Lip⁺(S_𝐢)^t = 1`.
pub fn solve_s_k(ifs: &IFSystem, k: usize, tol: f64) -> Result<f64> {
    let level = Level::build(ifs, k, ifs.budget())?;
    Ok(solve_unit_sum(&level.lip_plus().collect::<Vec<_>>(), tol))
}

/// `s_k` along `k = 1, 2, 4, 8, …` while `N^k` fits the budget. Each level is
/// the square of the previous one, so matrices are never recomposed.
pub fn upper_lipschitz_dimension(ifs: &IFSystem, budget: WordBudget, tol: f64) -> DimensionReport {
    let mut level = Level::first(ifs);
    let mut seq = Vec::new();
    loop {
        let lips: Vec<f64> = level.lip_plus().collect();
        seq.push(SkEntry { k: level.k, s_k: solve_unit_sum(&lips, tol), tol });
        let next_k = level.k * 2;
        if ifs.len() == 1 || next_k > MAX_DOUBLING_LEVEL || budget.check_level(ifs.len(), next_k).is_err() {
            break;
        }
        level = level.concat(&level);
    }
    let best = seq.last().unwrap().s_k;
    // a single map (or a single affordable level) is its own fixed point
    let converged = match seq.len() {
        1 => ifs.len() == 1,
        n => (seq[n - 1].s_k - seq[n - 2].s_k).abs() <= tol,
    };
    DimensionReport {
        s_k_sequence: seq,
        best_upper_bound: best,
        method: DimensionMethod::for_family(ifs.family()),
        converged,
        out_of_regime: false,
    }
}

/// Root of Hutchinson's formula `Σ r_i^s = 1` to 1e-12.
pub fn similarity_dimension(ifs: &IFSystem) -> Result<f64> {
    let ratios = ifs
        .similarity_ratios()
        .ok_or_else(|| IakError::WrongVariant("similarity dimension needs similarity maps".into()))?;
    Ok(solve_unit_sum(&ratios, 1e-12))
}

/// Affinity dimension through the upper Lipschitz chain. Only meaningful
/// when the result is at most 1; larger values set `out_of_regime`.
pub fn affinity_dimension_le1(ifs: &IFSystem, budget: WordBudget, tol: f64) -> Result<DimensionReport> {
    if ifs.family() != MapFamily::Affine {
        return Err(IakError::WrongVariant("affinity dimension needs affine maps".into()));
    }
    let mut report = upper_lipschitz_dimension(ifs, budget, tol);
    report.out_of_regime = report.best_upper_bound > 1.0;
    Ok(report)
}

/// `max_{𝐢 ∈ 𝓘^k} Lip⁺(S_𝐢)/Lip⁻(S_𝐢)`.
pub fn distortion_ratio(ifs: &IFSystem, k: usize) -> Result<f64> {
    let level = Level::build(ifs, k, ifs.budget())?;
    Ok(level.lips().iter().map(|(p, m)| p / m).fold(1.0, f64::max))
}

/// Whether the measured distortion stays below the asserted constant `L`.
/// `None` when nothing was asserted.
pub fn audit_distortion(ifs: &IFSystem, k: usize) -> Result<Option<bool>> {
    match ifs.flags().bounded_distortion {
        None => Ok(None),
        Some(l) => Ok(Some(distortion_ratio(ifs, k)? < l)),
    }
}
