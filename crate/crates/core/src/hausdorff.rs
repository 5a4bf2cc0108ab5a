//! Hausdorff measure of `F_C` at the critical value: regime classification,
//! the Lip⁻/Lip⁺ series bounds, the self-similar closed form, and an
//! area-ratio oracle for full-dimensional condensation sets.

use std::fmt;

use crate::error::{IakError, Result};
use crate::geometry::AxisBox;
use crate::ifs::{CondensationSet, CondensationShape, HausdorffValue, IFSystem, Level, MapFamily, WordBudget};
use crate::stopping::walk_stopping_tree;

/// Level sums at or above this count as non-decreasing terms.
pub const DIVERGENCE_LEVEL_THRESHOLD: f64 = 1.0 - 1e-12;
/// Consecutive non-decreasing levels needed to flag divergence.
pub const DIVERGENCE_RUN: usize = 10;
/// Fewest C cells for a trustworthy raster ratio.
pub const MIN_RASTER_CELLS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureRegime {
    PositiveFinite,
    Infinite,
    BoundsOnly,
    DelegatedToC,
}

impl fmt::Display for MeasureRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasureRegime::PositiveFinite => "positive-finite",
            MeasureRegime::Infinite => "infinite",
            MeasureRegime::BoundsOnly => "bounds-only",
            MeasureRegime::DelegatedToC => "delegated-to-c",
        })
    }
}

/// Contribution of `H^d(F_∅)` to the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomogeneousTerm {
    /// `d` exceeds an upper bound for `dim F_∅`, so the term vanishes.
    Zero,
    /// Unknown non-negative additive term; only the lower bound is safe.
    Unresolved,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesLevel {
    pub k: usize,
    pub lower_level: f64,
    pub upper_level: f64,
    pub lower_partial: f64,
    pub upper_partial: f64,
}

/// Partial sums of `Σ_k Σ_{𝓘^k} Lip∓(S_𝐢)^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesBounds {
    pub d: f64,
    pub levels: Vec<SeriesLevel>,
    pub lower_diverges: bool,
    pub upper_diverges: bool,
    /// Bound on the Lip⁺ levels past the last one computed, from
    /// `U_{qm+r} <= U_m^q·U_r`; infinite when no computed level is below 1.
    pub upper_tail: f64,
    /// Level at which divergence was declared.
    pub divergence_level: Option<usize>,
    /// Similarity systems decide divergence exactly from `Σ r_i^d`; other
    /// systems use the run-length heuristic.
    pub exact_test: bool,
}

impl SeriesBounds {
    pub fn lower_sum(&self) -> f64 {
        self.levels.last().map_or(0.0, |l| l.lower_partial)
    }

    pub fn upper_sum(&self) -> f64 {
        self.levels.last().map_or(0.0, |l| l.upper_partial)
    }

    /// Partial sum plus tail bound: an upper bound for the full Lip⁺ series.
    pub fn upper_total(&self) -> f64 {
        self.upper_sum() + self.upper_tail
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport {
    pub d: f64,
    pub regime: MeasureRegime,
    /// Bounds on `H^d(O) = H^d(C)·(1 + Σ_k Σ_{𝓘^k} Lip∓(S_𝐢)^d)`; `H^d(F_C)`
    /// adds `homogeneous_term`.
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub closed_form: Option<f64>,
    pub homogeneous_term: HomogeneousTerm,
    pub series: Option<SeriesBounds>,
    /// Separation flags were asserted, not verified.
    pub cosc_asserted: bool,
}

fn level_sums_exact(lower_first: f64, upper_first: f64, k: usize) -> (f64, f64) {
    (lower_first.powi(k as i32), upper_first.powi(k as i32))
}

/// Partial sums up to `max_k`. Similarity and abstract systems factorise per
/// level; affine systems enumerate each level within the budget.
pub fn series_bounds(ifs: &IFSystem, d: f64, max_k: usize) -> Result<SeriesBounds> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(IakError::InvalidInput(format!("d must be finite and >= 0: got {d}")));
    }
    if max_k == 0 {
        return Err(IakError::InvalidInput("need at least one level".into()));
    }
    let first_lower: f64 = ifs.maps().iter().map(|m| m.lip_minus().powf(d)).sum();
    let first_upper: f64 = ifs.maps().iter().map(|m| m.lip_plus().powf(d)).sum();
    let factorises = ifs.family() != MapFamily::Affine;
    if !factorises {
        ifs.budget().check_level(ifs.len(), max_k)?;
    }

    let mut levels = Vec::with_capacity(max_k);
    let (mut lp, mut up) = (0.0, 0.0);
    let mut current: Option<Level> = None;
    for k in 1..=max_k {
        let (ll, ul) = if factorises {
            level_sums_exact(first_lower, first_upper, k)
        } else {
            let next = match current.take() {
                None => Level::first(ifs),
                Some(prev) => prev.concat(&Level::first(ifs)),
            };
            let sums = next.lips().iter().fold((0.0, 0.0), |(a, b), (p, m)| (a + m.powf(d), b + p.powf(d)));
            current = Some(next);
            sums
        };
        lp += ll;
        up += ul;
        levels.push(SeriesLevel { k, lower_level: ll, upper_level: ul, lower_partial: lp, upper_partial: up });
    }

    let exact_test = ifs.family() == MapFamily::Similarity;
    let (lower_diverges, upper_diverges, divergence_level) = if exact_test {
        let div = first_upper >= DIVERGENCE_LEVEL_THRESHOLD;
        (div, div, div.then_some(1))
    } else {
        let detect = |pick: fn(&SeriesLevel) -> f64| -> Option<usize> {
            let mut run = 0;
            for l in &levels {
                if pick(l) >= DIVERGENCE_LEVEL_THRESHOLD {
                    run += 1;
                    if run >= DIVERGENCE_RUN {
                        return Some(l.k);
                    }
                } else {
                    run = 0;
                }
            }
            None
        };
        let lower = detect(|l| l.lower_level);
        let upper = detect(|l| l.upper_level);
        // Lip⁻ levels at or above 1 at k = 1 stay there: (Σ Lip⁻^d)^k bounds them below
        let lower_certain = first_lower >= DIVERGENCE_LEVEL_THRESHOLD;
        let lower_flag = lower.is_some() || lower_certain;
        let level = if lower_certain { Some(1) } else { lower.or(upper) };
        (lower_flag, upper.is_some() || lower_flag, level)
    };
    let upper_tail = if upper_diverges { f64::INFINITY } else { tail_bound(&levels) };
    Ok(SeriesBounds { d, levels, lower_diverges, upper_diverges, upper_tail, divergence_level, exact_test })
}

fn tail_bound(levels: &[SeriesLevel]) -> f64 {
    let big_k = levels.len();
    let u = |k: usize| if k == 0 { 1.0 } else { levels[k - 1].upper_level };
    let best = (1..=big_k)
        .filter(|&m| u(m) < 1.0)
        .min_by(|&a, &b| u(a).powf(1.0 / a as f64).total_cmp(&u(b).powf(1.0 / b as f64)));
    let Some(m) = best else { return f64::INFINITY };
    let um = u(m);
    (0..m)
        .map(|r| {
            let q_min = if big_k >= r { (big_k - r) / m + 1 } else { 0 };
            u(r) * um.powi(q_min as i32) / (1.0 - um)
        })
        .sum()
}

/// Largest level the budget allows for an affine series, at least 1.
fn affordable_levels(ifs: &IFSystem, wanted: usize) -> usize {
    if ifs.family() != MapFamily::Affine {
        return wanted;
    }
    let mut k = 1;
    while k < wanted && ifs.budget().check_level(ifs.len(), k + 1).is_ok() {
        k += 1;
    }
    k
}

/// Classifies `H^d(F_C)` for `C` with `0 < H^d(C) < ∞`.
///
/// `s_upper` is taken as the upper Lipschitz dimension. `s_lower_k1` is the
/// root of `Σ_i Lip⁻(S_i)^t = 1`: at or below it the Lip⁻ series diverges
/// level by level, which forces an infinite lower bound under COSC.
pub fn classify(
    ifs: &IFSystem,
    c_measure: HausdorffValue,
    s_upper: f64,
    s_lower_k1: f64,
    max_k: usize,
) -> Result<MeasureReport> {
    let d = c_measure.d;
    let h = c_measure.measure;
    let cosc = ifs.flags().cosc;
    if h.is_nan() || h < 0.0 || d.is_nan() || d < 0.0 {
        return Err(IakError::InvalidInput(format!("invalid C measure (d = {d}, H_d = {h})")));
    }
    if h == 0.0 || h.is_infinite() {
        return Ok(MeasureReport {
            d,
            regime: MeasureRegime::DelegatedToC,
            lower_bound: if h == 0.0 { 0.0 } else { f64::INFINITY },
            upper_bound: f64::INFINITY,
            closed_form: None,
            homogeneous_term: HomogeneousTerm::Unresolved,
            series: None,
            cosc_asserted: cosc,
        });
    }

    let homogeneous_term = if d > s_upper { HomogeneousTerm::Zero } else { HomogeneousTerm::Unresolved };
    let series = series_bounds(ifs, d, affordable_levels(ifs, max_k))?;
    let closed_form = match ifs.family() {
        MapFamily::Similarity if cosc => Some(closed_form_self_similar(ifs, c_measure)?),
        _ => None,
    };

    let (regime, lower_bound, upper_bound) = if d > s_upper {
        let (lo, hi) = if cosc && !series.upper_diverges {
            (h * (1.0 + series.lower_sum()), h * (1.0 + series.upper_total()))
        } else {
            (h, f64::INFINITY)
        };
        (MeasureRegime::PositiveFinite, lo, hi)
    } else if cosc && ifs.flags().bounded_distortion.is_some() {
        (MeasureRegime::Infinite, f64::INFINITY, f64::INFINITY)
    } else if cosc {
        let lo = if d <= s_lower_k1 || series.lower_diverges {
            f64::INFINITY
        } else {
            h * (1.0 + series.lower_sum())
        };
        (MeasureRegime::BoundsOnly, lo, f64::INFINITY)
    } else {
        (MeasureRegime::BoundsOnly, h, f64::INFINITY)
    };

    Ok(MeasureReport {
        d,
        regime,
        lower_bound,
        upper_bound,
        closed_form,
        homogeneous_term,
        series: Some(series),
        cosc_asserted: cosc,
    })
}

/// `H^d(F_C)` for similarity systems: `+∞` when `Σ r_i^d >= 1` (that is
/// `d <= s`), otherwise `H^d(C) / (1 − Σ r_i^d)`. The finite branch needs
/// COSC.
pub fn closed_form_self_similar(ifs: &IFSystem, c_measure: HausdorffValue) -> Result<f64> {
    let ratios = ifs
        .similarity_ratios()
        .ok_or_else(|| IakError::WrongVariant("closed form needs similarity maps".into()))?;
    let q: f64 = ratios.iter().map(|r| r.powf(c_measure.d)).sum();
    if q >= DIVERGENCE_LEVEL_THRESHOLD {
        return Ok(f64::INFINITY);
    }
    if !ifs.flags().cosc {
        return Err(IakError::MissingAssertion("COSC is required for the finite closed form".into()));
    }
    Ok(c_measure.measure / (1.0 - q))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalRatio {
    pub resolution: usize,
    pub c_cells: usize,
    pub orbital_cells: usize,
    /// `orbital_cells / c_cells`.
    pub ratio: f64,
    /// `1 / (1 − Σ_i |det A_i|)`, normalisation-free.
    pub closed_ratio: f64,
    pub words_rasterised: usize,
    pub low_resolution: bool,
}

impl EmpiricalRatio {
    pub fn relative_error(&self) -> f64 {
        (self.ratio - self.closed_ratio).abs() / self.closed_ratio
    }
}

/// Rasterises the orbital set on a `resolution`ⁿ grid over X and compares
/// its occupied-cell count with that of C.
///
/// A cell counts as occupied by `S_𝐢(C)` when its centre pulls back into C.
/// Words are taken while `Lip⁺(S_𝐢)` is at least the cell side; smaller
/// images cover less than a cell each.
pub fn orbital_measure_ratio_empirical(
    ifs: &IFSystem,
    c: &CondensationSet,
    x: &AxisBox,
    resolution: usize,
) -> Result<EmpiricalRatio> {
    if !c.is_full_dimensional() {
        return Err(IakError::NotFullDimensional);
    }
    if !ifs.has_point_action() {
        return Err(IakError::NoPointAction);
    }
    if !ifs.flags().cosc {
        return Err(IakError::MissingAssertion("COSC is required for the measure ratio".into()));
    }
    let n = ifs.ambient_dim();
    if c.dim() != n || x.dim() != n {
        return Err(IakError::InvalidInput("dimension mismatch between C, X and the system".into()));
    }
    let total = (resolution as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if resolution == 0 || total > (1u128 << 34) {
        return Err(IakError::InvalidInput(format!("raster of {resolution}^{n} cells is out of range")));
    }
    let total = total as usize;
    let widths = x.widths();
    let cell: Vec<f64> = widths.iter().map(|w| w / resolution as f64).collect();
    let cell_side = cell.iter().cloned().fold(0.0, f64::max);

    let mut maps = vec![ifs.identity()];
    walk_stopping_tree(ifs, cell_side.min(1.0), |node, m| {
        if node == crate::stopping::TreeNode::Internal {
            maps.push(m.clone());
        }
    })?;

    let c_box = c.bounding_box();
    let mut bits = vec![0u64; total.div_ceil(64)];
    let mut c_cells = 0usize;
    let stride: Vec<usize> = (0..n).map(|i| resolution.pow(i as u32)).collect();
    for (wi, m) in maps.iter().enumerate() {
        let action = m.action().unwrap();
        let inverse = action.inverse().ok_or_else(|| IakError::Invariant("singular composite".into()))?;
        let corners: Vec<Vec<f64>> = c_box.corners().iter().map(|p| action.apply(p)).collect();
        let img = AxisBox::bounding(&corners).unwrap();
        let lo: Vec<usize> = (0..n)
            .map(|i| (((img.min[i] - x.min[i]) / cell[i]).floor().max(0.0) as usize).min(resolution - 1))
            .collect();
        let hi: Vec<usize> = (0..n)
            .map(|i| (((img.max[i] - x.min[i]) / cell[i]).floor().max(0.0) as usize).min(resolution - 1))
            .collect();
        let mut idx = lo.clone();
        let mut centre = vec![0.0; n];
        'cells: loop {
            for i in 0..n {
                centre[i] = x.min[i] + (idx[i] as f64 + 0.5) * cell[i];
            }
            if c.contains(&inverse.apply(&centre), 0.0) {
                let flat: usize = idx.iter().zip(&stride).map(|(a, s)| a * s).sum();
                bits[flat / 64] |= 1u64 << (flat % 64);
                if wi == 0 {
                    c_cells += 1;
                }
            }
            let mut axis = 0;
            loop {
                if axis == n {
                    break 'cells;
                }
                idx[axis] += 1;
                if idx[axis] <= hi[axis] {
                    break;
                }
                idx[axis] = lo[axis];
                axis += 1;
            }
        }
    }
    let orbital_cells: usize = bits.iter().map(|b| b.count_ones() as usize).sum();
    let volume_sum: f64 = ifs
        .maps()
        .iter()
        .map(|m| m.action().unwrap().linear.determinant().abs())
        .sum();
    Ok(EmpiricalRatio {
        resolution,
        c_cells,
        orbital_cells,
        ratio: if c_cells > 0 { orbital_cells as f64 / c_cells as f64 } else { f64::NAN },
        closed_ratio: 1.0 / (1.0 - volume_sum),
        words_rasterised: maps.len(),
        low_resolution: c_cells < MIN_RASTER_CELLS,
    })
}

/// Default `d` for similarity scenes under OSC: `max(s, dim C)`.
pub fn default_critical_d(similarity_dim: f64, c: &CondensationSet) -> f64 {
    similarity_dim.max(c.hausdorff().map_or(c.box_dim(), |h| h.d))
}

pub fn lower_k1_root(ifs: &IFSystem) -> f64 {
    let lips: Vec<f64> = ifs.maps().iter().map(|m| m.lip_minus()).collect();
    crate::pressure::solve_unit_sum(&lips, 1e-12)
}

/// Convenience wrapper: classify C's declared measure against the system's
/// upper Lipschitz bound.
pub fn measure_report(ifs: &IFSystem, c: &CondensationSet, budget: WordBudget, max_k: usize) -> Result<MeasureReport> {
    let value = c
        .hausdorff()
        .ok_or_else(|| IakError::InvalidInput("condensation set declares no Hausdorff value".into()))?;
    let s = crate::pressure::upper_lipschitz_dimension(ifs, budget, crate::pressure::DEFAULT_TOL).best_upper_bound;
    classify(ifs, value, s, lower_k1_root(ifs), max_k)
}

impl CondensationSet {
    pub fn is_point_like(&self) -> bool {
        matches!(self.shape(), CondensationShape::FinitePoints(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{ContractionMap, SeparationFlags};
    use approx::assert_relative_eq;

    fn sims(ratios: &[f64], cosc: bool) -> IFSystem {
        let mut offset = 0.0;
        let maps = ratios
            .iter()
            .map(|&r| {
                let m = ContractionMap::scaling(r, vec![offset]).unwrap();
                offset += r + 0.05;
                m
            })
            .collect();
        IFSystem::new(maps, 1, SeparationFlags { cosc, ..Default::default() }).unwrap()
    }

    fn plane_cantor() -> IFSystem {
        IFSystem::new(
            vec![
                ContractionMap::scaling(1.0 / 3.0, vec![0.0, 0.0]).unwrap(),
                ContractionMap::scaling(1.0 / 3.0, vec![2.0 / 3.0, 0.0]).unwrap(),
            ],
            2,
            SeparationFlags { cosc: true, sosc: true, ..Default::default() },
        )
        .unwrap()
    }

    fn hv(d: f64, measure: f64) -> HausdorffValue {
        HausdorffValue { d, measure }
    }

    #[test]
    fn classify_examples() {
        let s = 2f64.ln() / 3f64.ln();
        let r = classify(&sims(&[1.0 / 3.0, 1.0 / 3.0], true), hv(2.0, 0.25), s, s, 40).unwrap();
        assert_eq!(r.regime, MeasureRegime::PositiveFinite);
        assert_eq!(r.homogeneous_term, HomogeneousTerm::Zero);
        let cf = r.closed_form.unwrap();
        assert!(r.lower_bound <= cf * (1.0 + 1e-12) && cf <= r.upper_bound * (1.0 + 1e-12), "{r:?}");

        let crit = 2f64.ln() / 2.5f64.ln();
        let flags = SeparationFlags { cosc: true, sosc: true, bounded_distortion: Some(1.5) };
        let ifs = sims(&[0.4, 0.4], true).with_flags(flags);
        let r = classify(&ifs, hv(crit, 1.0), crit, crit, 100).unwrap();
        assert_eq!(r.regime, MeasureRegime::Infinite);
        assert_eq!(r.closed_form, Some(f64::INFINITY));

        let r = classify(&ifs, hv(crit, 0.0), crit, crit, 10).unwrap();
        assert_eq!(r.regime, MeasureRegime::DelegatedToC);
        assert!(classify(&ifs, hv(crit, -1.0), crit, crit, 10).is_err());
    }

    #[test]
    fn classify_without_distortion_gives_bounds() {
        let crit = 2f64.ln() / 2.5f64.ln();
        let r = classify(&sims(&[0.4, 0.4], true), hv(crit, 1.0), crit, crit, 20).unwrap();
        assert_eq!(r.regime, MeasureRegime::BoundsOnly);
        assert_eq!(r.lower_bound, f64::INFINITY);
        let r = classify(&sims(&[0.4, 0.4], false), hv(crit, 1.0), crit, crit, 20).unwrap();
        assert_eq!(r.regime, MeasureRegime::BoundsOnly);
        assert_eq!(r.lower_bound, 1.0);
    }

    #[test]
    fn series_examples() {
        let crit = 2f64.ln() / 2.5f64.ln();
        let s = series_bounds(&sims(&[0.4, 0.4], true), crit, 100).unwrap();
        assert!(s.levels.iter().all(|l| (l.upper_level - 1.0).abs() <= 1e-12));
        assert_relative_eq!(s.upper_sum(), 100.0, epsilon = 1e-9);
        assert!(s.upper_diverges && s.lower_diverges);

        let s = series_bounds(&sims(&[1.0 / 3.0, 1.0 / 3.0], true), 2.0, 20).unwrap();
        assert!((s.upper_sum() - 2.0 / 7.0).abs() < 1e-12);
        assert!(s.upper_total() >= 2.0 / 7.0);
        assert_eq!(s.lower_sum(), s.upper_sum());
        assert!(!s.upper_diverges);

        let s = series_bounds(&sims(&[0.5], true), 1.0, 60).unwrap();
        assert!((s.upper_sum() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn series_partial_sums_are_monotone() {
        let pair = IFSystem::new(
            vec![
                ContractionMap::diagonal(&[0.5, 0.25], vec![0.0, 0.0]).unwrap(),
                ContractionMap::diagonal(&[0.25, 0.5], vec![0.75, 0.5]).unwrap(),
            ],
            2,
            SeparationFlags::default(),
        )
        .unwrap();
        let s = series_bounds(&pair, 0.9, 12).unwrap();
        for w in s.levels.windows(2) {
            assert!(w[1].lower_partial >= w[0].lower_partial);
            assert!(w[1].upper_partial >= w[0].upper_partial);
        }
        assert!(s.levels.iter().all(|l| l.lower_level <= l.upper_level));
        assert!(series_bounds(&pair, 0.9, 40).is_err());
    }

    #[test]
    fn heuristic_flags_affine_divergence() {
        // d below every s_k: level sums grow
        let pair = IFSystem::new(
            vec![
                ContractionMap::diagonal(&[0.5, 0.25], vec![0.0, 0.0]).unwrap(),
                ContractionMap::diagonal(&[0.25, 0.5], vec![0.75, 0.5]).unwrap(),
            ],
            2,
            SeparationFlags::default(),
        )
        .unwrap();
        let s = series_bounds(&pair, 0.3, 12).unwrap();
        assert!(s.upper_diverges);
        assert!(!s.exact_test);
    }

    #[test]
    fn closed_form_examples() {
        assert_relative_eq!(
            closed_form_self_similar(&sims(&[1.0 / 3.0, 1.0 / 3.0], true), hv(2.0, 1.0)).unwrap(),
            9.0 / 7.0,
            epsilon = 1e-15
        );
        assert_eq!(closed_form_self_similar(&sims(&[0.5, 0.5], true), hv(1.0, 1.0)).unwrap(), f64::INFINITY);
        assert_relative_eq!(
            closed_form_self_similar(&sims(&[0.5, 0.25, 0.25], true), hv(2.0, 1.0)).unwrap(),
            8.0 / 5.0,
            epsilon = 1e-15
        );
        assert!(matches!(
            closed_form_self_similar(&sims(&[1.0 / 3.0, 1.0 / 3.0], false), hv(2.0, 1.0)),
            Err(IakError::MissingAssertion(_))
        ));
    }

    #[test]
    fn empirical_ratio_cantor_square() {
        let c = CondensationSet::axis_box(vec![0.25, 0.5], vec![0.5, 0.5]).unwrap();
        let r = orbital_measure_ratio_empirical(&plane_cantor(), &c, &AxisBox::unit(2), 512).unwrap();
        assert!(!r.low_resolution);
        assert_relative_eq!(r.closed_ratio, 9.0 / 7.0, epsilon = 1e-12);
        assert!(r.relative_error() < 0.05, "{r:?}");
    }

    #[test]
    fn empirical_ratio_guards() {
        let c = CondensationSet::axis_box(vec![0.25, 0.5], vec![0.5, 0.5]).unwrap();
        let coarse = orbital_measure_ratio_empirical(&plane_cantor(), &c, &AxisBox::unit(2), 4).unwrap();
        assert!(coarse.low_resolution);
        let seg = CondensationSet::segment(vec![0.5, 0.5], vec![0.5, 0.9]).unwrap();
        assert_eq!(
            orbital_measure_ratio_empirical(&plane_cantor(), &seg, &AxisBox::unit(2), 64).unwrap_err(),
            IakError::NotFullDimensional
        );
    }
}
