//! Grid box counting and upper box dimension estimates.
//!
//! Cells have side `δ/√n`, so each cell has diameter δ and the counts are
//! comparable to the minimal number of δ-balls up to a bounded factor.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::{IakError, Result};
use crate::geometry::{AxisBox, PointCloud};
use crate::ifs::{homogeneous_points, orbital_points_with, CondensationSet, IFSystem, Sampling};
use crate::pressure::{upper_lipschitz_dimension, DEFAULT_TOL};

pub const DEFAULT_OFFSETS: usize = 4;
pub const DEFAULT_SLACK: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxCountSeries {
    pub deltas: Vec<f64>,
    pub counts: Vec<usize>,
    pub offsets_tried: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxDimEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub delta_range_used: (f64, f64),
    pub estimate: f64,
    pub series: BoxCountSeries,
    /// Counts stopped growing over the two finest rungs although the cloud
    /// could fill more cells.
    pub saturation_warning: bool,
}

fn cell_key(p: &[f64], side: f64, shift: f64) -> [i64; 4] {
    let mut key = [0i64; 4];
    for (i, x) in p.iter().enumerate() {
        let c = ((x - shift) / side).floor() as i64;
        if i < 4 {
            key[i] = c;
        } else {
            // fold extra axes in; collisions only lower the count
            key[3] = key[3].wrapping_mul(0x9E37_79B9).wrapping_add(c);
        }
    }
    key
}

/// Occupied cells for one grid translation. Offset `j` of `offsets` shifts
/// every axis by `j·side/offsets`.
pub fn count_cells(cloud: &PointCloud, delta: f64, offset_index: usize, offsets: usize) -> usize {
    let side = delta / (cloud.dim() as f64).sqrt();
    let shift = offset_index as f64 * side / offsets.max(1) as f64;
    let cells: HashSet<[i64; 4]> = cloud.iter().map(|p| cell_key(p, side, shift)).collect();
    cells.len()
}

/// Minimum number of occupied cells of diameter δ over `offsets` grid
/// translations.
pub fn count_boxes(cloud: &PointCloud, delta: f64, offsets: usize) -> Result<usize> {
    if cloud.is_empty() {
        return Err(IakError::EmptyInput("cannot count boxes of an empty cloud".into()));
    }
    if !(delta > 0.0) {
        return Err(IakError::InvalidInput(format!("delta must be positive: got {delta}")));
    }
    let offsets = offsets.max(1);
    Ok((0..offsets)
        .into_par_iter()
        .map(|j| count_cells(cloud, delta, j, offsets))
        .min()
        .unwrap())
}

/// Geometric ladder of `levels` rungs from `delta_hi` down to `delta_lo`.
pub fn geometric_ladder(delta_hi: f64, delta_lo: f64, levels: usize) -> Vec<f64> {
    let ratio = delta_lo / delta_hi;
    (0..levels)
        .map(|i| delta_hi * ratio.powf(i as f64 / (levels - 1) as f64))
        .collect()
}

/// Least-squares line `y = slope·x + intercept` with its r².
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 && sxx > 0.0 { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) } else { 1.0 };
    (slope, intercept, r2)
}

pub fn box_dimension_fit(cloud: &PointCloud, delta_hi: f64, delta_lo: f64, levels: usize) -> Result<BoxDimEstimate> {
    box_dimension_fit_with(cloud, delta_hi, delta_lo, levels, DEFAULT_OFFSETS)
}

/// Slope of `log N_δ` against `−log δ` over a geometric ladder.
pub fn box_dimension_fit_with(
    cloud: &PointCloud,
    delta_hi: f64,
    delta_lo: f64,
    levels: usize,
    offsets: usize,
) -> Result<BoxDimEstimate> {
    if levels < 4 {
        return Err(IakError::InvalidInput(format!("ladder needs at least 4 rungs: got {levels}")));
    }
    if !(delta_lo > 0.0 && delta_lo < delta_hi && delta_hi <= 1.0) {
        return Err(IakError::InvalidInput(format!(
            "need 0 < delta_lo < delta_hi <= 1: got [{delta_lo}, {delta_hi}]"
        )));
    }
    let deltas = geometric_ladder(delta_hi, delta_lo, levels);
    let counts = deltas.iter().map(|&d| count_boxes(cloud, d, offsets)).collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = deltas.iter().map(|d| -d.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let (slope, intercept, r_squared) = least_squares(&xs, &ys);
    let last = counts.len() - 1;
    let saturation_warning = counts[last] == counts[last - 1] && counts[last] < cloud.len();
    Ok(BoxDimEstimate {
        slope,
        intercept,
        r_squared,
        delta_range_used: (delta_lo, delta_hi),
        estimate: slope,
        series: BoxCountSeries { deltas, counts, offsets_tried: vec![offsets.max(1); levels] },
        saturation_warning,
    })
}

/// δ ladder for the bound checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    pub delta_hi: f64,
    pub levels: usize,
    /// Ratio between consecutive rungs.
    pub ratio: f64,
    pub offsets: usize,
    pub slack: f64,
}

impl Ladder {
    /// 8 rungs of ratio 1/2 starting at `2⁻³·diam(X)`.
    pub fn default_for(x: &AxisBox) -> Self {
        Ladder {
            delta_hi: (x.diameter() / 8.0).min(1.0),
            levels: 8,
            ratio: 0.5,
            offsets: DEFAULT_OFFSETS,
            slack: DEFAULT_SLACK,
        }
    }

    pub fn delta_lo(&self) -> f64 {
        self.delta_hi * self.ratio.powi(self.levels as i32 - 1)
    }

    /// Largest render δ that avoids the saturation warning.
    pub fn max_render_delta(&self) -> f64 {
        self.delta_lo() / 4.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub lower: f64,
    pub upper: f64,
    pub estimate: f64,
    pub homogeneous_estimate: f64,
    pub upper_lipschitz: f64,
    pub slack: f64,
    pub holds: bool,
    pub saturation_warning: bool,
    pub fit: BoxDimEstimate,
}

/// Per-axis sample count for C. Full-dimensional sets are sampled at half
/// the finest cell side; thinner sets at an eighth, since a curve can clip
/// a cell corner along a piece much shorter than the cell.
pub fn samples_for(c: &CondensationSet, ladder: &Ladder) -> usize {
    let extent = c.bounding_box().widths().into_iter().fold(0.0, f64::max);
    if extent == 0.0 {
        return 1;
    }
    let cell = ladder.delta_lo() / (c.dim() as f64).sqrt();
    let per_cell = if c.is_full_dimensional() { 2.0 } else { 8.0 };
    ((per_cell * extent / cell).ceil() as usize).max(1)
}

/// `F_C` cloud: homogeneous points, orbital samples and C itself.
pub fn inhomogeneous_cloud(
    ifs: &IFSystem,
    c: &CondensationSet,
    render_delta: f64,
    samples_per_copy: usize,
    sampling: Sampling,
) -> Result<PointCloud> {
    let mut cloud = homogeneous_points(ifs, render_delta)?;
    cloud.extend(&orbital_points_with(ifs, c, render_delta, samples_per_copy, sampling)?);
    Ok(cloud)
}

/// Checks `max{dim F_∅, dim C} − slack <= dim F_C <= max{s, dim C} + slack`
/// at finite scale, `s` the upper Lipschitz dimension bound.
pub fn verify_theorem_bounds(
    ifs: &IFSystem,
    c: &CondensationSet,
    render_delta: f64,
    ladder: &Ladder,
) -> Result<BoundsReport> {
    verify_theorem_bounds_with(ifs, c, render_delta, ladder, Sampling::Grid)
}

pub fn verify_theorem_bounds_with(
    ifs: &IFSystem,
    c: &CondensationSet,
    render_delta: f64,
    ladder: &Ladder,
    sampling: Sampling,
) -> Result<BoundsReport> {
    let delta_lo = ladder.delta_lo();
    let homogeneous = homogeneous_points(ifs, render_delta)?;
    let hom_fit = box_dimension_fit_with(&homogeneous, ladder.delta_hi, delta_lo, ladder.levels, ladder.offsets)?;
    let dim_report = upper_lipschitz_dimension(ifs, ifs.budget(), DEFAULT_TOL);

    let samples = samples_for(c, ladder);
    let full = inhomogeneous_cloud(ifs, c, render_delta, samples, sampling)?;
    let fit = box_dimension_fit_with(&full, ladder.delta_hi, delta_lo, ladder.levels, ladder.offsets)?;

    let lower = hom_fit.estimate.max(c.box_dim());
    let upper = dim_report.best_upper_bound.max(c.box_dim());
    let estimate = fit.estimate;
    let holds = lower - ladder.slack <= estimate && estimate <= upper + ladder.slack;
    Ok(BoundsReport {
        lower,
        upper,
        estimate,
        homogeneous_estimate: hom_fit.estimate,
        upper_lipschitz: dim_report.best_upper_bound,
        slack: ladder.slack,
        holds,
        saturation_warning: render_delta > ladder.max_render_delta(),
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_point_counts_one() {
        let cloud = PointCloud::from_points(2, &[vec![0.3, 0.4]]);
        for d in [1.0, 0.1, 1e-4] {
            assert_eq!(count_boxes(&cloud, d, 3).unwrap(), 1);
        }
    }

    #[test]
    fn empty_cloud_is_rejected() {
        assert!(matches!(count_boxes(&PointCloud::new(1), 0.1, 2), Err(IakError::EmptyInput(_))));
    }

    #[test]
    fn unit_segment_tenths() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts: Vec<Vec<f64>> = (0..10_000).map(|_| vec![rng.random::<f64>()]).collect();
        let cloud = PointCloud::from_points(1, &pts);
        assert_eq!(count_cells(&cloud, 0.1, 0, 2), 10);
        assert_eq!(count_cells(&cloud, 0.1, 1, 2), 11);
        assert_eq!(count_boxes(&cloud, 0.1, 2).unwrap(), 10);
    }

    #[test]
    fn square_corners() {
        let cloud = PointCloud::from_points(
            2,
            &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
        );
        assert_eq!(count_boxes(&cloud, 0.5 * 2f64.sqrt(), 4).unwrap(), 4);
    }

    #[test]
    fn single_point_slope_zero() {
        let cloud = PointCloud::from_points(1, &[vec![0.5]]);
        let fit = box_dimension_fit(&cloud, 0.5, 0.01, 6).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert!(!fit.saturation_warning);
    }

    #[test]
    fn fit_rejects_bad_ladder() {
        let cloud = PointCloud::from_points(1, &[vec![0.5]]);
        assert!(box_dimension_fit(&cloud, 0.5, 0.01, 3).is_err());
        assert!(box_dimension_fit(&cloud, 0.01, 0.5, 6).is_err());
    }

    #[test]
    fn saturation_flag() {
        // two tight clusters: counts stop at 2 while the cloud holds 4 points
        let clustered = PointCloud::from_points(1, &[vec![0.0], vec![1e-9], vec![0.5], vec![0.5 + 1e-9]]);
        let fit = box_dimension_fit(&clustered, 0.25, 1e-4, 6).unwrap();
        assert!(fit.saturation_warning);
        let distinct: Vec<Vec<f64>> = (0..=8).map(|i| vec![i as f64 / 8.0]).collect();
        let fit = box_dimension_fit(&PointCloud::from_points(1, &distinct), 0.25, 1e-3, 6).unwrap();
        assert!(!fit.saturation_warning, "every point already has its own cell");
    }

    #[test]
    fn least_squares_exact_line() {
        let (m, b, r2) = least_squares(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((m - 2.0).abs() < 1e-15 && (b - 1.0).abs() < 1e-15 && (r2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ladder_defaults() {
        let l = Ladder::default_for(&AxisBox::unit(1));
        assert_eq!(l.levels, 8);
        assert!((l.delta_hi - 0.125).abs() < 1e-15);
        assert!((l.delta_lo() - 2f64.powi(-10)).abs() < 1e-15);
    }
}
