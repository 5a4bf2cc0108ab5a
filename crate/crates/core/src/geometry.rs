use crate::error::{IakError, Result};
use crate::linalg::euclidean_distance;
use serde::{Deserialize, Serialize};

/// Axis-aligned box `[min_i, max_i]` in Rⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl AxisBox {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        if min.len() != max.len() || min.is_empty() {
            return Err(IakError::InvalidInput(
                "box corners must share a positive dimension".into(),
            ));
        }
        if min.iter().zip(&max).any(|(a, b)| !(a.is_finite() && b.is_finite() && a <= b)) {
            return Err(IakError::InvalidInput("box requires finite min <= max".into()));
        }
        Ok(AxisBox { min, max })
    }

    pub fn unit(dim: usize) -> Self {
        AxisBox { min: vec![0.0; dim], max: vec![1.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.min.iter().zip(&self.max).map(|(a, b)| b - a).collect()
    }

    pub fn diameter(&self) -> f64 {
        euclidean_distance(&self.min, &self.max)
    }

    pub fn volume(&self) -> f64 {
        self.widths().iter().product()
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        p.iter()
            .zip(self.min.iter().zip(&self.max))
            .all(|(x, (a, b))| *x >= a - tol && *x <= b + tol)
    }

    /// All 2ⁿ corners, in binary order over the axes.
    pub fn corners(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|i| if mask >> i & 1 == 1 { self.max[i] } else { self.min[i] })
                    .collect()
            })
            .collect()
    }

    /// Smallest box containing all the given points.
    pub fn bounding(points: &[Vec<f64>]) -> Option<Self> {
        let first = points.first()?;
        let mut min = first.clone();
        let mut max = first.clone();
        for p in &points[1..] {
            for i in 0..min.len() {
                min[i] = min[i].min(p[i]);
                max[i] = max[i].max(p[i]);
            }
        }
        Some(AxisBox { min, max })
    }
}

/// Flat storage for a cloud of points in Rⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize) -> Self {
        PointCloud { dim, coords: Vec::new() }
    }

    pub fn with_capacity(dim: usize, points: usize) -> Self {
        PointCloud { dim, coords: Vec::with_capacity(dim * points) }
    }

    pub fn from_points(dim: usize, points: &[Vec<f64>]) -> Self {
        let mut cloud = PointCloud::with_capacity(dim, points.len());
        for p in points {
            cloud.push(p);
        }
        cloud
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.coords.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn push(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.dim, "point dimension mismatch");
        self.coords.extend_from_slice(p);
    }

    pub fn extend(&mut self, other: &PointCloud) {
        assert_eq!(other.dim, self.dim, "cloud dimension mismatch");
        self.coords.extend_from_slice(&other.coords);
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim.max(1))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_points(&self) -> Vec<Vec<f64>> {
        self.iter().map(|p| p.to_vec()).collect()
    }

    /// Symmetric Hausdorff distance by brute force. Quadratic; meant for
    /// checks on small clouds.
    pub fn hausdorff_distance(&self, other: &PointCloud) -> f64 {
        fn directed(a: &PointCloud, b: &PointCloud) -> f64 {
            a.iter()
                .map(|p| {
                    b.iter()
                        .map(|q| euclidean_distance(p, q))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        }
        directed(self, other).max(directed(other, self))
    }
}
