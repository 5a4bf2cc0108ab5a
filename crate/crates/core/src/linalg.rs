//! Small dense linear algebra used by the map machinery.
//!
//! Matrices here are tiny (ambient dimension rarely above 4), so accuracy
//! matters more than throughput. The 1x1 and 2x2 cases use closed forms;
//! larger matrices go through nalgebra's SVD.

use nalgebra::{DMatrix, DVector};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Largest and smallest singular values of a square matrix.
pub fn extreme_singular_values(m: &Matrix) -> (f64, f64) {
    debug_assert!(m.is_square());
    match m.nrows() {
        0 => (0.0, 0.0),
        1 => {
            let a = m[(0, 0)].abs();
            (a, a)
        }
        2 => {
            let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
            // sigma_{1,2} = (|q| +- |r|) / 2 with q, r the conformal and
            // anti-conformal parts; stable for near-singular inputs.
            let q = (a + d).hypot(c - b);
            let r = (a - d).hypot(c + b);
            let hi = 0.5 * (q + r);
            let det = (a * d - b * c).abs();
            let lo = if hi > 0.0 { det / hi } else { 0.0 };
            (hi, lo)
        }
        _ => {
            let sv = m.clone().singular_values();
            let hi = sv.iter().cloned().fold(0.0_f64, f64::max);
            let lo = sv.iter().cloned().fold(f64::INFINITY, f64::min);
            (hi, lo)
        }
    }
}

/// Max-norm distance of `QᵀQ` from the identity.
pub fn orthogonality_defect(q: &Matrix) -> f64 {
    let n = q.ncols();
    let gram = q.transpose() * q;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Option<Matrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return None;
    }
    Some(Matrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Neumaier-compensated sum; order-dependent only in the last bits.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
