//! Dense vector kernels on plain `f64` slices.

use crate::error::{Error, Result};

#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[inline]
pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().sum::<f64>() / x.len() as f64
}

/// Subtracts the mean in place, leaving `x` orthogonal to the constant vector.
pub fn project_out_ones_in_place(x: &mut [f64]) {
    let m = mean(x);
    for v in x.iter_mut() {
        *v -= m;
    }
}

/// Returns `x - (1ᵀx / n) 1`.
pub fn project_out_ones(x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    project_out_ones_in_place(&mut y);
    y
}

/// Scales `x` to unit Euclidean norm and returns the norm it had.
pub fn normalize_in_place(x: &mut [f64]) -> Result<f64> {
    let nrm = norm(x);
    if !nrm.is_finite() {
        return Err(Error::NonFinite("normalization"));
    }
    if nrm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let inv = 1.0 / nrm;
    for v in x.iter_mut() {
        *v *= inv;
    }
    Ok(nrm)
}

pub fn all_finite(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}

/// Flips the sign of `x` so that its first nonzero entry is positive.
pub fn canonical_sign(x: &mut [f64]) {
    if let Some(first) = x.iter().copied().find(|v| *v != 0.0) {
        if first < 0.0 {
            for v in x.iter_mut() {
                *v = -*v;
            }
        }
    }
}

/// Angle in radians between the lines spanned by `x` and `y`.
pub fn line_angle(x: &[f64], y: &[f64]) -> f64 {
    let (nx, ny) = (norm(x), norm(y));
    let c = dot(x, y) / (nx * ny);
    let s = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a / nx - c * b / ny).powi(2))
        .sum::<f64>()
        .sqrt();
    s.atan2(c.abs())
}
