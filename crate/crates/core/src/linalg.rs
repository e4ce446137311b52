//! Thin helpers over `nalgebra` for the small dense complex systems used by
//! the Newton and continuation steps.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Solves `a·x = b`; `None` when `a` is singular.
pub fn solve(a: CMatrix, b: &[Complex64]) -> Option<Vec<Complex64>> {
    let x = a.lu().solve(&DVector::from_column_slice(b))?;
    if x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Some(x.as_slice().to_vec())
    } else {
        None
    }
}

pub fn determinant(a: CMatrix) -> Complex64 {
    a.lu().determinant()
}

/// Sup norm of a complex vector.
pub fn sup_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Sup distance between two complex vectors of equal length.
pub fn sup_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest coordinate-wise relative difference `|a_k − b_k| / |b_k|`.
pub fn relative_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm() / y.norm().max(f64::MIN_POSITIVE)).fold(0.0, f64::max)
}
