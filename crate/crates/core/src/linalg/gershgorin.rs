//! Gershgorin discs: every eigenvalue of a square matrix lies in the union
//! of discs centered at the diagonal entries with off-diagonal absolute row
//! sums as radii.

use super::{ComplexValue, DenseMatrix};
use crate::error::Result;

/// One disc per matrix row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GershgorinDisc {
    /// Diagonal entry of the row.
    pub center: f64,
    /// Off-diagonal absolute row sum.
    pub radius: f64,
    pub row_index: usize,
}

impl GershgorinDisc {
    /// Distance from a point to this disc (zero inside).
    pub fn distance_to(&self, z: ComplexValue) -> f64 {
        let d = (ComplexValue::new(self.center, 0.0) - z).norm();
        (d - self.radius).max(0.0)
    }
}

/// Compute the discs of a square matrix, one per row.
pub fn gershgorin_discs(a: &DenseMatrix) -> Result<Vec<GershgorinDisc>> {
    let n = a.require_square()?;
    let mut discs = Vec::with_capacity(n);
    for r in 0..n {
        let radius: f64 = (0..n).filter(|&t| t != r).map(|t| a[(r, t)].abs()).sum();
        discs.push(GershgorinDisc {
            center: a[(r, r)],
            radius,
            row_index: r,
        });
    }
    Ok(discs)
}

/// Shortest distance from a point to the union of discs (zero when inside).
pub fn distance_to_disc_union(discs: &[GershgorinDisc], z: ComplexValue) -> f64 {
    discs
        .iter()
        .map(|d| d.distance_to(z))
        .fold(f64::INFINITY, f64::min)
}
