//! Dense real matrix core.
//!
//! Everything downstream (Laplacians, Jacobians, similarity transforms) runs
//! through [`DenseMatrix`], a row-major `f64` matrix. Eigensolvers are
//! in-house: cyclic Jacobi for symmetric input ([`sym_eigen`]) and balanced
//! Hessenberg + Francis double-shift QR for general input
//! ([`gen_eigenvalues`]). Matrix sizes in this crate stay small (a few
//! hundred at most), so determinism and portability win over raw speed.

mod gershgorin;
mod jacobi;
mod lu;
mod qr;

pub use gershgorin::{distance_to_disc_union, gershgorin_discs, GershgorinDisc};
pub use jacobi::{sym_eigen, SymmetricSpectrum};
pub use lu::{condition_estimate_1norm, LuDecomposition};
pub use qr::gen_eigenvalues;

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Complex scalar used for general eigenvalues.
pub type ComplexValue = Complex64;

/// Condition-estimate limit beyond which a transform basis is rejected as
/// numerically singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Dense real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
        }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Build from a row-major slice. Rejects non-finite entries and length
    /// mismatches.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "row-major entry count",
                expected: rows * cols,
                actual: entries.len(),
            });
        }
        if !entries.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFiniteEntry {
                context: "matrix construction",
            });
        }
        Ok(Self {
            rows,
            cols,
            entries: entries.to_vec(),
        })
    }

    /// Build from nested rows; each inner slice is one row.
    pub fn from_rows(data: &[&[f64]]) -> Result<Self> {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        let mut entries = Vec::with_capacity(rows * cols);
        for (i, row) in data.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "row length",
                    expected: cols,
                    actual: data[i].len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::from_row_major(rows, cols, &entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    /// Ensure the matrix is square, or report its shape.
    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matmul inner dimension",
                expected: self.cols,
                actual: other.rows,
            });
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matvec length",
                expected: self.cols,
                actual: x.len(),
            });
        }
        let mut y = vec![0.0; self.rows];
        for i in 0..self.rows {
            let mut acc = 0.0;
            for j in 0..self.cols {
                acc += self[(i, j)] * x[j];
            }
            y[i] = acc;
        }
        Ok(y)
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].abs()).sum())
            .fold(0.0, f64::max)
    }

    /// 1-norm (max absolute column sum).
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Infinity norm of `A - A^T` (max absolute row sum of the deviation).
    pub fn asymmetry(&self) -> f64 {
        let n = self.rows.min(self.cols);
        let mut dev: f64 = 0.0;
        for i in 0..n {
            let row_sum: f64 = (0..n).map(|j| (self[(i, j)] - self[(j, i)]).abs()).sum();
            dev = dev.max(row_sum);
        }
        dev
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Extract column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.entries[i * self.cols + j]
    }
}

/// Block-diagonal direct sum of square blocks. Off-block entries are exactly
/// zero.
pub fn direct_sum(blocks: &[DenseMatrix]) -> Result<DenseMatrix> {
    for (index, b) in blocks.iter().enumerate() {
        if !b.is_square() {
            return Err(Error::NonSquareBlock {
                index,
                rows: b.rows(),
                cols: b.cols(),
            });
        }
    }
    let total: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = DenseMatrix::zeros(total, total);
    let mut offset = 0;
    for b in blocks {
        let n = b.rows();
        for i in 0..n {
            for j in 0..n {
                out[(offset + i, offset + j)] = b[(i, j)];
            }
        }
        offset += n;
    }
    Ok(out)
}

/// Similarity transform `P^-1 A P`, computed column-by-column through an LU
/// solve of `P` (the inverse is never formed). `P` is rejected when its
/// 1-norm condition estimate exceeds [`CONDITION_LIMIT`].
pub fn similarity_transform(a: &DenseMatrix, p: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a.require_square()?;
    let np = p.require_square()?;
    if n != np {
        return Err(Error::DimensionMismatch {
            context: "similarity transform basis size",
            expected: n,
            actual: np,
        });
    }
    let lu = LuDecomposition::new(p)?;
    let condition = condition_estimate_1norm(p, &lu);
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(Error::IllConditioned {
            condition,
            limit: CONDITION_LIMIT,
        });
    }
    let ap = a.matmul(p)?;
    let mut out = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let col = lu.solve(&ap.column(j))?;
        for i in 0..n {
            out[(i, j)] = col[i];
        }
    }
    Ok(out)
}

/// Largest real part of a spectrum; the scalar that decides linear stability.
pub fn spectral_abscissa(spectrum: &[ComplexValue]) -> Result<f64> {
    if spectrum.is_empty() {
        return Err(Error::InvalidArgument(
            "spectral abscissa of an empty spectrum".into(),
        ));
    }
    Ok(spectrum.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
}

/// Sort complex values by `(re, im)` ascending; the output convention used
/// everywhere in this crate for reproducible reports.
pub fn sort_spectrum(spectrum: &mut [ComplexValue]) {
    spectrum.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}
