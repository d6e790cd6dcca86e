//! Symmetric eigensolver: cyclic Jacobi rotations.
//!
//! Each sweep annihilates every off-diagonal element once with a plane
//! rotation; the rotations accumulate into the eigenvector matrix. Sweeps
//! repeat until the off-diagonal Frobenius norm falls below
//! `1e-12 * ||A||_F` or the sweep budget runs out.

use super::DenseMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 50;
const OFF_DIAGONAL_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-10;

/// Full spectrum of a symmetric matrix: eigenvalues ascending, orthonormal
/// eigenvectors as columns (column `j` pairs with `eigenvalues[j]`).
#[derive(Debug, Clone)]
pub struct SymmetricSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DenseMatrix,
}

impl SymmetricSpectrum {
    /// Second-smallest eigenvalue; `None` for orders below 2.
    pub fn second_smallest(&self) -> Option<f64> {
        self.eigenvalues.get(1).copied()
    }
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += 2.0 * a[(i, j)] * a[(i, j)];
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi iteration.
///
/// Input must satisfy `||A - A^T||_max <= 1e-10 * (1 + ||A||_inf)`; the
/// residual-carrying error is returned if 50 sweeps do not converge.
pub fn sym_eigen(a: &DenseMatrix) -> Result<SymmetricSpectrum> {
    let n = a.require_square()?;
    let symmetry_tol = SYMMETRY_TOL * (1.0 + a.norm_inf());
    let deviation = a.asymmetry();
    if deviation > symmetry_tol {
        return Err(Error::NotSymmetric {
            deviation,
            tolerance: symmetry_tol,
        });
    }

    // Work on the symmetrized copy so the rotations see an exactly symmetric
    // matrix even when the input carries tolerated round-off.
    let mut work = a.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (work[(i, j)] + work[(j, i)]);
            work[(i, j)] = avg;
            work[(j, i)] = avg;
        }
    }
    let mut vectors = DenseMatrix::identity(n);
    let threshold = OFF_DIAGONAL_TOL * work.norm_fro();

    let mut converged = off_diagonal_norm(&work) <= threshold;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = work[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = work[(p, p)];
                let aqq = work[(q, q)];
                let theta = 0.5 * (aqq - app) / apq;
                // Stable tangent of the rotation angle.
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = work[(k, p)];
                    let akq = work[(k, q)];
                    work[(k, p)] = c * akp - s * akq;
                    work[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = work[(p, k)];
                    let aqk = work[(q, k)];
                    work[(p, k)] = c * apk - s * aqk;
                    work[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = vectors[(k, p)];
                    let vkq = vectors[(k, q)];
                    vectors[(k, p)] = c * vkp - s * vkq;
                    vectors[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&work) <= threshold;
    }
    if !converged {
        return Err(Error::NoConvergence {
            algorithm: "cyclic Jacobi",
            iterations: sweeps,
            residual: off_diagonal_norm(&work),
            diagnostics: format!(", off-diagonal threshold {threshold:.3e}"),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        work[(i, i)]
            .partial_cmp(&work[(j, j)])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| work[(i, i)]).collect();
    let mut eigenvectors = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        // Deterministic sign: largest-magnitude component positive.
        let mut pivot = 0;
        let mut best = 0.0;
        for k in 0..n {
            if vectors[(k, src)].abs() > best {
                best = vectors[(k, src)].abs();
                pivot = k;
            }
        }
        let flip = if vectors[(pivot, src)] < 0.0 { -1.0 } else { 1.0 };
        for k in 0..n {
            eigenvectors[(k, dst)] = flip * vectors[(k, src)];
        }
    }
    Ok(SymmetricSpectrum {
        eigenvalues,
        eigenvectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruction_error(a: &DenseMatrix, s: &SymmetricSpectrum) -> f64 {
        let n = a.rows();
        let mut err: f64 = 0.0;
        for j in 0..n {
            let v = s.eigenvectors.column(j);
            let av = a.matvec(&v).unwrap();
            for i in 0..n {
                err = err.max((av[i] - s.eigenvalues[j] * v[i]).abs());
            }
        }
        err
    }

    #[test]
    fn identity_spectrum() {
        let a = DenseMatrix::identity(3);
        let s = sym_eigen(&a).unwrap();
        for v in &s.eigenvalues {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn known_2x2() {
        let a = DenseMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let s = sym_eigen(&a).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((s.eigenvalues[1] - 3.0).abs() < 1e-12);
        assert!(reconstruction_error(&a, &s) < 1e-12);
    }

    #[test]
    fn example_layer_laplacian() {
        // 3-patch layer with weights w13 = 0.1, w23 = 1; eigenvalues
        // {0, 0.1461, 2.0539} (third value pinned by trace 2.2).
        let a = DenseMatrix::from_rows(&[
            &[0.1, 0.0, -0.1],
            &[0.0, 1.0, -1.0],
            &[-0.1, -1.0, 1.1],
        ])
        .unwrap();
        let s = sym_eigen(&a).unwrap();
        assert!(s.eigenvalues[0].abs() < 1e-12);
        assert!((s.eigenvalues[1] - 0.1461).abs() < 5e-5);
        assert!((s.eigenvalues[2] - 2.0539).abs() < 5e-5);
        assert!((s.eigenvalues.iter().sum::<f64>() - 2.2).abs() < 1e-12);
        // Characteristic-polynomial oracle: det(A - lambda I) ~ 0 at each
        // computed eigenvalue.
        for &lambda in &s.eigenvalues {
            let mut shifted = a.clone();
            for i in 0..3 {
                shifted[(i, i)] -= lambda;
            }
            let det = match crate::linalg::LuDecomposition::new(&shifted) {
                Ok(lu) => lu.det().abs(),
                Err(_) => 0.0,
            };
            assert!(det < 1e-10, "char poly residual {det} at {lambda}");
        }
        assert!(reconstruction_error(&a, &s) < 1e-12);
    }

    #[test]
    fn second_set_prey_layer() {
        let a = DenseMatrix::from_rows(&[
            &[0.1, 0.0, -0.1],
            &[0.0, 0.1, -0.1],
            &[-0.1, -0.1, 0.2],
        ])
        .unwrap();
        let s = sym_eigen(&a).unwrap();
        assert!(s.eigenvalues[0].abs() < 1e-12);
        assert!((s.eigenvalues[1] - 0.1).abs() < 1e-12);
        assert!((s.eigenvalues[2] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn rejects_asymmetric() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(sym_eigen(&a), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn orthonormal_columns() {
        let a = DenseMatrix::from_rows(&[
            &[4.0, 2.0, 0.5],
            &[2.0, 5.0, 3.0],
            &[0.5, 3.0, 6.0],
        ])
        .unwrap();
        let s = sym_eigen(&a).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                let dot: f64 = (0..3)
                    .map(|i| s.eigenvectors[(i, j)] * s.eigenvectors[(i, k)])
                    .sum();
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-10);
            }
        }
    }
}
