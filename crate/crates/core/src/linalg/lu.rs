//! LU decomposition with partial pivoting, plus Hager's 1-norm condition
//! estimator. Used for linear solves, determinants (test oracle for
//! eigenvalue products), and basis-conditioning checks.

use super::DenseMatrix;
use crate::error::{Error, Result};

/// Packed LU factors of a square matrix with row pivoting, `PA = LU`.
#[derive(Debug, Clone)]
pub struct LuDecomposition {
    lu: DenseMatrix,
    pivots: Vec<usize>,
    sign: f64,
}

impl LuDecomposition {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        let n = a.require_square()?;
        let mut lu = a.clone();
        let mut pivots = vec![0usize; n];
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut max = lu[(k, k)].abs();
            for i in (k + 1)..n {
                if lu[(i, k)].abs() > max {
                    max = lu[(i, k)].abs();
                    p = i;
                }
            }
            pivots[k] = p;
            if max == 0.0 {
                return Err(Error::SingularMatrix { column: k });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                for j in (k + 1)..n {
                    lu[(i, j)] -= factor * lu[(k, j)];
                }
            }
        }
        Ok(Self { lu, pivots, sign })
    }

    pub fn order(&self) -> usize {
        self.lu.rows()
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.order();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                context: "LU solve rhs length",
                expected: n,
                actual: b.len(),
            });
        }
        // Factor rows were swapped in full during elimination, so all row
        // interchanges must hit the rhs before the triangular solves; fusing
        // them into the forward pass would pair partial sums with the wrong
        // multiplier rows.
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.pivots[k]);
        }
        for k in 0..n {
            for i in (k + 1)..n {
                x[i] -= self.lu[(i, k)] * x[k];
            }
        }
        for k in (0..n).rev() {
            x[k] /= self.lu[(k, k)];
            for i in 0..k {
                x[i] -= self.lu[(i, k)] * x[k];
            }
        }
        Ok(x)
    }

    /// Solve `A^T x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.order();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                context: "LU transpose-solve rhs length",
                expected: n,
                actual: b.len(),
            });
        }
        // A^T = U^T L^T P, so forward-substitute U^T, back-substitute L^T,
        // then undo the pivots in reverse.
        let mut x = b.to_vec();
        for k in 0..n {
            for i in 0..k {
                x[k] -= self.lu[(i, k)] * x[i];
            }
            x[k] /= self.lu[(k, k)];
        }
        for k in (0..n).rev() {
            for i in (k + 1)..n {
                x[k] -= self.lu[(i, k)] * x[i];
            }
        }
        for k in (0..n).rev() {
            x.swap(k, self.pivots[k]);
        }
        Ok(x)
    }

    /// Determinant from the pivoted factorization.
    pub fn det(&self) -> f64 {
        let mut d = self.sign;
        for i in 0..self.order() {
            d *= self.lu[(i, i)];
        }
        d
    }
}

/// Hager-style 1-norm condition estimate `kappa_1(A) ~ ||A||_1 * est(||A^-1||_1)`.
///
/// The inverse-norm estimate walks at most five power-iteration-like steps,
/// each a pair of LU solves; standard practice and plenty for the sizes here.
pub fn condition_estimate_1norm(a: &DenseMatrix, lu: &LuDecomposition) -> f64 {
    let n = a.rows();
    if n == 0 {
        return 1.0;
    }
    let norm_a = a.norm_one();
    let mut x = vec![1.0 / n as f64; n];
    let mut estimate = 0.0;
    for _ in 0..5 {
        let y = match lu.solve(&x) {
            Ok(y) => y,
            Err(_) => return f64::INFINITY,
        };
        let y_norm: f64 = y.iter().map(|v| v.abs()).sum();
        let xi: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
        let z = match lu.solve_transpose(&xi) {
            Ok(z) => z,
            Err(_) => return f64::INFINITY,
        };
        let (mut j_max, mut z_max) = (0, 0.0);
        for (j, zj) in z.iter().enumerate() {
            if zj.abs() > z_max {
                z_max = zj.abs();
                j_max = j;
            }
        }
        estimate = y_norm;
        let x_dot_z: f64 = x.iter().zip(&z).map(|(a, b)| a * b).sum();
        if z_max <= x_dot_z.abs() {
            break;
        }
        x = vec![0.0; n];
        x[j_max] = 1.0;
    }
    norm_a * estimate.max(1.0 / norm_a.max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a = DenseMatrix::from_rows(&[&[2.0, 1.0], &[5.0, 3.0]]).unwrap();
        let lu = LuDecomposition::new(&a).unwrap();
        let x = lu.solve(&[4.0, 11.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 2.0).abs() < 1e-12);
        assert!((lu.det() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transpose_solve_matches_transposed_system() {
        let a = DenseMatrix::from_rows(&[&[3.0, -1.0, 2.0], &[0.5, 4.0, 1.0], &[-2.0, 1.0, 5.0]])
            .unwrap();
        let lu = LuDecomposition::new(&a).unwrap();
        let lu_t = LuDecomposition::new(&a.transpose()).unwrap();
        let b = [1.0, -2.0, 0.5];
        let x1 = lu.solve_transpose(&b).unwrap();
        let x2 = lu_t.solve(&b).unwrap();
        for (u, v) in x1.iter().zip(&x2) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert!(LuDecomposition::new(&a).is_err());
    }

    #[test]
    fn solve_survives_late_pivot_swaps() {
        // Ones column plus small columns forces pivot swaps deep in the
        // elimination; a fused swap/substitution loop pairs partial sums
        // with the wrong multiplier rows here.
        let c = 1e-6;
        let a = DenseMatrix::from_rows(&[
            &[1.0, -0.30 * c, 0.66 * c, 0.27 * c, -0.44 * c],
            &[1.0, 0.85 * c, -0.11 * c, 0.09 * c, -0.24 * c],
            &[1.0, 0.05 * c, 0.36 * c, -0.39 * c, 0.72 * c],
            &[1.0, -0.27 * c, -0.47 * c, 0.64 * c, 0.32 * c],
            &[1.0, -0.33 * c, -0.45 * c, -0.60 * c, -0.36 * c],
        ])
        .unwrap();
        let lu = LuDecomposition::new(&a).unwrap();
        let b = [3.0e-6, -1.0e-6, 4.0e-6, 2.0e-6, -5.0e-6];
        let x = lu.solve(&b).unwrap();
        let ax = a.matvec(&x).unwrap();
        for (lhs, rhs) in ax.iter().zip(&b) {
            assert!(
                (lhs - rhs).abs() < 1e-18,
                "residual {} on entry",
                (lhs - rhs).abs()
            );
        }
    }

    #[test]
    fn condition_estimate_tracks_true_condition() {
        // diag(1, 1e-6): kappa_1 = 1e6 exactly.
        let a = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 1e-6]]).unwrap();
        let lu = LuDecomposition::new(&a).unwrap();
        let est = condition_estimate_1norm(&a, &lu);
        assert!((1e5..=1e7).contains(&est), "estimate {est}");
    }
}
