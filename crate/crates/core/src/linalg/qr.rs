//! General real eigenvalues: balancing, Householder reduction to upper
//! Hessenberg form, then Francis double-shift QR with deflation.
//!
//! Eigenvalues only; the coupled Jacobians analyzed here are small and
//! nonsymmetric, and Schur vectors are never needed. Complex eigenvalues
//! come out of 2x2 deflated blocks and are exactly conjugate by
//! construction; near-real values are snapped onto the axis afterwards.

use super::{sort_spectrum, ComplexValue, DenseMatrix};
use crate::error::{Error, Result};

/// Snap threshold for treating a tiny imaginary part as zero:
/// `|im| <= 1e-9 * (1 + |re|)`.
const REAL_SNAP_TOL: f64 = 1e-9;

/// Iteration budget per deflation step; total work is bounded by `30 n`.
const MAX_ITERATIONS_PER_EIGENVALUE: usize = 30;

/// Diagonal balancing by radix-2 scaling (a similarity, so eigenvalues are
/// untouched). Brings row and column norms close to equalize round-off.
fn balance(a: &mut DenseMatrix) {
    let n = a.rows();
    let radix: f64 = 2.0;
    let sq = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut f = 1.0;
                let s = c + r;
                let mut g = r / radix;
                while c < g {
                    f *= radix;
                    c *= sq;
                }
                g = r * radix;
                while c > g {
                    f /= radix;
                    c /= sq;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let ginv = 1.0 / f;
                    for j in 0..n {
                        a[(i, j)] *= ginv;
                    }
                    for j in 0..n {
                        a[(j, i)] *= f;
                    }
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form.
fn hessenberg(a: &mut DenseMatrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    for k in 0..(n - 2) {
        let mut norm_sq = 0.0;
        for i in (k + 1)..n {
            norm_sq += a[(i, k)] * a[(i, k)];
        }
        if norm_sq == 0.0 {
            continue;
        }
        let norm = norm_sq.sqrt();
        let alpha = if a[(k + 1, k)] > 0.0 { -norm } else { norm };
        for item in v.iter_mut() {
            *item = 0.0;
        }
        v[k + 1] = a[(k + 1, k)] - alpha;
        for i in (k + 2)..n {
            v[i] = a[(i, k)];
        }
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }
        // A <- P A with P = I - 2 v v^T / (v^T v)
        for j in 0..n {
            let mut s = 0.0;
            for i in (k + 1)..n {
                s += v[i] * a[(i, j)];
            }
            let f = 2.0 * s / vtv;
            for i in (k + 1)..n {
                a[(i, j)] -= f * v[i];
            }
        }
        // A <- A P
        for i in 0..n {
            let mut s = 0.0;
            for j in (k + 1)..n {
                s += a[(i, j)] * v[j];
            }
            let f = 2.0 * s / vtv;
            for j in (k + 1)..n {
                a[(i, j)] -= f * v[j];
            }
        }
        a[(k + 1, k)] = alpha;
        for i in (k + 2)..n {
            a[(i, k)] = 0.0;
        }
    }
}

fn sign_of(magnitude: f64, template: f64) -> f64 {
    if template >= 0.0 {
        magnitude.abs()
    } else {
        -magnitude.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
fn francis_qr(h: &mut DenseMatrix) -> Result<Vec<ComplexValue>> {
    let n = h.rows();
    let eps = f64::EPSILON;
    let mut eigs: Vec<ComplexValue> = Vec::with_capacity(n);

    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += h[(i, j)].abs();
        }
    }

    let mut total_iterations = 0usize;
    let mut nn = n as isize - 1;
    let mut shift_accum = 0.0;
    'deflate: while nn >= 0 {
        let mut its = 0usize;
        loop {
            let nnu = nn as usize;
            // Look for a negligible subdiagonal element to split the block.
            let mut l = nnu;
            while l >= 1 {
                let mut s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if h[(l, l - 1)].abs() <= eps * s {
                    h[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = h[(nnu, nnu)];
            if l == nnu {
                // One real eigenvalue deflates.
                eigs.push(ComplexValue::new(x + shift_accum, 0.0));
                nn -= 1;
                continue 'deflate;
            }
            let y = h[(nnu - 1, nnu - 1)];
            let mut w = h[(nnu, nnu - 1)] * h[(nnu - 1, nnu)];
            if l == nnu - 1 {
                // 2x2 block deflates into a real or conjugate pair.
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += shift_accum;
                if q >= 0.0 {
                    z = p + sign_of(z, p);
                    let first = x + z;
                    let second = if z != 0.0 { x - w / z } else { first };
                    eigs.push(ComplexValue::new(first, 0.0));
                    eigs.push(ComplexValue::new(second, 0.0));
                } else {
                    eigs.push(ComplexValue::new(x + p, z));
                    eigs.push(ComplexValue::new(x + p, -z));
                }
                nn -= 2;
                continue 'deflate;
            }
            if its == MAX_ITERATIONS_PER_EIGENVALUE || total_iterations >= 30 * n {
                return Err(Error::NoConvergence {
                    algorithm: "Francis double-shift QR",
                    iterations: total_iterations,
                    residual: h[(nnu, nnu - 1)].abs(),
                    diagnostics: format!(
                        ", {} of {} eigenvalues deflated before stall",
                        eigs.len(),
                        n
                    ),
                });
            }
            let mut y = y;
            if its == 10 || its == 20 {
                // Exceptional shift to break symmetry-induced cycling.
                shift_accum += x;
                for i in 0..=nnu {
                    h[(i, i)] -= x;
                }
                let s = h[(nnu, nnu - 1)].abs() + h[(nnu - 1, nnu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total_iterations += 1;

            // Seek two consecutive small subdiagonals for the implicit start.
            let mut m = nnu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = h[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - rr - ss;
                r = h[(m + 2, m + 1)];
                let scale = p.abs() + q.abs() + r.abs();
                p /= scale;
                q /= scale;
                r /= scale;
                if m == l {
                    break;
                }
                let u = h[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nnu {
                h[(i, i - 2)] = 0.0;
                if i != m + 2 {
                    h[(i, i - 3)] = 0.0;
                }
            }

            // Double QR sweep over rows l..=nn.
            for k in m..nnu {
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if k != nnu - 1 { h[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign_of((p * p + q * q + r * r).sqrt(), p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                } else {
                    h[(k, k - 1)] = -s * x;
                }
                p += s;
                x = p / s;
                let yy = q / s;
                let zz = r / s;
                q /= p;
                r /= p;
                for j in k..=nnu {
                    let mut pp = h[(k, j)] + q * h[(k + 1, j)];
                    if k != nnu - 1 {
                        pp += r * h[(k + 2, j)];
                        h[(k + 2, j)] -= pp * zz;
                    }
                    h[(k + 1, j)] -= pp * yy;
                    h[(k, j)] -= pp * x;
                }
                let mmin = nnu.min(k + 3);
                for i in l..=mmin {
                    let mut pp = x * h[(i, k)] + yy * h[(i, k + 1)];
                    if k != nnu - 1 {
                        pp += zz * h[(i, k + 2)];
                        h[(i, k + 2)] -= pp * r;
                    }
                    h[(i, k + 1)] -= pp * q;
                    h[(i, k)] -= pp;
                }
            }
        }
    }
    Ok(eigs)
}

/// All eigenvalues of a real square matrix, with algebraic multiplicity,
/// sorted ascending by `(re, im)`.
///
/// Pipeline: balance, Hessenberg reduction, Francis double-shift QR.
/// Near-real values (`|im| <= 1e-9 * (1 + |re|)`) are snapped to the real
/// axis so real spectra yield clean verdicts.
pub fn gen_eigenvalues(a: &DenseMatrix) -> Result<Vec<ComplexValue>> {
    let n = a.require_square()?;
    if n == 0 {
        return Ok(Vec::new());
    }
    if !a.as_slice().iter().all(|x| x.is_finite()) {
        return Err(Error::NonFiniteEntry {
            context: "eigenvalue input",
        });
    }
    if n == 1 {
        return Ok(vec![ComplexValue::new(a[(0, 0)], 0.0)]);
    }
    let mut work = a.clone();
    balance(&mut work);
    hessenberg(&mut work);
    let mut eigs = francis_qr(&mut work)?;
    for z in eigs.iter_mut() {
        if z.im.abs() <= REAL_SNAP_TOL * (1.0 + z.re.abs()) {
            z.im = 0.0;
        }
    }
    sort_spectrum(&mut eigs);
    Ok(eigs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{sym_eigen, LuDecomposition};

    #[test]
    fn rotation_generator_is_pure_imaginary() {
        let a = DenseMatrix::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        let e = gen_eigenvalues(&a).unwrap();
        assert!((e[0].re).abs() < 1e-12 && (e[0].im + 1.0).abs() < 1e-12);
        assert!((e[1].re).abs() < 1e-12 && (e[1].im - 1.0).abs() < 1e-12);
    }

    #[test]
    fn known_2x2_real_pair() {
        // eig([[1,2],[3,4]]) = (5 +- sqrt(33)) / 2
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let e = gen_eigenvalues(&a).unwrap();
        let s = 33f64.sqrt();
        assert!((e[0].re - (5.0 - s) / 2.0).abs() < 1e-12);
        assert!((e[1].re - (5.0 + s) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn trace_and_det_invariants() {
        let a = DenseMatrix::from_rows(&[
            &[0.3, -1.2, 0.7, 2.0],
            &[1.5, 0.4, -0.6, 0.1],
            &[-0.8, 2.2, 1.1, -0.9],
            &[0.05, -0.3, 1.7, -2.4],
        ])
        .unwrap();
        let e = gen_eigenvalues(&a).unwrap();
        let sum: ComplexValue = e.iter().sum();
        assert!((sum.re - a.trace()).abs() < 1e-8 * (1.0 + a.trace().abs()));
        assert!(sum.im.abs() < 1e-9);
        let prod = e.iter().fold(ComplexValue::new(1.0, 0.0), |acc, z| acc * z);
        let det = LuDecomposition::new(&a).unwrap().det();
        assert!((prod.re - det).abs() < 1e-6 * (1.0 + det.abs()));
    }

    #[test]
    fn conjugate_pairs_are_exact() {
        let a = DenseMatrix::from_rows(&[
            &[0.0, 2.0, 0.0],
            &[-2.0, 0.0, 1.0],
            &[0.3, 0.0, -1.0],
        ])
        .unwrap();
        let e = gen_eigenvalues(&a).unwrap();
        let complex: Vec<_> = e.iter().filter(|z| z.im != 0.0).collect();
        assert_eq!(complex.len(), 2);
        assert_eq!(complex[0].re, complex[1].re);
        assert_eq!(complex[0].im, -complex[1].im);
    }

    #[test]
    fn agrees_with_jacobi_on_symmetric_input() {
        let a = DenseMatrix::from_rows(&[
            &[4.0, 1.0, -0.5],
            &[1.0, 3.0, 2.0],
            &[-0.5, 2.0, 1.0],
        ])
        .unwrap();
        let general = gen_eigenvalues(&a).unwrap();
        let sym = sym_eigen(&a).unwrap();
        for (g, s) in general.iter().zip(&sym.eigenvalues) {
            assert!(g.im == 0.0);
            assert!((g.re - s).abs() < 1e-10);
        }
    }

    #[test]
    fn multiple_eigenvalue_multiplicity() {
        let a = DenseMatrix::from_rows(&[
            &[2.0, 1.0, 0.0],
            &[0.0, 2.0, 0.0],
            &[0.0, 0.0, 5.0],
        ])
        .unwrap();
        let e = gen_eigenvalues(&a).unwrap();
        assert_eq!(e.len(), 3);
        assert!((e[0].re - 2.0).abs() < 1e-9);
        assert!((e[1].re - 2.0).abs() < 1e-9);
        assert!((e[2].re - 5.0).abs() < 1e-12);
    }
}
