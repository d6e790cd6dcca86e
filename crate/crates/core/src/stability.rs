//! Sufficient stability conditions, exact spectral verdicts, and
//! coupling-threshold search.
//!
//! The certificate has two halves, evaluated on the Laplacian eigenvector
//! basis `P` (first column of each per-layer block replaced by the exact
//! all-ones null vector, remaining columns scaled by a small constant `c`):
//!
//! * condition (a): the averaged reaction Jacobian is diagonally dominant
//!   with nonpositive diagonal, row margins `-a_pp - sum|a_pq| - eps >= 0`;
//! * condition (b): the network Fiedler value clears the Gershgorin bound
//!   `tau(c) = max over coupled rows s of (M_ss + sum_{t != s} |M_st|)`
//!   where `M = P^-1 Df(xbar) P`.
//!
//! Together they push every Gershgorin disc of `P^-1 (Df - L) P` into the
//! closed left half-plane, so the certificate is one-sided: when it holds
//! the equilibrium is locally stable, and when it fails the outcome is
//! "inconclusive", never "unstable". `tau` depends on the column scaling
//! `c` for heterogeneous patches (the rows carry `1/c`-scaled projections
//! of the patch-to-patch Jacobian variation), so reports always pin the `c`
//! used; sweeping `c` and keeping the smallest `tau` is supported.

use crate::assembly::{CoupledSystem, HomogeneousEquilibrium};
use crate::error::{Error, Result};
use crate::graph::{LaplacianSet, LayerEdge, FIEDLER_ZERO_TOL};
use crate::linalg::{
    direct_sum, gen_eigenvalues, similarity_transform, spectral_abscissa, sym_eigen,
    ComplexValue, DenseMatrix,
};

/// Default eigenvector column scaling for the similarity basis.
pub const DEFAULT_BASIS_SCALING: f64 = 1e-6;
/// Default dominance slack in condition (a).
pub const DEFAULT_EPSILON: f64 = 0.0;
/// Spectral abscissa band inside which the verdict is `Marginal`.
pub const VERDICT_TOL: f64 = 1e-9;
/// Scalings swept by `--sweep-scaling` style searches for the smallest tau.
pub const SWEEP_SCALINGS: [f64; 7] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];

/// Numerical-equality slack for weak (>=) comparisons; the certificate's own
/// worked cases sit exactly on the boundary, and round-off must not flip
/// them.
fn equality_slack(scale: f64) -> f64 {
    1e-12 * (1.0 + scale)
}

/// Similarity basis built from per-layer Laplacian eigenvectors.
#[derive(Debug, Clone)]
pub struct SimilarityBasis {
    /// Per-layer basis blocks, ones column first, remaining columns scaled.
    pub per_layer: Vec<DenseMatrix>,
    /// Per-layer Laplacian eigenvalues, non-decreasing.
    pub lambdas: Vec<Vec<f64>>,
    /// Column scaling applied to every non-first column.
    pub scaling: f64,
    /// Direct sum of the per-layer blocks.
    pub p: DenseMatrix,
}

/// Build the basis: per-layer eigenvectors sorted by ascending eigenvalue,
/// first column replaced by the exact all-ones vector, other columns scaled
/// by `c` (0 < c <= 1).
pub fn build_basis(laplacians: &LaplacianSet, c: f64) -> Result<SimilarityBasis> {
    if !(c.is_finite() && c > 0.0 && c <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "basis scaling must satisfy 0 < c <= 1, got {c}"
        )));
    }
    let m = laplacians.patch_count();
    let mut per_layer = Vec::with_capacity(laplacians.layer_count());
    let mut lambdas = Vec::with_capacity(laplacians.layer_count());
    for l in &laplacians.matrices {
        let spectrum = sym_eigen(l)?;
        let mut vectors = spectrum.eigenvectors;
        let values = spectrum.eigenvalues;

        // The ones vector lies in the null space. If the returned null basis
        // does not carry it in column 0 (possible for disconnected layers,
        // where the null space has dimension > 1), move the null column with
        // the largest ones-overlap to the front.
        let overlap = |col: usize| -> f64 { (0..m).map(|r| vectors[(r, col)]).sum() };
        if overlap(0).abs() < 1e-8 * (m as f64).sqrt() {
            let mut best = 0;
            let mut best_overlap = overlap(0).abs();
            for (j, &value) in values.iter().enumerate().skip(1) {
                if value > FIEDLER_ZERO_TOL {
                    break;
                }
                if overlap(j).abs() > best_overlap {
                    best_overlap = overlap(j).abs();
                    best = j;
                }
            }
            if best_overlap < 1e-8 * (m as f64).sqrt() {
                return Err(Error::DegenerateBasis {
                    reason: "null space carries no all-ones component".into(),
                });
            }
            if best != 0 {
                for r in 0..m {
                    let tmp = vectors[(r, 0)];
                    vectors[(r, 0)] = vectors[(r, best)];
                    vectors[(r, best)] = tmp;
                }
            }
        }
        let mut p = DenseMatrix::zeros(m, m);
        for r in 0..m {
            p[(r, 0)] = 1.0;
            for j in 1..m {
                p[(r, j)] = c * vectors[(r, j)];
            }
        }
        // Rank check up front so a degenerate basis fails here, not later
        // inside a solve.
        if crate::linalg::LuDecomposition::new(&p).is_err() {
            return Err(Error::DegenerateBasis {
                reason: "basis block is singular after the ones substitution".into(),
            });
        }
        per_layer.push(p);
        lambdas.push(values);
    }
    let p = direct_sum(&per_layer)?;
    Ok(SimilarityBasis {
        per_layer,
        lambdas,
        scaling: c,
        p,
    })
}

/// Condition (a) outcome: diagonal dominance of the averaged Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionA {
    pub holds: bool,
    pub epsilon: f64,
    /// Per-row margin `-a_pp - sum_{q != p} |a_pq| - eps`; nonnegative rows
    /// satisfy the condition (weak dominance accepted).
    pub row_margins: Vec<f64>,
}

/// Check diagonal dominance with nonpositive diagonal on the averaged
/// Jacobian. Rows sitting exactly on the boundary (margin 0, as happens for
/// ratio-dependent predator rows) count as holding.
pub fn check_condition_a(avg_j: &DenseMatrix, epsilon: f64) -> Result<ConditionA> {
    let n = avg_j.require_square()?;
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be finite and >= 0, got {epsilon}"
        )));
    }
    let slack = equality_slack(avg_j.norm_inf());
    let mut row_margins = Vec::with_capacity(n);
    let mut holds = true;
    for p in 0..n {
        let off: f64 = (0..n)
            .filter(|&q| q != p)
            .map(|q| avg_j[(p, q)].abs())
            .sum();
        let margin = -avg_j[(p, p)] - off - epsilon;
        if margin < -slack {
            holds = false;
        }
        row_margins.push(margin);
    }
    Ok(ConditionA {
        holds,
        epsilon,
        row_margins,
    })
}

/// Gershgorin bound for the coupled rows of `M = P^-1 Df(xbar) P`: the
/// maximum over all rows past each layer block's first (the rows whose
/// Laplacian eigenvalue is not pinned at zero) of
/// `M_ss + sum_{t != s} |M_st|`. Returns 0 for single-patch systems, which
/// have no coupled rows.
pub fn compute_tau(
    system: &CoupledSystem,
    equilibrium: &HomogeneousEquilibrium,
    basis: &SimilarityBasis,
) -> Result<f64> {
    let m = system.patch_count();
    let n = system.var_count();
    if m == 1 {
        return Ok(0.0);
    }
    let df = system.reaction_jacobian(&equilibrium.stacked)?;
    let transformed = similarity_transform(&df, &basis.p)?;
    let size = n * m;
    let mut tau = f64::NEG_INFINITY;
    for block in 0..n {
        for s in (block * m + 1)..((block + 1) * m) {
            let off: f64 = (0..size)
                .filter(|&t| t != s)
                .map(|t| transformed[(s, t)].abs())
                .sum();
            tau = tau.max(transformed[(s, s)] + off);
        }
    }
    Ok(tau)
}

/// Condition (b) outcome: Fiedler value versus the Gershgorin bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionB {
    pub holds: bool,
    pub lambda2: f64,
    pub tau: f64,
    pub scaling_c: f64,
}

/// Combined certificate outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub condition_a: ConditionA,
    pub condition_b: ConditionB,
    /// Both conditions hold: local stability is certified. When false the
    /// certificate is inconclusive; it never certifies instability.
    pub sufficient_stable: bool,
}

/// Evaluate both certificate conditions at the given equilibrium.
pub fn theorem_verdict(
    system: &CoupledSystem,
    equilibrium: &HomogeneousEquilibrium,
    epsilon: f64,
    c: f64,
) -> Result<ConditionReport> {
    let avg = system.average_jacobian(&equilibrium.stacked)?;
    let condition_a = check_condition_a(&avg, epsilon)?;
    let basis = build_basis(system.laplacians(), c)?;
    let tau = compute_tau(system, equilibrium, &basis)?;
    let lambda2 = system.laplacians().fiedler_min;
    let holds = lambda2 >= tau - equality_slack(tau.abs());
    let condition_b = ConditionB {
        holds,
        lambda2,
        tau,
        scaling_c: c,
    };
    let sufficient_stable = condition_a.holds && condition_b.holds;
    Ok(ConditionReport {
        condition_a,
        condition_b,
        sufficient_stable,
    })
}

/// Three-way spectral classification with a +-1e-9 marginal band, so
/// rotation-type modes that sit numerically on the axis are never called
/// stable or unstable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
    Marginal,
}

impl Verdict {
    pub fn from_abscissa(abscissa: f64) -> Verdict {
        if abscissa < -VERDICT_TOL {
            Verdict::Stable
        } else if abscissa > VERDICT_TOL {
            Verdict::Unstable
        } else {
            Verdict::Marginal
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::Marginal => "marginal",
        }
    }
}

/// Exact spectral outcome for the coupled Jacobian.
#[derive(Debug, Clone)]
pub struct SpectralOutcome {
    /// Eigenvalues sorted ascending by `(re, im)`.
    pub spectrum: Vec<ComplexValue>,
    pub abscissa: f64,
    pub verdict: Verdict,
}

/// Eigenvalues of `Df(xbar) - L` and the verdict they imply.
pub fn spectral_verdict(
    system: &CoupledSystem,
    equilibrium: &HomogeneousEquilibrium,
) -> Result<SpectralOutcome> {
    let jac = system.coupled_jacobian(&equilibrium.stacked)?;
    let spectrum = gen_eigenvalues(&jac)?;
    let abscissa = spectral_abscissa(&spectrum)?;
    Ok(SpectralOutcome {
        spectrum,
        abscissa,
        verdict: Verdict::from_abscissa(abscissa),
    })
}

/// Everything the analysis pipeline reports for one system.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub condition: ConditionReport,
    pub spectrum: Vec<ComplexValue>,
    pub abscissa: f64,
    pub spectral_verdict: Verdict,
    pub lambda2: f64,
    pub notes: Vec<String>,
}

/// Full analysis: certificate plus exact spectrum.
pub fn analyze(
    system: &CoupledSystem,
    equilibrium: &HomogeneousEquilibrium,
    epsilon: f64,
    c: f64,
) -> Result<StabilityReport> {
    let condition = theorem_verdict(system, equilibrium, epsilon, c)?;
    let outcome = spectral_verdict(system, equilibrium)?;
    let mut notes = Vec::new();
    for w in &equilibrium.warnings {
        notes.push(w.clone());
    }
    if condition.sufficient_stable {
        notes.push(format!(
            "certificate holds at c = {:.1e}: lambda2 = {:.6} >= tau = {:.6}",
            c, condition.condition_b.lambda2, condition.condition_b.tau
        ));
    } else {
        notes.push(format!(
            "certificate inconclusive at c = {:.1e} (tau = {:.6}); it never asserts instability",
            c, condition.condition_b.tau
        ));
    }
    Ok(StabilityReport {
        condition,
        spectrum: outcome.spectrum,
        abscissa: outcome.abscissa,
        spectral_verdict: outcome.verdict,
        lambda2: system.laplacians().fiedler_min,
        notes,
    })
}

/// Output of the coupling-threshold bisection.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdResult {
    /// Weight scale at which the spectral abscissa crosses zero.
    pub s_star: f64,
    /// Abscissa at `s_star` (within bisection resolution of zero).
    pub abscissa: f64,
    /// Network Fiedler value at `s_star`.
    pub lambda2: f64,
}

fn abscissa_at_scale(
    system: &CoupledSystem,
    equilibrium: &HomogeneousEquilibrium,
    s: f64,
) -> Result<f64> {
    let scaled = system.with_scaled_weights(s)?;
    let jac = scaled.coupled_jacobian(&equilibrium.stacked)?;
    spectral_abscissa(&gen_eigenvalues(&jac)?)
}

/// Bisect the weight scale `s` for the zero crossing of the coupled
/// spectral abscissa. Scaling all weights leaves `L xbar = 0` intact, so
/// the equilibrium stays valid along the whole sweep. Endpoints must
/// bracket a sign change; the bracket shrinks to width 1e-6.
pub fn coupling_threshold(
    system: &CoupledSystem,
    equilibrium: &HomogeneousEquilibrium,
    s_lo: f64,
    s_hi: f64,
) -> Result<ThresholdResult> {
    const WIDTH_TOL: f64 = 1e-6;
    if !(s_lo.is_finite() && s_hi.is_finite() && s_lo >= 0.0 && s_hi > s_lo) {
        return Err(Error::InvalidArgument(format!(
            "bracket must satisfy 0 <= s_lo < s_hi, got [{s_lo}, {s_hi}]"
        )));
    }
    let f_lo = abscissa_at_scale(system, equilibrium, s_lo)?;
    let f_hi = abscissa_at_scale(system, equilibrium, s_hi)?;
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::BracketSameSign {
            lo: s_lo,
            hi: s_hi,
            f_lo,
            f_hi,
        });
    }
    let (mut lo, mut hi, sign_lo) = (s_lo, s_hi, f_lo.signum());
    while hi - lo > WIDTH_TOL {
        let mid = 0.5 * (lo + hi);
        let f_mid = abscissa_at_scale(system, equilibrium, mid)?;
        if f_mid.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s_star = 0.5 * (lo + hi);
    let abscissa = abscissa_at_scale(system, equilibrium, s_star)?;
    let scaled = system.with_scaled_weights(s_star)?;
    Ok(ThresholdResult {
        s_star,
        abscissa,
        lambda2: scaled.laplacians().fiedler_min,
    })
}

/// Eigenvalue monotonicity under nonnegative edge additions: every sorted
/// eigenvalue of the augmented Laplacian must be at least the corresponding
/// eigenvalue of `l`, within 1e-10.
pub fn weyl_check(l: &DenseMatrix, added_edges: &[LayerEdge]) -> Result<bool> {
    let m = l.require_square()?;
    let mut augmented = l.clone();
    for e in added_edges {
        if e.u < 1 || e.u > m || e.v < 1 || e.v > m || e.u == e.v {
            return Err(Error::InvalidArgument(format!(
                "added edge ({}, {}) is not valid for a {m}-patch Laplacian",
                e.u, e.v
            )));
        }
        if !(e.weight.is_finite() && e.weight >= 0.0) {
            return Err(Error::NegativeWeight {
                layer: 0,
                u: e.u,
                v: e.v,
                weight: e.weight,
            });
        }
        let (i, j) = (e.u - 1, e.v - 1);
        augmented[(i, i)] += e.weight;
        augmented[(j, j)] += e.weight;
        augmented[(i, j)] -= e.weight;
        augmented[(j, i)] -= e.weight;
    }
    let base = sym_eigen(l)?.eigenvalues;
    let grown = sym_eigen(&augmented)?.eigenvalues;
    Ok(base
        .iter()
        .zip(&grown)
        .all(|(b, g)| *g >= *b - 1e-10))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{LaplacianSet, LayerEdge, LayeredNetwork};
    use crate::models::{CustomModel, PatchModel};
    use std::sync::Arc;

    fn example1_system(w23_prey: f64, w23_pred: f64) -> CoupledSystem {
        let models = vec![
            PatchModel::rosenzweig_macarthur(3.0 / 13.0, 0.1, 1.0 / 6.0).unwrap(),
            PatchModel::ratio_dependent(1.8, 1.8, 0.25).unwrap(),
            PatchModel::rosenzweig_macarthur(3.0 / 13.0, 0.1, 1.0 / 6.0).unwrap(),
        ];
        let layer = |w23| {
            vec![
                LayerEdge::new(1, 3, 0.1),
                LayerEdge::new(2, 3, w23),
            ]
        };
        let net = LayeredNetwork::new(3, vec![layer(w23_prey), layer(w23_pred)]).unwrap();
        CoupledSystem::new(models, net).unwrap()
    }

    #[test]
    fn condition_a_on_averaged_example_jacobian() {
        let avg = DenseMatrix::from_rows(&[
            &[-13.0 / 27.0, -8.0 / 27.0],
            &[1.0 / 27.0, -1.0 / 27.0],
        ])
        .unwrap();
        let report = check_condition_a(&avg, 0.0).unwrap();
        assert!(report.holds);
        // Row 2 sits exactly on the dominance boundary.
        assert!(report.row_margins[1].abs() <= 1e-14);
        assert!(report.row_margins[0] > 0.0);

        let strict = check_condition_a(&avg, 0.05).unwrap();
        assert!(!strict.holds);
        assert!((strict.row_margins[1] + 0.05).abs() <= 1e-14);
    }

    #[test]
    fn condition_a_trivial_cases() {
        let neg_identity = DenseMatrix::from_rows(&[&[-1.0, 0.0], &[0.0, -1.0]]).unwrap();
        assert!(check_condition_a(&neg_identity, 1.0).unwrap().holds);
        assert!(check_condition_a(&neg_identity, 0.5).unwrap().holds);
        let pos = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap();
        assert!(!check_condition_a(&pos, 0.0).unwrap().holds);
    }

    #[test]
    fn basis_for_two_patches_single_edge() {
        let net = LayeredNetwork::new(2, vec![vec![LayerEdge::new(1, 2, 0.7)]]).unwrap();
        let laps = LaplacianSet::build(&net).unwrap();
        let c = 0.01;
        let basis = build_basis(&laps, c).unwrap();
        let p = &basis.per_layer[0];
        // First column exact ones; second proportional to (1, -1) with norm c.
        assert_eq!(p[(0, 0)], 1.0);
        assert_eq!(p[(1, 0)], 1.0);
        assert!((p[(0, 1)] + p[(1, 1)]).abs() < 1e-12);
        let norm = (p[(0, 1)].powi(2) + p[(1, 1)].powi(2)).sqrt();
        assert!((norm - c).abs() < 1e-12);
        assert!(basis.lambdas[0][0].abs() < 1e-12);
        assert!((basis.lambdas[0][1] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn basis_first_inverse_row_is_uniform_average() {
        let sys = example1_system(1.0, 1.0);
        let basis = build_basis(sys.laplacians(), 1e-3).unwrap();
        for block in &basis.per_layer {
            let lu = crate::linalg::LuDecomposition::new(&block.transpose()).unwrap();
            // First row of P^-1 solves P^T z = e1.
            let z = lu.solve(&[1.0, 0.0, 0.0]).unwrap();
            for v in &z {
                assert!((v - 1.0 / 3.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn basis_diagonalizes_each_laplacian() {
        let sys = example1_system(0.1, 1.0);
        let basis = build_basis(sys.laplacians(), 1e-4).unwrap();
        for (block, (p, lam)) in basis
            .per_layer
            .iter()
            .zip(basis.lambdas.iter())
            .enumerate()
        {
            let l = &sys.laplacians().matrices[block];
            let t = similarity_transform(l, p).unwrap();
            for r in 0..3 {
                for c in 0..3 {
                    let expect = if r == c { lam[r] } else { 0.0 };
                    assert!(
                        (t[(r, c)] - expect).abs() < 1e-9,
                        "layer {block} entry ({r},{c})"
                    );
                }
            }
        }
    }

    #[test]
    fn tau_is_zero_for_zero_reaction() {
        let zero = PatchModel::custom(CustomModel {
            dim: 2,
            f: Arc::new(|_, out| {
                out[0] = 0.0;
                out[1] = 0.0;
            }),
            jacobian: Some(Arc::new(|_, j| {
                j[(0, 0)] = 0.0;
                j[(0, 1)] = 0.0;
                j[(1, 0)] = 0.0;
                j[(1, 1)] = 0.0;
            })),
        })
        .unwrap();
        let layer = vec![LayerEdge::new(1, 2, 1.0), LayerEdge::new(2, 3, 1.0)];
        let net = LayeredNetwork::new(3, vec![layer.clone(), layer]).unwrap();
        let sys = CoupledSystem::new(vec![zero.clone(), zero.clone(), zero], net).unwrap();
        let eq = sys.make_homogeneous_equilibrium(&[0.5, 0.5]).unwrap();
        let basis = build_basis(sys.laplacians(), 1e-6).unwrap();
        assert_eq!(compute_tau(&sys, &eq, &basis).unwrap(), 0.0);
    }

    #[test]
    fn tau_limit_for_identical_patches() {
        // Identical patches and identical layers: as c shrinks, tau tends to
        // the largest row bound of the patch Jacobian itself, here
        // max(-38/45 + 1/6, 0 + 1/90) = 1/90.
        let rm = PatchModel::rosenzweig_macarthur(3.0 / 13.0, 0.1, 1.0 / 6.0).unwrap();
        let layer = vec![LayerEdge::new(1, 3, 0.1), LayerEdge::new(2, 3, 1.0)];
        let net = LayeredNetwork::new(3, vec![layer.clone(), layer]).unwrap();
        let sys = CoupledSystem::new(vec![rm.clone(), rm.clone(), rm], net).unwrap();
        let eq = sys.make_homogeneous_equilibrium(&[0.2, 0.16]).unwrap();
        let mut previous_gap = f64::INFINITY;
        for c in [1e-2, 1e-4, 1e-6, 1e-8] {
            let basis = build_basis(sys.laplacians(), c).unwrap();
            let tau = compute_tau(&sys, &eq, &basis).unwrap();
            let gap = (tau - 1.0 / 90.0).abs();
            assert!(gap <= previous_gap + 1e-12, "tau not approaching limit at c={c}");
            previous_gap = gap;
        }
        let basis = build_basis(sys.laplacians(), 1e-8).unwrap();
        let tau = compute_tau(&sys, &eq, &basis).unwrap();
        assert!((tau - 1.0 / 90.0).abs() < 1e-6, "tau {tau}");
    }

    #[test]
    fn theorem_verdict_on_worked_example() {
        let sys = example1_system(1.0, 1.0);
        let eq = sys.make_homogeneous_equilibrium(&[0.2, 0.16]).unwrap();
        let report = theorem_verdict(&sys, &eq, 0.0, 1e-6).unwrap();
        assert!(report.condition_a.holds);
        assert!((report.condition_b.lambda2 - 0.1461).abs() < 5e-5);
        // Heterogeneous patches put 1/c-scaled variation into the coupled
        // rows, so tau blows up at small c and the certificate stays
        // inconclusive here; the exact spectrum (tested elsewhere) is stable.
        assert!(report.condition_b.tau > report.condition_b.lambda2);
        assert!(!report.sufficient_stable);
    }

    #[test]
    fn decoupled_network_fails_condition_b() {
        let rm = PatchModel::rosenzweig_macarthur(3.0 / 13.0, 0.1, 1.0 / 6.0).unwrap();
        let net = LayeredNetwork::new(3, vec![vec![], vec![]]).unwrap();
        let sys = CoupledSystem::new(vec![rm.clone(), rm.clone(), rm], net).unwrap();
        let eq = sys.make_homogeneous_equilibrium(&[0.2, 0.16]).unwrap();
        let report = theorem_verdict(&sys, &eq, 0.0, 1e-6).unwrap();
        assert_eq!(report.condition_b.lambda2, 0.0);
        // tau -> 1/90 > 0 = lambda2, so the condition fails.
        assert!(!report.condition_b.holds);
        assert!(!report.sufficient_stable);
    }

    #[test]
    fn certified_stability_for_dominant_identical_patches() {
        // Strictly dominant negative-diagonal patch Jacobian, identical
        // patches, strong coupling: both conditions hold and the spectrum
        // is stable.
        let a = [[-2.0, 0.5], [0.3, -1.5]];
        let model = PatchModel::custom(CustomModel {
            dim: 2,
            f: Arc::new(move |x, out| {
                out[0] = a[0][0] * x[0] + a[0][1] * x[1];
                out[1] = a[1][0] * x[0] + a[1][1] * x[1];
            }),
            jacobian: Some(Arc::new(move |_, j| {
                j[(0, 0)] = a[0][0];
                j[(0, 1)] = a[0][1];
                j[(1, 0)] = a[1][0];
                j[(1, 1)] = a[1][1];
            })),
        })
        .unwrap();
        let layer = vec![
            LayerEdge::new(1, 2, 3.0),
            LayerEdge::new(2, 3, 3.0),
            LayerEdge::new(1, 3, 3.0),
        ];
        let net = LayeredNetwork::new(3, vec![layer.clone(), layer]).unwrap();
        let sys =
            CoupledSystem::new(vec![model.clone(), model.clone(), model], net).unwrap();
        let eq = sys.make_homogeneous_equilibrium(&[0.0, 0.0]).unwrap();
        let report = theorem_verdict(&sys, &eq, 0.0, 1e-6).unwrap();
        assert!(report.condition_a.holds);
        assert!(report.condition_b.holds, "tau = {}", report.condition_b.tau);
        assert!(report.sufficient_stable);
        let outcome = spectral_verdict(&sys, &eq).unwrap();
        assert_eq!(outcome.verdict, Verdict::Stable);
    }

    #[test]
    fn verdict_band() {
        assert_eq!(Verdict::from_abscissa(-1e-3), Verdict::Stable);
        assert_eq!(Verdict::from_abscissa(1e-3), Verdict::Unstable);
        assert_eq!(Verdict::from_abscissa(0.0), Verdict::Marginal);
        assert_eq!(Verdict::from_abscissa(5e-10), Verdict::Marginal);
        assert_eq!(Verdict::from_abscissa(-5e-10), Verdict::Marginal);
    }

    #[test]
    fn weyl_trivial_and_strict_cases() {
        let sys = example1_system(0.1, 1.0);
        let l = &sys.laplacians().matrices[0];
        assert!(weyl_check(l, &[]).unwrap());
        assert!(weyl_check(l, &[LayerEdge::new(1, 2, 1.0)]).unwrap());
        // Adding (1,2) strictly increases the Fiedler value here.
        let before = sym_eigen(l).unwrap().eigenvalues[1];
        let mut grown = l.clone();
        grown[(0, 0)] += 1.0;
        grown[(1, 1)] += 1.0;
        grown[(0, 1)] -= 1.0;
        grown[(1, 0)] -= 1.0;
        let after = sym_eigen(&grown).unwrap().eigenvalues[1];
        assert!(after > before + 1e-6);
    }

    #[test]
    fn threshold_on_heterogeneous_linear_patches() {
        // Two one-variable patches x' = a_k x - s L x with a = (1, -3) and a
        // unit edge: det(diag(a) - sL) = a1 a2 - s w (a1 + a2) crosses zero
        // at s* = a1 a2 / (w (a1 + a2)) = 1.5, where the abscissa changes
        // sign.
        let mk = |a: f64| {
            PatchModel::custom(CustomModel {
                dim: 1,
                f: Arc::new(move |x, out| out[0] = a * x[0]),
                jacobian: Some(Arc::new(move |_, j| j[(0, 0)] = a)),
            })
            .unwrap()
        };
        let net = LayeredNetwork::new(2, vec![vec![LayerEdge::new(1, 2, 1.0)]]).unwrap();
        let sys = CoupledSystem::new(vec![mk(1.0), mk(-3.0)], net).unwrap();
        let eq = sys.make_homogeneous_equilibrium(&[0.0]).unwrap();
        let result = coupling_threshold(&sys, &eq, 0.5, 4.0).unwrap();
        assert!((result.s_star - 1.5).abs() < 1e-6, "s* = {}", result.s_star);
        assert!(result.abscissa.abs() < 1e-5);
    }

    #[test]
    fn threshold_rejects_same_sign_bracket() {
        let sys = example1_system(1.0, 1.0);
        let eq = sys.make_homogeneous_equilibrium(&[0.2, 0.16]).unwrap();
        // Stable at both endpoints.
        let err = coupling_threshold(&sys, &eq, 1.0, 2.0).unwrap_err();
        assert!(matches!(err, Error::BracketSameSign { .. }));
    }
}
