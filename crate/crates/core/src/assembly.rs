//! Coupling patch models over a layered network into one stacked system.
//!
//! The stacked state orders one variable at a time across all patches:
//! position of (variable `i`, patch `j`) is `(i-1)*m + (j-1)`, so the full
//! vector reads `(x_{1,1}, ..., x_{1,m}, x_{2,1}, ..., x_{n,m})`. In that
//! order the coupled dynamics are `x' = f(x) - L x` with
//! `L = L_1 (+) ... (+) L_n` the direct sum of the per-layer Laplacians, and
//! the reaction Jacobian `Df` decomposes into n x n blocks of m x m diagonal
//! matrices (patch dynamics never read other patches' states).

use crate::error::{Error, Result};
use crate::graph::{LaplacianSet, LayeredNetwork};
use crate::linalg::{direct_sum, DenseMatrix};
use crate::models::PatchModel;

/// Residual tolerance on `max_j |f_j(xbar)|` for an accepted equilibrium.
pub const EQUILIBRIUM_F_TOL: f64 = 1e-10;
/// Residual tolerance on `|L xbar|` for an accepted equilibrium.
pub const EQUILIBRIUM_L_TOL: f64 = 1e-12;

/// Flat position of (variable `i`, patch `j`) in the stacked vector;
/// both indices 1-based, result 0-based.
pub fn stack_index(i: usize, j: usize, m: usize) -> Result<usize> {
    if i < 1 {
        return Err(Error::IndexOutOfRange {
            context: "variable index",
            value: i,
            max: usize::MAX,
        });
    }
    if j < 1 || j > m {
        return Err(Error::IndexOutOfRange {
            context: "patch index",
            value: j,
            max: m,
        });
    }
    Ok((i - 1) * m + (j - 1))
}

/// `m` patch models coupled over an `n`-layer network, with the Laplacians
/// cached at construction. Immutable afterwards; evaluations are pure.
#[derive(Debug, Clone)]
pub struct CoupledSystem {
    models: Vec<PatchModel>,
    network: LayeredNetwork,
    laplacians: LaplacianSet,
}

impl CoupledSystem {
    pub fn new(models: Vec<PatchModel>, network: LayeredNetwork) -> Result<Self> {
        if models.len() != network.patch_count() {
            return Err(Error::DimensionMismatch {
                context: "model count vs patch count",
                expected: network.patch_count(),
                actual: models.len(),
            });
        }
        let n = network.layer_count();
        for (j, model) in models.iter().enumerate() {
            if model.dim() != n {
                return Err(Error::DimensionMismatch {
                    context: "model dimension vs layer count",
                    expected: n,
                    actual: model.dim(),
                }
                .at_patch(j + 1));
            }
        }
        let laplacians = LaplacianSet::build(&network)?;
        Ok(Self {
            models,
            network,
            laplacians,
        })
    }

    pub fn patch_count(&self) -> usize {
        self.network.patch_count()
    }

    pub fn var_count(&self) -> usize {
        self.network.layer_count()
    }

    /// Length of the stacked state vector, `n * m`.
    pub fn stacked_len(&self) -> usize {
        self.patch_count() * self.var_count()
    }

    pub fn models(&self) -> &[PatchModel] {
        &self.models
    }

    pub fn network(&self) -> &LayeredNetwork {
        &self.network
    }

    pub fn laplacians(&self) -> &LaplacianSet {
        &self.laplacians
    }

    /// Same models on the network with all weights scaled by `s`.
    pub fn with_scaled_weights(&self, s: f64) -> Result<CoupledSystem> {
        CoupledSystem::new(self.models.clone(), self.network.scale_weights(s)?)
    }

    fn check_stacked(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.stacked_len() {
            return Err(Error::DimensionMismatch {
                context: "stacked state length",
                expected: self.stacked_len(),
                actual: x.len(),
            });
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteEntry {
                context: "stacked state",
            });
        }
        Ok(())
    }

    /// Extract patch `j`'s (1-based) local state from a stacked vector.
    fn patch_state(&self, x: &[f64], j: usize) -> Vec<f64> {
        let m = self.patch_count();
        (1..=self.var_count()).map(|i| x[(i - 1) * m + (j - 1)]).collect()
    }

    /// The full `nm x nm` coupling matrix: direct sum of the per-layer
    /// Laplacians in variable order.
    pub fn assemble_block_laplacian(&self) -> DenseMatrix {
        direct_sum(&self.laplacians.matrices).expect("cached Laplacians are square")
    }

    /// Coupled right-hand side: stacked per-patch reactions minus `L x`.
    pub fn eval_coupled_f(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_stacked(x)?;
        let (m, n) = (self.patch_count(), self.var_count());
        let mut out = vec![0.0; n * m];
        for j in 1..=m {
            let local = self.patch_state(x, j);
            let f = self.models[j - 1]
                .eval_f(&local)
                .map_err(|e| e.at_patch(j))?;
            for i in 1..=n {
                out[(i - 1) * m + (j - 1)] = f[i - 1];
            }
        }
        for (i, l) in self.laplacians.matrices.iter().enumerate() {
            let seg = &x[i * m..(i + 1) * m];
            let lx = l.matvec(seg)?;
            for j in 0..m {
                out[i * m + j] -= lx[j];
            }
        }
        Ok(out)
    }

    /// Same right-hand side evaluated straight from the edge list,
    /// `x'_{i,j} = f_{i,j}(x_j) - sum_{k~j} w^i_{jk} (x_{i,j} - x_{i,k})`.
    /// Kept as an independent twin of [`Self::eval_coupled_f`]; the two are
    /// cross-checked in tests and must stay separate routes.
    pub fn eval_coupled_f_direct(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_stacked(x)?;
        let (m, n) = (self.patch_count(), self.var_count());
        let mut out = vec![0.0; n * m];
        for j in 1..=m {
            let local = self.patch_state(x, j);
            let f = self.models[j - 1]
                .eval_f(&local)
                .map_err(|e| e.at_patch(j))?;
            for i in 1..=n {
                out[(i - 1) * m + (j - 1)] = f[i - 1];
            }
        }
        for i in 1..=n {
            for e in self.network.edges(i)? {
                let (a, b) = (
                    (i - 1) * m + (e.u - 1),
                    (i - 1) * m + (e.v - 1),
                );
                out[a] -= e.weight * (x[a] - x[b]);
                out[b] -= e.weight * (x[b] - x[a]);
            }
        }
        Ok(out)
    }

    /// Reaction Jacobian `Df(x)` alone: n x n blocks of m x m diagonal
    /// matrices, block `(p,q)` holding `d(f_{p,k})/d(x_{q,k})` per patch `k`.
    pub fn reaction_jacobian(&self, x: &[f64]) -> Result<DenseMatrix> {
        self.check_stacked(x)?;
        let (m, n) = (self.patch_count(), self.var_count());
        let mut a = DenseMatrix::zeros(n * m, n * m);
        for j in 1..=m {
            let local = self.patch_state(x, j);
            let jac = self.models[j - 1]
                .eval_jacobian(&local)
                .map_err(|e| e.at_patch(j))?;
            for p in 0..n {
                for q in 0..n {
                    a[(p * m + (j - 1), q * m + (j - 1))] = jac[(p, q)];
                }
            }
        }
        Ok(a)
    }

    /// Jacobian of the coupled system, `Df(x) - L`.
    pub fn coupled_jacobian(&self, x: &[f64]) -> Result<DenseMatrix> {
        let mut a = self.reaction_jacobian(x)?;
        let m = self.patch_count();
        for (i, l) in self.laplacians.matrices.iter().enumerate() {
            for r in 0..m {
                for c in 0..m {
                    a[(i * m + r, i * m + c)] -= l[(r, c)];
                }
            }
        }
        Ok(a)
    }

    /// Average of the per-patch reaction Jacobians, an `n x n` matrix with
    /// entries `(1/m) sum_k d(f_{p,k}) / d(x_{q,k})`. The diagonal-dominance
    /// certificate reads this matrix.
    pub fn average_jacobian(&self, x: &[f64]) -> Result<DenseMatrix> {
        self.check_stacked(x)?;
        let (m, n) = (self.patch_count(), self.var_count());
        let mut avg = DenseMatrix::zeros(n, n);
        for j in 1..=m {
            let local = self.patch_state(x, j);
            let jac = self.models[j - 1]
                .eval_jacobian(&local)
                .map_err(|e| e.at_patch(j))?;
            for p in 0..n {
                for q in 0..n {
                    avg[(p, q)] += jac[(p, q)];
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                avg[(p, q)] /= m as f64;
            }
        }
        Ok(avg)
    }

    /// Verify that one shared per-patch state annihilates every patch's
    /// reaction term, and build the replicated stacked equilibrium.
    ///
    /// Fails when `max_j |f_j(xbar)| > 1e-10` (reporting the worst patch) or
    /// `|L xbar| > 1e-12`. Nonpositive components produce warnings, not
    /// errors.
    pub fn make_homogeneous_equilibrium(
        &self,
        per_patch: &[f64],
    ) -> Result<HomogeneousEquilibrium> {
        let (m, n) = (self.patch_count(), self.var_count());
        if per_patch.len() != n {
            return Err(Error::DimensionMismatch {
                context: "per-patch equilibrium length",
                expected: n,
                actual: per_patch.len(),
            });
        }
        if !per_patch.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteEntry {
                context: "per-patch equilibrium",
            });
        }
        let mut residual_f = 0.0;
        let mut worst_patch = 1;
        for j in 1..=m {
            let f = self.models[j - 1]
                .eval_f(per_patch)
                .map_err(|e| e.at_patch(j))?;
            let r = f.iter().map(|v| v.abs()).fold(0.0, f64::max);
            if r > residual_f {
                residual_f = r;
                worst_patch = j;
            }
        }
        if residual_f > EQUILIBRIUM_F_TOL {
            return Err(Error::ResidualTooLarge {
                context: format!("reaction term of patch {worst_patch}"),
                residual: residual_f,
                tolerance: EQUILIBRIUM_F_TOL,
            });
        }
        let mut stacked = vec![0.0; n * m];
        for i in 1..=n {
            for j in 1..=m {
                stacked[(i - 1) * m + (j - 1)] = per_patch[i - 1];
            }
        }
        let l = self.assemble_block_laplacian();
        let lx = l.matvec(&stacked)?;
        let residual_l = lx.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if residual_l > EQUILIBRIUM_L_TOL {
            return Err(Error::ResidualTooLarge {
                context: "coupling term L*xbar".into(),
                residual: residual_l,
                tolerance: EQUILIBRIUM_L_TOL,
            });
        }
        let mut warnings = Vec::new();
        for (i, v) in per_patch.iter().enumerate() {
            if *v <= 0.0 {
                warnings.push(format!(
                    "equilibrium component x{} = {v:.6e} is not positive",
                    i + 1
                ));
            }
        }
        Ok(HomogeneousEquilibrium {
            per_patch: per_patch.to_vec(),
            stacked,
            residual_f,
            residual_l,
            warnings,
        })
    }
}

/// A verified homogeneous equilibrium: every patch sits at the same local
/// state, so the diffusion term vanishes identically.
#[derive(Debug, Clone)]
pub struct HomogeneousEquilibrium {
    pub per_patch: Vec<f64>,
    pub stacked: Vec<f64>,
    pub residual_f: f64,
    pub residual_l: f64,
    pub warnings: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::LayerEdge;
    use crate::models::CustomModel;
    use std::sync::Arc;

    fn example1_models() -> Vec<PatchModel> {
        vec![
            PatchModel::rosenzweig_macarthur(3.0 / 13.0, 0.1, 1.0 / 6.0).unwrap(),
            PatchModel::ratio_dependent(1.8, 1.8, 0.25).unwrap(),
            PatchModel::rosenzweig_macarthur(3.0 / 13.0, 0.1, 1.0 / 6.0).unwrap(),
        ]
    }

    fn example1_network(w23_prey: f64, w23_pred: f64) -> LayeredNetwork {
        let layer = |w23| {
            vec![
                LayerEdge::new(1, 2, 0.0),
                LayerEdge::new(1, 3, 0.1),
                LayerEdge::new(2, 3, w23),
            ]
        };
        LayeredNetwork::new(3, vec![layer(w23_prey), layer(w23_pred)]).unwrap()
    }

    pub(crate) fn example1_set1() -> CoupledSystem {
        CoupledSystem::new(example1_models(), example1_network(1.0, 1.0)).unwrap()
    }

    #[test]
    fn stack_index_layout() {
        assert_eq!(stack_index(1, 1, 3).unwrap(), 0);
        assert_eq!(stack_index(2, 1, 3).unwrap(), 3);
        assert_eq!(stack_index(2, 5, 5).unwrap(), 9);
        assert!(stack_index(1, 0, 3).is_err());
        assert!(stack_index(0, 1, 3).is_err());
        assert!(stack_index(1, 4, 3).is_err());
    }

    #[test]
    fn block_laplacian_matches_displayed_matrix() {
        let sys = example1_set1();
        let l = sys.assemble_block_laplacian();
        let expect = DenseMatrix::from_rows(&[
            &[0.1, 0.0, -0.1, 0.0, 0.0, 0.0],
            &[0.0, 1.0, -1.0, 0.0, 0.0, 0.0],
            &[-0.1, -1.0, 1.1, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.1, 0.0, -0.1],
            &[0.0, 0.0, 0.0, 0.0, 1.0, -1.0],
            &[0.0, 0.0, 0.0, -0.1, -1.0, 1.1],
        ])
        .unwrap();
        assert_eq!(l, expect);
    }

    #[test]
    fn single_layer_block_laplacian_is_the_layer() {
        let model = PatchModel::custom(CustomModel {
            dim: 1,
            f: Arc::new(|x, out| out[0] = -x[0]),
            jacobian: None,
        })
        .unwrap();
        let net =
            LayeredNetwork::new(2, vec![vec![LayerEdge::new(1, 2, 0.4)]]).unwrap();
        let sys = CoupledSystem::new(vec![model.clone(), model], net).unwrap();
        let l = sys.assemble_block_laplacian();
        assert_eq!(l, sys.network().build_laplacian(1).unwrap());
    }

    #[test]
    fn coupled_rhs_vanishes_at_homogeneous_equilibrium() {
        let sys = example1_set1();
        let x = [0.2, 0.2, 0.2, 0.16, 0.16, 0.16];
        let f = sys.eval_coupled_f(&x).unwrap();
        assert!(f.iter().all(|v| v.abs() <= 1e-12), "residual {f:?}");
    }

    #[test]
    fn both_rhs_routes_agree() {
        let sys = example1_set1();
        let x = [0.23, 0.18, 0.31, 0.12, 0.2, 0.15];
        let a = sys.eval_coupled_f(&x).unwrap();
        let b = sys.eval_coupled_f_direct(&x).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() <= 1e-12);
        }
    }

    #[test]
    fn coupled_jacobian_matches_finite_differences() {
        let sys = example1_set1();
        let x = [0.23, 0.18, 0.31, 0.12, 0.2, 0.15];
        let jac = sys.coupled_jacobian(&x).unwrap();
        let h = 1e-6;
        for q in 0..6 {
            let mut xp = x;
            let mut xm = x;
            xp[q] += h;
            xm[q] -= h;
            let fp = sys.eval_coupled_f(&xp).unwrap();
            let fm = sys.eval_coupled_f(&xm).unwrap();
            for p in 0..6 {
                let fd = (fp[p] - fm[p]) / (2.0 * h);
                assert!(
                    (jac[(p, q)] - fd).abs() < 1e-6,
                    "entry ({p},{q}): {} vs {fd}",
                    jac[(p, q)]
                );
            }
        }
    }

    #[test]
    fn off_diagonal_blocks_are_diagonal() {
        let sys = example1_set1();
        let x = [0.2, 0.2, 0.2, 0.16, 0.16, 0.16];
        let jac = sys.coupled_jacobian(&x).unwrap();
        let l = sys.assemble_block_laplacian();
        // Reaction part = jac + L; its off-diagonal blocks must be diagonal.
        let m = 3;
        for p in 0..2 {
            for q in 0..2 {
                if p == q {
                    continue;
                }
                for r in 0..m {
                    for c in 0..m {
                        if r != c {
                            let v = jac[(p * m + r, q * m + c)] + l[(p * m + r, q * m + c)];
                            assert_eq!(v, 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn zero_weights_leave_block_diagonal_of_patch_jacobians() {
        let sys = CoupledSystem::new(example1_models(), example1_network(0.0, 0.0).scale_weights(0.0).unwrap())
            .unwrap();
        let x = [0.2, 0.2, 0.2, 0.16, 0.16, 0.16];
        let jac = sys.coupled_jacobian(&x).unwrap();
        // With L = 0 every entry is a patch-Jacobian entry or zero.
        let j1 = sys.models()[0].eval_jacobian(&[0.2, 0.16]).unwrap();
        assert_eq!(jac[(0, 0)], j1[(0, 0)]);
        assert_eq!(jac[(0, 3)], j1[(0, 1)]);
        assert_eq!(jac[(3, 0)], j1[(1, 0)]);
        assert_eq!(jac[(3, 3)], j1[(1, 1)]);
    }

    #[test]
    fn average_jacobian_of_example1() {
        let sys = example1_set1();
        let x = [0.2, 0.2, 0.2, 0.16, 0.16, 0.16];
        let avg = sys.average_jacobian(&x).unwrap();
        assert!((avg[(0, 0)] + 13.0 / 27.0).abs() <= 1e-14);
        assert!((avg[(0, 1)] + 8.0 / 27.0).abs() <= 1e-14);
        assert!((avg[(1, 0)] - 1.0 / 27.0).abs() <= 1e-14);
        assert!((avg[(1, 1)] + 1.0 / 27.0).abs() <= 1e-14);
    }

    #[test]
    fn average_jacobian_of_identical_patches_is_the_patch_jacobian() {
        let rm = PatchModel::rosenzweig_macarthur(3.0 / 13.0, 0.1, 1.0 / 6.0).unwrap();
        let sys = CoupledSystem::new(
            vec![rm.clone(), rm.clone(), rm.clone()],
            example1_network(1.0, 1.0),
        )
        .unwrap();
        let x = [0.2, 0.2, 0.2, 0.16, 0.16, 0.16];
        let avg = sys.average_jacobian(&x).unwrap();
        let j = rm.eval_jacobian(&[0.2, 0.16]).unwrap();
        for p in 0..2 {
            for q in 0..2 {
                assert!((avg[(p, q)] - j[(p, q)]).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn homogeneous_equilibrium_accepts_and_rejects() {
        let sys = example1_set1();
        let eq = sys.make_homogeneous_equilibrium(&[0.2, 0.16]).unwrap();
        assert!(eq.residual_f <= 1e-14);
        assert!(eq.residual_l <= 1e-12);
        assert_eq!(eq.stacked, vec![0.2, 0.2, 0.2, 0.16, 0.16, 0.16]);
        assert!(eq.warnings.is_empty());

        let err = sys.make_homogeneous_equilibrium(&[0.3, 0.16]).unwrap_err();
        match err {
            Error::ResidualTooLarge { residual, .. } => {
                assert!(residual > 0.04, "residual {residual}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn domain_violations_name_the_patch() {
        let sys = example1_set1();
        // Patch 2 is ratio-dependent; x1 + x2 = 0 there.
        let x = [0.2, 0.0, 0.2, 0.16, 0.0, 0.16];
        let err = sys.eval_coupled_f(&x).unwrap_err();
        match err {
            Error::Patch { patch, .. } => assert_eq!(patch, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn dimension_validation_at_construction() {
        let models = example1_models();
        let net = LayeredNetwork::new(2, vec![vec![LayerEdge::new(1, 2, 1.0)]]).unwrap();
        assert!(CoupledSystem::new(models, net).is_err());
    }
}
