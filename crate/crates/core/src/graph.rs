//! Multi-layer weighted undirected patch networks and their Laplacians.
//!
//! A network couples `m` patches through `n` layers, one layer per state
//! variable (prey and predators may disperse over different graphs). Each
//! layer's Laplacian is `L = D - A`: symmetric, positive semidefinite, zero
//! row sums. The second-smallest eigenvalue (Fiedler value, algebraic
//! connectivity) is positive exactly when the layer is connected; the
//! network-level value is the minimum across layers.

use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, DenseMatrix};

/// Tolerance below which a Fiedler value counts as zero (disconnected).
pub const FIEDLER_ZERO_TOL: f64 = 1e-10;

/// One undirected weighted edge inside a layer. Patch indices are 1-based,
/// matching the patch numbering used in scenario files; `(u, v)` and
/// `(v, u)` denote the same edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerEdge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

impl LayerEdge {
    pub fn new(u: usize, v: usize, weight: f64) -> Self {
        Self { u, v, weight }
    }

    fn unordered(&self) -> (usize, usize) {
        (self.u.min(self.v), self.u.max(self.v))
    }
}

/// `m` patches coupled by `n` layers of undirected weighted edges.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredNetwork {
    m: usize,
    layers: Vec<Vec<LayerEdge>>,
}

impl LayeredNetwork {
    /// Validate and build. Rejects out-of-range endpoints, self-loops,
    /// negative weights, and duplicate edges for an unordered pair within a
    /// layer (silent summing would hide configuration bugs).
    pub fn new(m: usize, layers: Vec<Vec<LayerEdge>>) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidArgument("patch count must be >= 1".into()));
        }
        if layers.is_empty() {
            return Err(Error::InvalidArgument("layer count must be >= 1".into()));
        }
        for (li, layer) in layers.iter().enumerate() {
            let layer_no = li + 1;
            let mut seen = std::collections::HashSet::new();
            for e in layer {
                if e.u == e.v {
                    return Err(Error::SelfLoop {
                        layer: layer_no,
                        u: e.u,
                    });
                }
                for endpoint in [e.u, e.v] {
                    if endpoint < 1 || endpoint > m {
                        return Err(Error::IndexOutOfRange {
                            context: "edge endpoint",
                            value: endpoint,
                            max: m,
                        });
                    }
                }
                if !(e.weight.is_finite() && e.weight >= 0.0) {
                    return Err(Error::NegativeWeight {
                        layer: layer_no,
                        u: e.u,
                        v: e.v,
                        weight: e.weight,
                    });
                }
                if !seen.insert(e.unordered()) {
                    return Err(Error::DuplicateEdge {
                        layer: layer_no,
                        u: e.u,
                        v: e.v,
                    });
                }
            }
        }
        Ok(Self { m, layers })
    }

    pub fn patch_count(&self) -> usize {
        self.m
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// Edges of a layer (1-based layer index).
    pub fn edges(&self, layer: usize) -> Result<&[LayerEdge]> {
        self.check_layer(layer)?;
        Ok(&self.layers[layer - 1])
    }

    fn check_layer(&self, layer: usize) -> Result<()> {
        if layer < 1 || layer > self.layers.len() {
            return Err(Error::IndexOutOfRange {
                context: "layer index",
                value: layer,
                max: self.layers.len(),
            });
        }
        Ok(())
    }

    /// Graph Laplacian `L = D - A` of one layer (1-based index).
    /// Zero-weight edges are treated as absent.
    pub fn build_laplacian(&self, layer: usize) -> Result<DenseMatrix> {
        self.check_layer(layer)?;
        let mut l = DenseMatrix::zeros(self.m, self.m);
        for e in &self.layers[layer - 1] {
            if e.weight == 0.0 {
                continue;
            }
            let (i, j) = (e.u - 1, e.v - 1);
            l[(i, i)] += e.weight;
            l[(j, j)] += e.weight;
            l[(i, j)] -= e.weight;
            l[(j, i)] -= e.weight;
        }
        Ok(l)
    }

    /// True when all `m` patches form a single component through
    /// positive-weight edges of the layer. Union-find; independent of the
    /// spectral route, which it cross-checks in tests.
    pub fn is_connected(&self, layer: usize) -> Result<bool> {
        self.check_layer(layer)?;
        let mut parent: Vec<usize> = (0..self.m).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &self.layers[layer - 1] {
            if e.weight > 0.0 {
                let (a, b) = (find(&mut parent, e.u - 1), find(&mut parent, e.v - 1));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let root = find(&mut parent, 0);
        Ok((0..self.m).all(|i| find(&mut parent, i) == root))
    }

    /// New network with every edge weight multiplied by `s >= 0`; every
    /// Laplacian eigenvalue scales by the same factor.
    pub fn scale_weights(&self, s: f64) -> Result<LayeredNetwork> {
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "weight scale must be finite and >= 0, got {s}"
            )));
        }
        let layers = self
            .layers
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .map(|e| LayerEdge::new(e.u, e.v, e.weight * s))
                    .collect()
            })
            .collect();
        LayeredNetwork::new(self.m, layers)
    }
}

/// Per-layer Laplacians with their Fiedler values and the network-level
/// minimum.
#[derive(Debug, Clone)]
pub struct LaplacianSet {
    pub matrices: Vec<DenseMatrix>,
    pub fiedler_per_layer: Vec<f64>,
    pub fiedler_min: f64,
}

impl LaplacianSet {
    pub fn build(network: &LayeredNetwork) -> Result<Self> {
        let mut matrices = Vec::with_capacity(network.layer_count());
        let mut fiedler_per_layer = Vec::with_capacity(network.layer_count());
        for layer in 1..=network.layer_count() {
            let l = network.build_laplacian(layer)?;
            fiedler_per_layer.push(fiedler_value(&l)?);
            matrices.push(l);
        }
        let fiedler_min = network_min(&fiedler_per_layer);
        Ok(Self {
            matrices,
            fiedler_per_layer,
            fiedler_min,
        })
    }

    pub fn layer_count(&self) -> usize {
        self.matrices.len()
    }

    pub fn patch_count(&self) -> usize {
        self.matrices.first().map_or(0, |m| m.rows())
    }
}

fn network_min(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Validate Laplacian structure: symmetry, zero row sums, signs, and (after
/// the eigensolve) positive semidefiniteness.
fn validate_laplacian(l: &DenseMatrix) -> Result<usize> {
    let m = l.require_square().map_err(|_| Error::InvalidLaplacian {
        reason: format!("matrix is {}x{}, not square", l.rows(), l.cols()),
    })?;
    let scale = 1.0 + l.norm_inf();
    if l.asymmetry() > 1e-12 * scale {
        return Err(Error::InvalidLaplacian {
            reason: format!("asymmetry {:.3e} exceeds tolerance", l.asymmetry()),
        });
    }
    for i in 0..m {
        let row_sum: f64 = (0..m).map(|j| l[(i, j)]).sum();
        if row_sum.abs() > 1e-12 * scale {
            return Err(Error::InvalidLaplacian {
                reason: format!("row {i} sums to {row_sum:.3e}, expected 0"),
            });
        }
        if l[(i, i)] < 0.0 {
            return Err(Error::InvalidLaplacian {
                reason: format!("negative diagonal at row {i}"),
            });
        }
        for j in 0..m {
            if i != j && l[(i, j)] > 0.0 {
                return Err(Error::InvalidLaplacian {
                    reason: format!("positive off-diagonal at ({i},{j})"),
                });
            }
        }
    }
    Ok(m)
}

/// Second-smallest Laplacian eigenvalue (the Fiedler value). A single-patch
/// network has no second eigenvalue; its connectivity is vacuous and the
/// value is reported as 0.
pub fn fiedler_value(l: &DenseMatrix) -> Result<f64> {
    let m = validate_laplacian(l)?;
    if m == 1 {
        return Ok(0.0);
    }
    let spectrum = sym_eigen(l)?;
    if spectrum.eigenvalues[0] < -FIEDLER_ZERO_TOL {
        return Err(Error::InvalidLaplacian {
            reason: format!(
                "smallest eigenvalue {:.3e} is negative beyond tolerance",
                spectrum.eigenvalues[0]
            ),
        });
    }
    Ok(spectrum.eigenvalues[1])
}

/// Network-level Fiedler value: the minimum across layers.
pub fn network_fiedler(set: &LaplacianSet) -> f64 {
    set.fiedler_min
}
