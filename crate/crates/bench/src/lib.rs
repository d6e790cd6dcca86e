//! Shared builders for the benchmarks; see `benches/pipeline.rs`.

use netstab::graph::{LayerEdge, LayeredNetwork};
use netstab::models::PatchModel;
use netstab::{CoupledSystem, DenseMatrix};

/// Laplacian of a weighted ring with a few chords, size `m`.
pub fn ring_laplacian(m: usize) -> DenseMatrix {
    let mut edges = Vec::new();
    for u in 1..=m {
        let v = if u == m { 1 } else { u + 1 };
        edges.push(LayerEdge::new(u, v, 1.0 + (u as f64) / m as f64));
    }
    for u in (1..=m.saturating_sub(3)).step_by(3) {
        edges.push(LayerEdge::new(u, u + 3, 0.5));
    }
    LayeredNetwork::new(m, vec![edges])
        .unwrap()
        .build_laplacian(1)
        .unwrap()
}

/// The 5-patch mixed predator-prey system used by the bundled demos.
pub fn five_patch_system() -> CoupledSystem {
    let mut models = vec![PatchModel::lotka_volterra(5.5, 4.9, 0.7, 0.3).unwrap()];
    for _ in 0..4 {
        models.push(PatchModel::rosenzweig_macarthur(2.0, 0.2, 0.3).unwrap());
    }
    let layer = vec![
        LayerEdge::new(1, 2, 2.0),
        LayerEdge::new(1, 3, 1.0),
        LayerEdge::new(1, 4, 2.0),
        LayerEdge::new(2, 3, 1.0),
        LayerEdge::new(2, 5, 2.0),
        LayerEdge::new(3, 4, 1.0),
        LayerEdge::new(3, 5, 1.0),
    ];
    let network = LayeredNetwork::new(5, vec![layer.clone(), layer]).unwrap();
    CoupledSystem::new(models, network).unwrap()
}
