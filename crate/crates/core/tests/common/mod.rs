#![allow(dead_code)] // shared across test targets; each uses a subset

//! Builders for the two worked scenario families used across integration
//! tests, plus frozen reference spectra.
//!
//! The frozen values were produced by this crate's own assembly definition
//! and verified against an independent route (finite differences of the
//! nonlinear coupled right-hand side followed by a reference dense
//! eigensolver), so they pin the implementation rather than echo it.

use netstab::graph::{LayerEdge, LayeredNetwork};
use netstab::models::PatchModel;
use netstab::CoupledSystem;

pub fn example1_system(set: u8) -> CoupledSystem {
    let models = vec![
        PatchModel::rosenzweig_macarthur(3.0 / 13.0, 0.1, 1.0 / 6.0).unwrap(),
        PatchModel::ratio_dependent(1.8, 1.8, 0.25).unwrap(),
        PatchModel::rosenzweig_macarthur(3.0 / 13.0, 0.1, 1.0 / 6.0).unwrap(),
    ];
    let layer = |w23: f64| {
        vec![
            LayerEdge::new(1, 2, 0.0),
            LayerEdge::new(1, 3, 0.1),
            LayerEdge::new(2, 3, w23),
        ]
    };
    let (prey_w23, pred_w23) = match set {
        1 => (1.0, 1.0),
        2 => (0.1, 1.0),
        _ => panic!("example 1 has sets 1 and 2"),
    };
    let network =
        LayeredNetwork::new(3, vec![layer(prey_w23), layer(pred_w23)]).unwrap();
    CoupledSystem::new(models, network).unwrap()
}

pub fn example2_system(set: u8) -> CoupledSystem {
    let mut models = vec![PatchModel::lotka_volterra(5.5, 4.9, 0.7, 0.3).unwrap()];
    for _ in 0..4 {
        models.push(PatchModel::rosenzweig_macarthur(2.0, 0.2, 0.3).unwrap());
    }
    let edges: Vec<(usize, usize, f64, f64)> = match set {
        // (u, v, weight set 1, weight set 2)
        1 | 2 => vec![
            (1, 2, 2.0, 0.01),
            (1, 3, 1.0, 0.01),
            (1, 4, 2.0, 0.01),
            (2, 3, 1.0, 1.0),
            (2, 5, 2.0, 0.01),
            (3, 4, 1.0, 1.0),
            (3, 5, 1.0, 0.01),
        ],
        _ => panic!("example 2 has sets 1 and 2"),
    };
    let pick = |a: f64, b: f64| if set == 1 { a } else { b };
    let layer: Vec<LayerEdge> = edges
        .iter()
        .map(|&(u, v, w1, w2)| LayerEdge::new(u, v, pick(w1, w2)))
        .collect();
    let network = LayeredNetwork::new(5, vec![layer.clone(), layer]).unwrap();
    CoupledSystem::new(models, network).unwrap()
}

pub const EXAMPLE1_EQ: [f64; 2] = [0.2, 0.16];
pub const EXAMPLE2_EQ: [f64; 2] = [3.0 / 7.0, 55.0 / 49.0];

/// Spectrum of the set-1 coupled Jacobian of example 1, ascending by (re, im).
pub const E1S1_SPECTRUM: [(f64, f64); 6] = [
    (-2.488343229992779, 0.0),
    (-2.129383682254316, 0.0),
    (-0.9404333177336051, 0.0),
    (-0.1603027848814528, -0.1336667281942958),
    (-0.1603027848814528, 0.1336667281942958),
    (-0.07678975581195112, 0.0),
];

pub const E1S2_SPECTRUM: [(f64, f64); 6] = [
    (-2.095661517751774, 0.0),
    (-1.11295593003873, 0.0),
    (-0.8838327018941583, 0.0),
    (-0.1373896558738955, 0.0),
    (0.03714212500150167, -0.1028702365601458),
    (0.03714212500150167, 0.1028702365601458),
];

pub const E2S1_SPECTRUM: [(f64, f64); 10] = [
    (-7.745643047558648, -0.6523165271225703),
    (-7.745643047558648, 0.6523165271225703),
    (-5.025317642778064, -0.5175086834281309),
    (-5.025317642778064, 0.5175086834281309),
    (-4.989285714285714, -0.1813427806162481),
    (-4.989285714285714, 0.1813427806162481),
    (-2.169722372191121, -0.2619234928200589),
    (-2.169722372191121, 0.2619234928200589),
    (-0.02717408032930882, -0.3973640242173991),
    (-0.02717408032930882, 0.3973640242173991),
];

pub const E2S2_SPECTRUM: [(f64, f64); 10] = [
    (-3.007630604643505, -0.1813427806366984),
    (-3.007630604643505, 0.1813427806366984),
    (-1.004349290174582, -0.1813427832845229),
    (-1.004349290174582, 0.1813427832845229),
    (-0.03000593214566, -1.284251350808094),
    (-0.03000593214566, 1.284251350808094),
    (-0.01921129625151383, -0.1814596481374776),
    (-0.01921129625151383, 0.1814596481374776),
    (0.004054266072405218, -0.1814981842271842),
    (0.004054266072405218, 0.1814981842271842),
];
