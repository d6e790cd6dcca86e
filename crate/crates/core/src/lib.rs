//! Local stability analysis for networked reaction-diffusion dynamical
//! systems at homogeneous equilibria.
//!
//! A system here is `m` patches, each running its own ODE in `n` state
//! variables, coupled by per-variable weighted undirected graphs (one layer
//! per variable). The crate assembles the block graph Laplacian and the
//! coupled Jacobian, checks a sufficient stability certificate (averaged
//! Jacobian diagonal dominance plus a Fiedler-value threshold), computes the
//! exact spectrum, searches coupling thresholds, and cross-validates the
//! verdicts by integrating the ODEs.
//!
//! Modules map one-to-one onto the pipeline:
//!
//! * [`linalg`] - dense matrices, symmetric/general eigensolvers, Gershgorin
//!   discs, similarity transforms.
//! * [`graph`] - multi-layer patch networks, Laplacians, Fiedler values.
//! * [`models`] - per-patch predator-prey dynamics with analytic Jacobians.
//! * [`assembly`] - stacking patches into the coupled system.
//! * [`stability`] - the sufficient conditions, exact spectral verdicts, and
//!   coupling-threshold search.
//! * [`sim`] - Runge-Kutta integration and empirical convergence checks.

pub mod assembly;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod models;
pub mod sim;
pub mod stability;

pub use assembly::{stack_index, CoupledSystem, HomogeneousEquilibrium};
pub use error::{Error, Result};
pub use graph::{LaplacianSet, LayerEdge, LayeredNetwork};
pub use linalg::{ComplexValue, DenseMatrix};
pub use models::PatchModel;
pub use sim::{ConvergenceClass, ConvergenceResult, Method, Trajectory};
pub use stability::{ConditionReport, StabilityReport, Verdict};
