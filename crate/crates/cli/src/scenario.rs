//! Scenario file format: strict JSON describing patches, layers, the
//! equilibrium, and analysis settings.
//!
//! Parsing is strict by design: unknown keys anywhere are rejected so a
//! misspelled parameter can never be silently ignored. Model parameters are
//! checked for exact name sets per model kind. A machine-readable schema
//! ships in `schema/scenario.schema.json`.

use anyhow::{anyhow, bail, Context};
use netstab::graph::{LayerEdge, LayeredNetwork};
use netstab::models::PatchModel;
use netstab::{CoupledSystem, HomogeneousEquilibrium};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Current (and only) scenario format version.
pub const SCENARIO_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    pub patches: Vec<PatchSpec>,
    pub layers: Vec<LayerSpec>,
    pub equilibrium: EquilibriumSpec,
    #[serde(default)]
    pub analysis: AnalysisSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchSpec {
    pub model: String,
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerSpec {
    /// 1-based state-variable index this layer couples.
    pub variable: usize,
    pub edges: Vec<EdgeSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Exactly one of `per_patch` (a verified equilibrium) or `solve_from`
/// (a Newton starting guess) must be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriumSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_patch: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve_from: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "default_basis_scaling")]
    pub basis_scaling: f64,
    #[serde(default)]
    pub simulate: bool,
    #[serde(default)]
    pub sim: SimSpec,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        Self {
            epsilon: 0.0,
            basis_scaling: default_basis_scaling(),
            simulate: false,
            sim: SimSpec::default(),
        }
    }
}

fn default_basis_scaling() -> f64 {
    netstab::stability::DEFAULT_BASIS_SCALING
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Integration horizon; when absent the pipeline derives one from the
    /// spectral abscissa (`10 / |abscissa|`, capped).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SimSpec {
    fn default() -> Self {
        Self {
            delta: default_delta(),
            horizon: None,
            trials: default_trials(),
            seed: 0,
        }
    }
}

fn default_delta() -> f64 {
    netstab::sim::DEFAULT_DELTA
}

fn default_trials() -> usize {
    8
}

impl ScenarioFile {
    /// Parse from JSON text with strict validation. Errors carry a
    /// JSON-pointer-style path to the offending element.
    pub fn parse(text: &str) -> anyhow::Result<ScenarioFile> {
        let deserializer = &mut serde_json::Deserializer::from_str(text);
        let scenario: ScenarioFile = serde_path_to_error::deserialize(deserializer)
            .map_err(|e| anyhow!("/{}: {}", e.path().to_string().replace('.', "/"), e.inner()))?;
        scenario.validate()?;
        Ok(scenario.normalized())
    }

    /// Read and parse a scenario file.
    pub fn load(path: &Path) -> anyhow::Result<ScenarioFile> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading scenario {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing scenario {}", path.display()))
    }

    fn validate(&self) -> anyhow::Result<()> {
        if self.version != SCENARIO_VERSION {
            bail!(
                "/version: unsupported scenario version {} (expected {})",
                self.version,
                SCENARIO_VERSION
            );
        }
        if self.patches.is_empty() {
            bail!("/patches: at least one patch is required");
        }
        for (i, patch) in self.patches.iter().enumerate() {
            check_model_params(patch).map_err(|e| anyhow!("/patches/{i}: {e}"))?;
        }
        let n = 2; // all scenario-file models are two-species
        if self.layers.len() != n {
            bail!(
                "/layers: expected {} layers (one per state variable), got {}",
                n,
                self.layers.len()
            );
        }
        let mut seen = vec![false; n];
        for (i, layer) in self.layers.iter().enumerate() {
            if layer.variable < 1 || layer.variable > n {
                bail!(
                    "/layers/{i}/variable: index {} out of range 1..={n}",
                    layer.variable
                );
            }
            if seen[layer.variable - 1] {
                bail!("/layers/{i}/variable: variable {} listed twice", layer.variable);
            }
            seen[layer.variable - 1] = true;
        }
        let m = self.patches.len();
        for (i, layer) in self.layers.iter().enumerate() {
            let mut pairs = std::collections::HashSet::new();
            for (j, e) in layer.edges.iter().enumerate() {
                let at = format!("/layers/{i}/edges/{j}");
                if e.u < 1 || e.u > m || e.v < 1 || e.v > m {
                    bail!("{at}: endpoint out of range 1..={m}");
                }
                if e.u == e.v {
                    bail!("{at}: self-loop on patch {}", e.u);
                }
                if !(e.w.is_finite() && e.w >= 0.0) {
                    bail!("{at}: weight must be finite and >= 0, got {}", e.w);
                }
                if !pairs.insert((e.u.min(e.v), e.u.max(e.v))) {
                    bail!("{at}: duplicate edge ({}, {})", e.u, e.v);
                }
            }
        }
        match (&self.equilibrium.per_patch, &self.equilibrium.solve_from) {
            (Some(_), Some(_)) => {
                bail!("/equilibrium: specify exactly one of per_patch and solve_from, not both")
            }
            (None, None) => {
                bail!("/equilibrium: one of per_patch or solve_from is required")
            }
            (Some(v), None) | (None, Some(v)) => {
                if v.len() != n {
                    bail!("/equilibrium: expected {} components, got {}", n, v.len());
                }
                if !v.iter().all(|x| x.is_finite()) {
                    bail!("/equilibrium: components must be finite");
                }
            }
        }
        let a = &self.analysis;
        if !(a.epsilon.is_finite() && a.epsilon >= 0.0) {
            bail!("/analysis/epsilon: must be finite and >= 0");
        }
        if !(a.basis_scaling.is_finite() && a.basis_scaling > 0.0 && a.basis_scaling <= 1.0) {
            bail!("/analysis/basis_scaling: must satisfy 0 < c <= 1");
        }
        if !(a.sim.delta.is_finite() && a.sim.delta >= 0.0) {
            bail!("/analysis/sim/delta: must be finite and >= 0");
        }
        if let Some(h) = a.sim.horizon {
            if !(h.is_finite() && h > 0.0) {
                bail!("/analysis/sim/horizon: must be finite and > 0");
            }
        }
        if a.sim.trials < 1 {
            bail!("/analysis/sim/trials: must be >= 1");
        }
        Ok(())
    }

    /// Canonical form: layers sorted by variable, edge endpoints ordered
    /// `u < v`, edges sorted by `(u, v)`. Reports echo this form so
    /// identical systems serialize identically.
    fn normalized(mut self) -> ScenarioFile {
        for layer in &mut self.layers {
            for e in &mut layer.edges {
                if e.u > e.v {
                    std::mem::swap(&mut e.u, &mut e.v);
                }
            }
            layer.edges.sort_by_key(|e| (e.u, e.v));
        }
        self.layers.sort_by_key(|l| l.variable);
        self
    }

    /// Instantiate the coupled system this scenario describes.
    pub fn build_system(&self) -> anyhow::Result<CoupledSystem> {
        let mut models = Vec::with_capacity(self.patches.len());
        for (i, patch) in self.patches.iter().enumerate() {
            models.push(
                build_model(patch).map_err(|e| anyhow!("/patches/{i}: {e}"))?,
            );
        }
        let layers = self
            .layers
            .iter()
            .map(|layer| {
                layer
                    .edges
                    .iter()
                    .map(|e| LayerEdge::new(e.u, e.v, e.w))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>();
        let network = LayeredNetwork::new(self.patches.len(), layers)?;
        Ok(CoupledSystem::new(models, network)?)
    }

    /// Resolve the homogeneous equilibrium: verify `per_patch` directly, or
    /// Newton-solve from `solve_from` on patch 1's dynamics and verify the
    /// result against every patch.
    pub fn resolve_equilibrium(
        &self,
        system: &CoupledSystem,
    ) -> anyhow::Result<HomogeneousEquilibrium> {
        if let Some(per_patch) = &self.equilibrium.per_patch {
            return Ok(system.make_homogeneous_equilibrium(per_patch)?);
        }
        let guess = self.equilibrium.solve_from.as_ref().expect("validated");
        let solved = system.models()[0].find_equilibrium(guess)?;
        Ok(system.make_homogeneous_equilibrium(&solved.state)?)
    }
}

fn check_model_params(patch: &PatchSpec) -> anyhow::Result<()> {
    let expected: &[&str] = match patch.model.as_str() {
        "rosenzweig_macarthur" => &["alpha", "beta", "gamma"],
        "lotka_volterra" => &["b", "c", "m", "r"],
        "ratio_dependent" => &["b", "c", "m"],
        "custom" => bail!("model `custom` cannot be specified in scenario files"),
        other => bail!("unknown model kind `{other}`"),
    };
    for name in patch.params.keys() {
        if !expected.contains(&name.as_str()) {
            bail!("params: unknown parameter `{name}` for model {}", patch.model);
        }
    }
    for name in expected {
        if !patch.params.contains_key(*name) {
            bail!("params: missing parameter `{name}` for model {}", patch.model);
        }
    }
    Ok(())
}

fn build_model(patch: &PatchSpec) -> anyhow::Result<PatchModel> {
    let p = |name: &str| -> f64 { patch.params[name] };
    Ok(match patch.model.as_str() {
        "rosenzweig_macarthur" => {
            PatchModel::rosenzweig_macarthur(p("gamma"), p("beta"), p("alpha"))?
        }
        "lotka_volterra" => PatchModel::lotka_volterra(p("r"), p("c"), p("b"), p("m"))?,
        "ratio_dependent" => PatchModel::ratio_dependent(p("c"), p("b"), p("m"))?,
        other => bail!("unknown model kind `{other}`"),
    })
}
