//! Machine-readable report document.
//!
//! Field names are stable; the canonical JSON encoding (two-space pretty
//! printing, struct field order, shortest round-trip decimals) round-trips
//! byte-identically through parse and re-emit.

use crate::scenario::ScenarioFile;
use netstab::sim::ConvergenceClass;
use netstab::stability::{ConditionReport, Verdict};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    /// Normalized scenario echo.
    pub scenario: ScenarioFile,
    pub equilibrium: EquilibriumSection,
    pub laplacian: LaplacianSection,
    pub theorem: TheoremSection,
    /// Eigenvalues of the coupled Jacobian, ascending by (re, im).
    pub spectrum: Vec<ComplexEntry>,
    pub abscissa: f64,
    pub verdicts: VerdictsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSection>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriumSection {
    pub per_patch: Vec<f64>,
    pub residual_f: f64,
    pub residual_l: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaplacianSection {
    pub fiedler_per_layer: Vec<f64>,
    pub fiedler_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoremSection {
    pub condition_a: ConditionASection,
    pub condition_b: ConditionBSection,
    pub sufficient_stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionASection {
    pub holds: bool,
    pub epsilon: f64,
    pub row_margins: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionBSection {
    pub holds: bool,
    pub lambda2: f64,
    pub tau: f64,
    pub scaling_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictsSection {
    /// "certified" when both sufficient conditions hold, else
    /// "inconclusive"; a failed certificate never claims instability.
    pub sufficient: String,
    pub spectral: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulated: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub classification: String,
    pub delta: f64,
    pub horizon: f64,
    pub trials: usize,
    pub seed: u64,
    pub initial_distance: f64,
    pub worst_final_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub tool_version: String,
    pub seed: u64,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub verdict_band: f64,
    pub equilibrium_f: f64,
    pub equilibrium_l: f64,
}

impl ReportDocument {
    /// Canonical JSON encoding; parsing this text and re-emitting it
    /// reproduces the bytes exactly.
    pub fn to_canonical_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> anyhow::Result<ReportDocument> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn verdict_label(v: Verdict) -> String {
    v.as_str().to_string()
}

pub fn sufficient_label(report: &ConditionReport) -> String {
    if report.sufficient_stable {
        "certified".to_string()
    } else {
        "inconclusive".to_string()
    }
}

pub fn convergence_label(c: ConvergenceClass) -> String {
    c.as_str().to_string()
}
