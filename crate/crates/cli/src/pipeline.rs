//! Analysis pipeline shared by the CLI subcommands: scenario to report, plus
//! trajectory CSV export and exit-code mapping.

use crate::report::{
    convergence_label, sufficient_label, verdict_label, ComplexEntry, ConditionASection,
    ConditionBSection, EquilibriumSection, LaplacianSection, Provenance, ReportDocument,
    SimulationSection, TheoremSection, Tolerances, VerdictsSection,
};
use crate::scenario::ScenarioFile;
use anyhow::bail;
use netstab::assembly::{EQUILIBRIUM_F_TOL, EQUILIBRIUM_L_TOL};
use netstab::sim::{default_horizon, perturb_and_classify, PerturbationOutcome, Trajectory};
use netstab::stability::{analyze, StabilityReport, Verdict, VERDICT_TOL};
use netstab::{CoupledSystem, HomogeneousEquilibrium};
use std::io::Write;

/// Exit codes: 0 stable, 1 execution error, 2 unstable, 3 marginal or
/// inconclusive, 64 usage error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    Stable = 0,
    Error = 1,
    Unstable = 2,
    Inconclusive = 3,
}

impl ExitClass {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn from_verdict(v: Verdict) -> ExitClass {
        match v {
            Verdict::Stable => ExitClass::Stable,
            Verdict::Unstable => ExitClass::Unstable,
            Verdict::Marginal => ExitClass::Inconclusive,
        }
    }

    /// Severity order for aggregating multiple analyses:
    /// error > unstable > inconclusive > stable.
    pub fn worst(a: ExitClass, b: ExitClass) -> ExitClass {
        let rank = |c: ExitClass| match c {
            ExitClass::Error => 3,
            ExitClass::Unstable => 2,
            ExitClass::Inconclusive => 1,
            ExitClass::Stable => 0,
        };
        if rank(a) >= rank(b) {
            a
        } else {
            b
        }
    }
}

/// Flag overrides applied on top of a scenario's analysis block.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub epsilon: Option<f64>,
    pub basis_scaling: Option<f64>,
    pub seed: Option<u64>,
    pub strict: bool,
    pub simulate: Option<bool>,
}

impl Overrides {
    pub fn effective_epsilon(&self, scenario: &ScenarioFile) -> f64 {
        self.epsilon.unwrap_or(scenario.analysis.epsilon)
    }

    pub fn effective_scaling(&self, scenario: &ScenarioFile) -> f64 {
        self.basis_scaling.unwrap_or(scenario.analysis.basis_scaling)
    }

    pub fn effective_seed(&self, scenario: &ScenarioFile) -> u64 {
        self.seed.unwrap_or(scenario.analysis.sim.seed)
    }

    /// Strict mode demands a positive dominance slack.
    pub fn check_strict(&self, scenario: &ScenarioFile) -> anyhow::Result<()> {
        if self.strict && self.effective_epsilon(scenario) <= 0.0 {
            bail!("--strict requires --epsilon > 0 (strict dominance has no slack to enforce)");
        }
        Ok(())
    }
}

/// Everything a subcommand may need after running the pipeline.
pub struct AnalysisOutcome {
    pub system: CoupledSystem,
    pub equilibrium: HomogeneousEquilibrium,
    pub stability: StabilityReport,
    pub simulation: Option<PerturbationOutcome>,
    pub report: ReportDocument,
    pub exit: ExitClass,
}

/// Run the full pipeline on one scenario: equilibrium, Laplacian summary,
/// certificate, spectrum, and (when requested) the simulation cross-check.
pub fn run_analyze(scenario: &ScenarioFile, overrides: &Overrides) -> anyhow::Result<AnalysisOutcome> {
    overrides.check_strict(scenario)?;
    let system = scenario.build_system()?;
    let equilibrium = scenario.resolve_equilibrium(&system)?;
    let epsilon = overrides.effective_epsilon(scenario);
    let scaling = overrides.effective_scaling(scenario);
    let stability = analyze(&system, &equilibrium, epsilon, scaling)?;

    let simulate = overrides.simulate.unwrap_or(scenario.analysis.simulate);
    let seed = overrides.effective_seed(scenario);
    let simulation = if simulate {
        let sim = &scenario.analysis.sim;
        let horizon = sim
            .horizon
            .unwrap_or_else(|| default_horizon(stability.abscissa));
        Some(perturb_and_classify(
            &system,
            &equilibrium,
            sim.delta,
            horizon,
            sim.trials,
            seed,
        )?)
    } else {
        None
    };

    let report = build_report(
        scenario,
        &system,
        &equilibrium,
        &stability,
        simulation.as_ref(),
        seed,
    );
    let exit = ExitClass::from_verdict(stability.spectral_verdict);
    Ok(AnalysisOutcome {
        system,
        equilibrium,
        stability,
        simulation,
        report,
        exit,
    })
}

fn build_report(
    scenario: &ScenarioFile,
    system: &CoupledSystem,
    equilibrium: &HomogeneousEquilibrium,
    stability: &StabilityReport,
    simulation: Option<&PerturbationOutcome>,
    seed: u64,
) -> ReportDocument {
    let c = &stability.condition;
    ReportDocument {
        scenario: scenario.clone(),
        equilibrium: EquilibriumSection {
            per_patch: equilibrium.per_patch.clone(),
            residual_f: equilibrium.residual_f,
            residual_l: equilibrium.residual_l,
            warnings: equilibrium.warnings.clone(),
        },
        laplacian: laplacian_section(system),
        theorem: TheoremSection {
            condition_a: ConditionASection {
                holds: c.condition_a.holds,
                epsilon: c.condition_a.epsilon,
                row_margins: c.condition_a.row_margins.clone(),
            },
            condition_b: ConditionBSection {
                holds: c.condition_b.holds,
                lambda2: c.condition_b.lambda2,
                tau: c.condition_b.tau,
                scaling_c: c.condition_b.scaling_c,
            },
            sufficient_stable: c.sufficient_stable,
        },
        spectrum: stability
            .spectrum
            .iter()
            .map(|z| ComplexEntry { re: z.re, im: z.im })
            .collect(),
        abscissa: stability.abscissa,
        verdicts: VerdictsSection {
            sufficient: sufficient_label(c),
            spectral: verdict_label(stability.spectral_verdict),
            simulated: simulation.map(|s| convergence_label(s.aggregate.classification)),
        },
        simulation: simulation.map(|s| SimulationSection {
            classification: convergence_label(s.aggregate.classification),
            delta: s.aggregate.initial_distance,
            horizon: s.aggregate.horizon,
            trials: s.trials.len(),
            seed,
            initial_distance: s.aggregate.initial_distance,
            worst_final_distance: s.aggregate.final_distance,
        }),
        provenance: Provenance {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            tolerances: Tolerances {
                verdict_band: VERDICT_TOL,
                equilibrium_f: EQUILIBRIUM_F_TOL,
                equilibrium_l: EQUILIBRIUM_L_TOL,
            },
        },
    }
}

/// Fill in the per-layer Fiedler values (report section shared by several
/// subcommands).
pub fn laplacian_section(system: &CoupledSystem) -> LaplacianSection {
    LaplacianSection {
        fiedler_per_layer: system.laplacians().fiedler_per_layer.clone(),
        fiedler_min: system.laplacians().fiedler_min,
    }
}

/// Evaluate the certificate bound `tau` over the standard scaling sweep
/// `c = 1e-2 .. 1e-8`; useful because the bound depends on the eigenvector
/// column scaling for heterogeneous patches.
pub fn tau_sweep(
    system: &CoupledSystem,
    equilibrium: &HomogeneousEquilibrium,
) -> anyhow::Result<Vec<(f64, f64)>> {
    use netstab::stability::{build_basis, compute_tau, SWEEP_SCALINGS};
    let mut points = Vec::with_capacity(SWEEP_SCALINGS.len());
    for &c in SWEEP_SCALINGS.iter() {
        let basis = build_basis(system.laplacians(), c)?;
        points.push((c, compute_tau(system, equilibrium, &basis)?));
    }
    Ok(points)
}

/// Trajectory CSV: header `t,x_1_1,...,x_n_m`, one row per accepted step,
/// 17 significant digits.
pub fn write_trajectory_csv<W: Write>(
    out: &mut W,
    trajectory: &Trajectory,
    n_vars: usize,
    m_patches: usize,
) -> std::io::Result<()> {
    let mut header = String::from("t");
    for i in 1..=n_vars {
        for j in 1..=m_patches {
            header.push_str(&format!(",x_{i}_{j}"));
        }
    }
    writeln!(out, "{header}")?;
    for (t, state) in trajectory.times.iter().zip(&trajectory.states) {
        let mut row = format!("{t:.16e}");
        for v in state {
            row.push_str(&format!(",{v:.16e}"));
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}
