//! Plain-text report rendering. Output is uncolored tables, so NO_COLOR
//! needs no special handling.

use crate::demo::DemoCase;
use crate::pipeline::AnalysisOutcome;
use netstab::sim::PerturbationOutcome;
use netstab::stability::ThresholdResult;
use std::io::Write;

pub fn print_analysis<W: Write>(
    out: &mut W,
    label: &str,
    outcome: &AnalysisOutcome,
) -> std::io::Result<()> {
    let r = &outcome.report;
    writeln!(
        out,
        "scenario {label}: {} patches, {} layers",
        r.scenario.patches.len(),
        r.scenario.layers.len()
    )?;
    let eq = &r.equilibrium;
    let eq_str = eq
        .per_patch
        .iter()
        .map(|v| format!("{v:.10}"))
        .collect::<Vec<_>>()
        .join(", ");
    writeln!(
        out,
        "equilibrium        per patch ({eq_str}); residual_f {:.2e}, residual_L {:.2e}",
        eq.residual_f, eq.residual_l
    )?;
    for w in &eq.warnings {
        writeln!(out, "  warning: {w}")?;
    }
    writeln!(out, "fiedler per layer  {}", fmt_vec(&r.laplacian.fiedler_per_layer))?;
    writeln!(out, "fiedler (lambda2)  {:.9}", r.laplacian.fiedler_min)?;
    let a = &r.theorem.condition_a;
    writeln!(
        out,
        "condition (a)      {} (epsilon {:.3e}); row margins {}",
        hold_str(a.holds),
        a.epsilon,
        fmt_vec(&a.row_margins)
    )?;
    let b = &r.theorem.condition_b;
    writeln!(
        out,
        "condition (b)      {}; lambda2 {:.9} vs tau {:.6e} (c {:.1e})",
        hold_str(b.holds),
        b.lambda2,
        b.tau,
        b.scaling_c
    )?;
    writeln!(out, "sufficient verdict {}", r.verdicts.sufficient)?;
    writeln!(out, "spectrum ({} eigenvalues, ascending by re):", r.spectrum.len())?;
    for z in &r.spectrum {
        writeln!(out, "  {:+.10}  {:+.10}i", z.re, z.im)?;
    }
    writeln!(out, "spectral abscissa  {:+.10}", r.abscissa)?;
    writeln!(out, "spectral verdict   {}", r.verdicts.spectral)?;
    if let Some(sim) = &r.simulation {
        writeln!(
            out,
            "simulation         {} (delta {:.1e}, horizon {}, {} trials, seed {}); worst final distance {:.3e}",
            sim.classification, sim.delta, sim.horizon, sim.trials, sim.seed, sim.worst_final_distance
        )?;
    }
    Ok(())
}

pub fn print_fiedler<W: Write>(
    out: &mut W,
    label: &str,
    outcome: &AnalysisOutcome,
) -> std::io::Result<()> {
    writeln!(out, "scenario {label}")?;
    writeln!(out, "layer  variable  fiedler        connected")?;
    let system = &outcome.system;
    for (i, f) in system.laplacians().fiedler_per_layer.iter().enumerate() {
        let connected = system.network().is_connected(i + 1).unwrap_or(false);
        writeln!(
            out,
            "{:<5}  {:<8}  {:<13.9}  {}",
            i + 1,
            i + 1,
            f,
            if connected { "yes" } else { "no" }
        )?;
        if !connected {
            writeln!(out, "  warning: layer {} is disconnected (lambda2 = 0)", i + 1)?;
        }
    }
    writeln!(
        out,
        "network fiedler (lambda2): {:.9}",
        system.laplacians().fiedler_min
    )?;
    Ok(())
}

pub fn print_eigs<W: Write>(
    out: &mut W,
    label: &str,
    outcome: &AnalysisOutcome,
) -> std::io::Result<()> {
    writeln!(out, "scenario {label}: coupled Jacobian spectrum")?;
    writeln!(out, "        re                im")?;
    for z in &outcome.report.spectrum {
        writeln!(out, "  {:+.12e}  {:+.12e}", z.re, z.im)?;
    }
    writeln!(out, "abscissa {:+.10}  verdict {}", outcome.report.abscissa, outcome.report.verdicts.spectral)?;
    Ok(())
}

pub fn print_theorem<W: Write>(
    out: &mut W,
    label: &str,
    outcome: &AnalysisOutcome,
    sweep: Option<&[(f64, f64)]>,
) -> std::io::Result<()> {
    let r = &outcome.report;
    writeln!(out, "scenario {label}: sufficient-condition report")?;
    let a = &r.theorem.condition_a;
    writeln!(out, "condition (a): {} (epsilon {:.3e})", hold_str(a.holds), a.epsilon)?;
    for (i, m) in a.row_margins.iter().enumerate() {
        writeln!(out, "  row {} margin {:+.12}", i + 1, m)?;
    }
    let b = &r.theorem.condition_b;
    writeln!(
        out,
        "condition (b): {}; lambda2 {:.9} vs tau {:.6e} at c {:.1e}",
        hold_str(b.holds),
        b.lambda2,
        b.tau,
        b.scaling_c
    )?;
    if let Some(points) = sweep {
        writeln!(out, "tau sweep over c:")?;
        let mut best = (f64::NAN, f64::INFINITY);
        for (c, tau) in points {
            writeln!(out, "  c {:.1e}  tau {:.6e}", c, tau)?;
            if *tau < best.1 {
                best = (*c, *tau);
            }
        }
        writeln!(out, "  minimum tau {:.6e} at c {:.1e}", best.1, best.0)?;
    }
    writeln!(out, "sufficient verdict: {}", r.verdicts.sufficient)?;
    Ok(())
}

pub fn print_threshold<W: Write>(
    out: &mut W,
    label: &str,
    result: &ThresholdResult,
) -> std::io::Result<()> {
    writeln!(out, "scenario {label}: coupling threshold")?;
    writeln!(out, "s*                {:.8}", result.s_star)?;
    writeln!(out, "abscissa at s*    {:+.3e}", result.abscissa)?;
    writeln!(out, "lambda2 at s*     {:.9}", result.lambda2)?;
    Ok(())
}

pub fn print_simulation<W: Write>(
    out: &mut W,
    label: &str,
    sim: &PerturbationOutcome,
) -> std::io::Result<()> {
    writeln!(out, "scenario {label}: perturbation trials")?;
    writeln!(out, "trial  classification  initial_dist  final_dist")?;
    for (i, t) in sim.trials.iter().enumerate() {
        writeln!(
            out,
            "{:<5}  {:<14}  {:<12.3e}  {:.3e}",
            i + 1,
            t.classification.as_str(),
            t.initial_distance,
            t.final_distance
        )?;
    }
    writeln!(
        out,
        "aggregate: {} over horizon {}",
        sim.aggregate.classification.as_str(),
        sim.aggregate.horizon
    )?;
    Ok(())
}

pub fn print_demo_table<W: Write>(
    out: &mut W,
    case: &DemoCase,
    outcome: &AnalysisOutcome,
) -> std::io::Result<()> {
    writeln!(out, "demo {} set {}", case.name, case.set)?;
    writeln!(out, "        reference                     computed                      |diff|")?;
    let computed = &outcome.report.spectrum;
    for (i, (re, im)) in case.reference.iter().enumerate() {
        if let Some(z) = computed.get(i) {
            let diff = ((z.re - re).powi(2) + (z.im - im).powi(2)).sqrt();
            writeln!(
                out,
                "  {:+11.8} {:+11.8}i   {:+12.9} {:+12.9}i   {:.2e}",
                re, im, z.re, z.im, diff
            )?;
        }
    }
    if let Some(note) = case.note {
        writeln!(out, "{note}")?;
    }
    writeln!(out, "spectral verdict: {}", outcome.report.verdicts.spectral)?;
    writeln!(out, "lambda2: {:.9}", outcome.report.laplacian.fiedler_min)?;
    Ok(())
}

fn hold_str(holds: bool) -> &'static str {
    if holds {
        "holds"
    } else {
        "fails"
    }
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.9}"))
        .collect::<Vec<_>>()
        .join(", ")
}
