//! `netstab`: stability analysis of networked reaction-diffusion systems.

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use netstab_cli::demo::{demo_case, demo_scenario};
use netstab_cli::output;
use netstab_cli::pipeline::{
    run_analyze, tau_sweep, write_trajectory_csv, AnalysisOutcome, ExitClass, Overrides,
};
use netstab_cli::scenario::ScenarioFile;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

const USAGE_EXIT: i32 = 64;

#[derive(Parser)]
#[command(
    name = "netstab",
    version,
    about = "Local stability analysis of networked reaction-diffusion dynamical systems",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CommonFlags {
    /// Dominance slack for condition (a); overrides the scenario value
    #[arg(long)]
    epsilon: Option<f64>,
    /// Eigenvector column scaling c for the certificate basis (0 < c <= 1)
    #[arg(long = "basis-scaling")]
    basis_scaling: Option<f64>,
    /// Enforce strict dominance: requires epsilon > 0
    #[arg(long)]
    strict: bool,
    /// Write the machine-readable report JSON to this path
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write the sample trajectory CSV to this path (simulation runs only)
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Seed for perturbation directions; overrides the scenario value
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: equilibrium, certificate, spectrum, optional simulation
    Analyze {
        /// Scenario files (JSON); several may be analyzed in one run
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        #[command(flatten)]
        flags: CommonFlags,
        /// Run up to N scenario analyses concurrently
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Per-layer Fiedler values and connectivity
    Fiedler {
        scenario: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Eigenvalues of the coupled Jacobian at the equilibrium
    Eigs {
        scenario: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Sufficient-condition report with row margins and tau(c)
    Theorem {
        scenario: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
        /// Also sweep c over 1e-2..1e-8 and report the smallest tau
        #[arg(long = "sweep-scaling")]
        sweep_scaling: bool,
    },
    /// Seeded perturbation trials around the equilibrium
    Simulate {
        scenario: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Bisection for the weight scale where the spectral abscissa crosses zero
    Threshold {
        scenario: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
        /// Bracket [LO, HI] with opposite-sign abscissas at the endpoints
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], required = true)]
        bracket: Vec<f64>,
    },
    /// Run a bundled scenario and print reference vs computed spectra
    Demo {
        /// Which demo: example1 | example2
        which: String,
        /// Dispersal-rate set: 1 | 2
        #[arg(long, default_value_t = 1)]
        set: u8,
        #[command(flatten)]
        flags: CommonFlags,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => USAGE_EXIT,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let exit = match run(cli) {
        Ok(exit) => exit,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitClass::Error
        }
    };
    std::process::exit(exit.code());
}

fn reject_csv(flags: &CommonFlags, subcommand: &str) -> anyhow::Result<()> {
    if flags.csv.is_some() {
        bail!("--csv is not supported by `{subcommand}` (no trajectory is produced)");
    }
    Ok(())
}

fn overrides_from(flags: &CommonFlags, simulate: Option<bool>) -> Overrides {
    Overrides {
        epsilon: flags.epsilon,
        basis_scaling: flags.basis_scaling,
        seed: flags.seed,
        strict: flags.strict,
        simulate,
    }
}

fn label_of(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn write_json(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_sample_csv(
    flags: &CommonFlags,
    outcome: &AnalysisOutcome,
) -> anyhow::Result<()> {
    if let Some(path) = &flags.csv {
        match &outcome.simulation {
            Some(sim) => {
                let mut file = std::fs::File::create(path)
                    .with_context(|| format!("creating {}", path.display()))?;
                write_trajectory_csv(
                    &mut file,
                    &sim.sample_trajectory,
                    outcome.system.var_count(),
                    outcome.system.patch_count(),
                )?;
            }
            None => bail!("--csv requires a simulation; enable analysis.simulate or use the simulate subcommand"),
        }
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitClass> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Analyze {
            scenarios,
            flags,
            jobs,
        } => {
            if jobs == 0 {
                bail!("--jobs must be >= 1");
            }
            let overrides = overrides_from(&flags, None);
            let results = analyze_many(&scenarios, &overrides, jobs);
            let mut worst = ExitClass::Stable;
            let mut reports = Vec::new();
            for (path, result) in scenarios.iter().zip(results) {
                match result {
                    Ok(outcome) => {
                        output::print_analysis(&mut stdout, &label_of(path), &outcome)?;
                        writeln!(stdout)?;
                        write_sample_csv(&flags, &outcome)?;
                        worst = ExitClass::worst(worst, outcome.exit);
                        reports.push(outcome.report);
                    }
                    Err(e) => {
                        eprintln!("error: {}: {e:#}", path.display());
                        worst = ExitClass::worst(worst, ExitClass::Error);
                    }
                }
            }
            if let Some(json_path) = &flags.json {
                let text = if reports.len() == 1 {
                    reports[0].to_canonical_json()
                } else {
                    let mut text =
                        serde_json::to_string_pretty(&reports).expect("reports serialize");
                    text.push('\n');
                    text
                };
                write_json(json_path, &text)?;
            }
            Ok(worst)
        }
        Command::Fiedler { scenario, flags } => {
            reject_csv(&flags, "fiedler")?;
            let parsed = ScenarioFile::load(&scenario)?;
            let outcome = run_analyze(&parsed, &overrides_from(&flags, None))?;
            output::print_fiedler(&mut stdout, &label_of(&scenario), &outcome)?;
            if let Some(json_path) = &flags.json {
                write_json(json_path, &outcome.report.to_canonical_json())?;
            }
            Ok(ExitClass::Stable)
        }
        Command::Eigs { scenario, flags } => {
            reject_csv(&flags, "eigs")?;
            let parsed = ScenarioFile::load(&scenario)?;
            let outcome = run_analyze(&parsed, &overrides_from(&flags, None))?;
            output::print_eigs(&mut stdout, &label_of(&scenario), &outcome)?;
            if let Some(json_path) = &flags.json {
                write_json(json_path, &outcome.report.to_canonical_json())?;
            }
            Ok(ExitClass::Stable)
        }
        Command::Theorem {
            scenario,
            flags,
            sweep_scaling,
        } => {
            reject_csv(&flags, "theorem")?;
            let parsed = ScenarioFile::load(&scenario)?;
            let outcome = run_analyze(&parsed, &overrides_from(&flags, None))?;
            let sweep = if sweep_scaling {
                Some(tau_sweep(&outcome.system, &outcome.equilibrium)?)
            } else {
                None
            };
            output::print_theorem(
                &mut stdout,
                &label_of(&scenario),
                &outcome,
                sweep.as_deref(),
            )?;
            if let Some(json_path) = &flags.json {
                write_json(json_path, &outcome.report.to_canonical_json())?;
            }
            Ok(ExitClass::Stable)
        }
        Command::Simulate { scenario, flags } => {
            let parsed = ScenarioFile::load(&scenario)?;
            let outcome = run_analyze(&parsed, &overrides_from(&flags, Some(true)))?;
            let sim = outcome.simulation.as_ref().expect("simulation forced on");
            output::print_simulation(&mut stdout, &label_of(&scenario), sim)?;
            write_sample_csv(&flags, &outcome)?;
            if let Some(json_path) = &flags.json {
                write_json(json_path, &outcome.report.to_canonical_json())?;
            }
            Ok(ExitClass::Stable)
        }
        Command::Threshold {
            scenario,
            flags,
            bracket,
        } => {
            reject_csv(&flags, "threshold")?;
            let parsed = ScenarioFile::load(&scenario)?;
            let system = parsed.build_system()?;
            let equilibrium = parsed.resolve_equilibrium(&system)?;
            let result =
                netstab::stability::coupling_threshold(&system, &equilibrium, bracket[0], bracket[1])?;
            output::print_threshold(&mut stdout, &label_of(&scenario), &result)?;
            if let Some(json_path) = &flags.json {
                let doc = serde_json::json!({
                    "s_star": result.s_star,
                    "abscissa": result.abscissa,
                    "lambda2": result.lambda2,
                });
                let mut text = serde_json::to_string_pretty(&doc).expect("threshold serializes");
                text.push('\n');
                write_json(json_path, &text)?;
            }
            Ok(ExitClass::Stable)
        }
        Command::Demo { which, set, flags } => {
            let case = demo_case(&which, set)?;
            let parsed = demo_scenario(case)?;
            let outcome = run_analyze(&parsed, &overrides_from(&flags, None))?;
            output::print_demo_table(&mut stdout, case, &outcome)?;
            write_sample_csv(&flags, &outcome)?;
            if let Some(json_path) = &flags.json {
                write_json(json_path, &outcome.report.to_canonical_json())?;
            }
            Ok(outcome.exit)
        }
    }
}

/// Analyze scenarios concurrently with a simple work-stealing counter;
/// results return in input order.
fn analyze_many(
    paths: &[PathBuf],
    overrides: &Overrides,
    jobs: usize,
) -> Vec<anyhow::Result<AnalysisOutcome>> {
    let worker_count = jobs.min(paths.len()).max(1);
    if worker_count == 1 {
        return paths
            .iter()
            .map(|p| ScenarioFile::load(p).and_then(|s| run_analyze(&s, overrides)))
            .collect();
    }
    let next = AtomicUsize::new(0);
    let results: Vec<Mutex<Option<anyhow::Result<AnalysisOutcome>>>> =
        paths.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..worker_count {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= paths.len() {
                    break;
                }
                let result =
                    ScenarioFile::load(&paths[i]).and_then(|s| run_analyze(&s, overrides));
                *results[i].lock().unwrap() = Some(result);
            });
        }
    });
    results
        .into_iter()
        .map(|cell| cell.into_inner().unwrap().expect("worker filled the slot"))
        .collect()
}
