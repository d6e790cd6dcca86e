//! Numerical integration of the coupled system and empirical convergence
//! classification around equilibria; the cross-check on spectral verdicts.
//!
//! Two integrators: classical fixed-step RK4 and adaptive
//! Runge-Kutta-Fehlberg 4(5) with the standard coefficient tableau. The
//! RKF45 stepper advances with the fifth-order solution and controls the
//! embedded fourth/fifth difference against `abs_tol + rel_tol * |y|`.

use crate::assembly::{CoupledSystem, HomogeneousEquilibrium};
use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default absolute tolerance for RKF45.
pub const DEFAULT_ABS_TOL: f64 = 1e-9;
/// Default relative tolerance for RKF45.
pub const DEFAULT_REL_TOL: f64 = 1e-7;
/// Default perturbation radius for [`perturb_and_classify`].
pub const DEFAULT_DELTA: f64 = 1e-3;
/// Horizon cap for the `10 / |abscissa|` heuristic.
pub const HORIZON_CAP: f64 = 1e4;
/// Accepted-step cap; beyond it a trajectory is cut off as inconclusive.
pub const MAX_ACCEPTED_STEPS: usize = 1_000_000;
/// Step-size underflow threshold; below it the run is flagged divergent.
pub const MIN_STEP: f64 = 1e-14;
/// Contraction factor that counts as converged.
pub const CONVERGE_FACTOR: f64 = 0.01;
/// Expansion factor that counts as diverged.
pub const DIVERGE_FACTOR: f64 = 100.0;

/// Integration method selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Classical 4th-order Runge-Kutta with fixed step `dt`.
    Rk4 { dt: f64 },
    /// Runge-Kutta-Fehlberg 4(5), adaptive.
    Rkf45 { abs_tol: f64, rel_tol: f64 },
}

impl Method {
    pub fn rkf45_default() -> Method {
        Method::Rkf45 {
            abs_tol: DEFAULT_ABS_TOL,
            rel_tol: DEFAULT_REL_TOL,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Rk4 { .. } => "rk4",
            Method::Rkf45 { .. } => "rkf45",
        }
    }
}

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Reached `t_end`.
    Completed,
    /// Non-finite state, domain violation mid-step, or step underflow.
    Diverged,
    /// Accepted-step cap hit before `t_end`.
    StepCap,
}

/// Per-run step accounting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    pub steps: usize,
    pub rejected: usize,
    pub min_dt: f64,
    pub max_dt: f64,
    /// Largest accepted `error / tolerance` ratio (RKF45); stays <= 1.
    pub max_error_ratio: f64,
}

/// Recorded solution: state at every accepted step.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub method: &'static str,
    pub step_stats: StepStats,
    pub termination: Termination,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory holds x0")
    }
}

/// Outcome of one perturb-integrate-measure trial, plus the aggregate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvergenceClass {
    Converged,
    Diverged,
    Inconclusive,
}

impl ConvergenceClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConvergenceClass::Converged => "converged",
            ConvergenceClass::Diverged => "diverged",
            ConvergenceClass::Inconclusive => "inconclusive",
        }
    }
}

/// Distance bookkeeping for one classification.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceResult {
    pub classification: ConvergenceClass,
    pub initial_distance: f64,
    pub final_distance: f64,
    pub horizon: f64,
}

/// All trials of a perturbation experiment plus the aggregate verdict:
/// converged only if every trial converged, diverged if any trial diverged.
#[derive(Debug, Clone)]
pub struct PerturbationOutcome {
    pub aggregate: ConvergenceResult,
    pub trials: Vec<ConvergenceResult>,
    /// Trajectory of the first trial, for export.
    pub sample_trajectory: Trajectory,
}

struct RhsAdapter<'a> {
    system: &'a CoupledSystem,
}

impl RhsAdapter<'_> {
    /// Evaluate the RHS; `None` signals a domain violation or non-finite
    /// output, which the stepper treats as divergence.
    fn eval(&self, x: &[f64]) -> Option<Vec<f64>> {
        match self.system.eval_coupled_f(x) {
            Ok(f) if f.iter().all(|v| v.is_finite()) => Some(f),
            _ => None,
        }
    }
}

// Fehlberg 4(5) tableau; stage abscissae are irrelevant for the autonomous
// systems integrated here.
const B21: f64 = 1.0 / 4.0;
const B31: f64 = 3.0 / 32.0;
const B32: f64 = 9.0 / 32.0;
const B41: f64 = 1932.0 / 2197.0;
const B42: f64 = -7200.0 / 2197.0;
const B43: f64 = 7296.0 / 2197.0;
const B51: f64 = 439.0 / 216.0;
const B52: f64 = -8.0;
const B53: f64 = 3680.0 / 513.0;
const B54: f64 = -845.0 / 4104.0;
const B61: f64 = -8.0 / 27.0;
const B62: f64 = 2.0;
const B63: f64 = -3544.0 / 2565.0;
const B64: f64 = 1859.0 / 4104.0;
const B65: f64 = -11.0 / 40.0;
// 5th-order weights.
const C1: f64 = 16.0 / 135.0;
const C3: f64 = 6656.0 / 12825.0;
const C4: f64 = 28561.0 / 56430.0;
const C5: f64 = -9.0 / 50.0;
const C6: f64 = 2.0 / 55.0;
// 4th-order weights (embedded).
const D1: f64 = 25.0 / 216.0;
const D3: f64 = 1408.0 / 2565.0;
const D4: f64 = 2197.0 / 4104.0;
const D5: f64 = -1.0 / 5.0;

fn axpy(out: &mut [f64], x: &[f64], stages: &[(&Vec<f64>, f64)], dt: f64) {
    for i in 0..out.len() {
        let mut acc = 0.0;
        for (k, c) in stages {
            acc += c * k[i];
        }
        out[i] = x[i] + dt * acc;
    }
}

/// Integrate the coupled system from `x0` to `t_end`, recording the state at
/// every accepted step. Domain violations mid-step, non-finite states, and
/// step underflow terminate the run with [`Termination::Diverged`] rather
/// than propagating NaNs.
pub fn integrate(
    system: &CoupledSystem,
    x0: &[f64],
    t_end: f64,
    method: &Method,
) -> Result<Trajectory> {
    if x0.len() != system.stacked_len() {
        return Err(Error::DimensionMismatch {
            context: "initial state length",
            expected: system.stacked_len(),
            actual: x0.len(),
        });
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "t_end must be finite and > 0, got {t_end}"
        )));
    }
    let rhs = RhsAdapter { system };
    if rhs.eval(x0).is_none() {
        // Report the underlying domain error directly.
        system.eval_coupled_f(x0)?;
    }
    match *method {
        Method::Rk4 { dt } => {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "rk4 requires fixed dt > 0, got {dt}"
                )));
            }
            integrate_rk4(&rhs, x0, t_end, dt)
        }
        Method::Rkf45 { abs_tol, rel_tol } => {
            if !(abs_tol > 0.0 && rel_tol >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "rkf45 requires abs_tol > 0 and rel_tol >= 0, got {abs_tol}, {rel_tol}"
                )));
            }
            integrate_rkf45(&rhs, x0, t_end, abs_tol, rel_tol)
        }
    }
}

fn integrate_rk4(rhs: &RhsAdapter, x0: &[f64], t_end: f64, dt: f64) -> Result<Trajectory> {
    let dim = x0.len();
    let mut times = vec![0.0];
    let mut states = vec![x0.to_vec()];
    let mut x = x0.to_vec();
    let mut t = 0.0;
    let mut stats = StepStats {
        steps: 0,
        rejected: 0,
        min_dt: f64::INFINITY,
        max_dt: 0.0,
        max_error_ratio: 0.0,
    };
    let mut termination = Termination::Completed;
    let mut scratch = vec![0.0; dim];
    while t < t_end {
        if stats.steps >= MAX_ACCEPTED_STEPS {
            termination = Termination::StepCap;
            break;
        }
        let h = dt.min(t_end - t);
        let k1 = match rhs.eval(&x) {
            Some(v) => v,
            None => {
                termination = Termination::Diverged;
                break;
            }
        };
        axpy(&mut scratch, &x, &[(&k1, 0.5)], h);
        let k2 = match rhs.eval(&scratch) {
            Some(v) => v,
            None => {
                termination = Termination::Diverged;
                break;
            }
        };
        axpy(&mut scratch, &x, &[(&k2, 0.5)], h);
        let k3 = match rhs.eval(&scratch) {
            Some(v) => v,
            None => {
                termination = Termination::Diverged;
                break;
            }
        };
        axpy(&mut scratch, &x, &[(&k3, 1.0)], h);
        let k4 = match rhs.eval(&scratch) {
            Some(v) => v,
            None => {
                termination = Termination::Diverged;
                break;
            }
        };
        for i in 0..dim {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if !x.iter().all(|v| v.is_finite()) {
            termination = Termination::Diverged;
            break;
        }
        t += h;
        stats.steps += 1;
        stats.min_dt = stats.min_dt.min(h);
        stats.max_dt = stats.max_dt.max(h);
        times.push(t);
        states.push(x.clone());
    }
    if stats.steps == 0 {
        stats.min_dt = 0.0;
    }
    Ok(Trajectory {
        times,
        states,
        method: "rk4",
        step_stats: stats,
        termination,
    })
}

fn integrate_rkf45(
    rhs: &RhsAdapter,
    x0: &[f64],
    t_end: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Trajectory> {
    let dim = x0.len();
    let mut times = vec![0.0];
    let mut states = vec![x0.to_vec()];
    let mut x = x0.to_vec();
    let mut t = 0.0;
    let mut dt = (t_end / 100.0).clamp(MIN_STEP * 10.0, 0.1);
    let mut stats = StepStats {
        steps: 0,
        rejected: 0,
        min_dt: f64::INFINITY,
        max_dt: 0.0,
        max_error_ratio: 0.0,
    };
    let mut termination = Termination::Completed;
    let mut stage = vec![0.0; dim];
    // PI step controller state; damps oscillation against the stability
    // boundary when the system is stiff relative to the step.
    let mut prev_err: f64 = 1.0;

    'outer: while t < t_end {
        if stats.steps >= MAX_ACCEPTED_STEPS {
            termination = Termination::StepCap;
            break;
        }
        let h = dt.min(t_end - t);
        macro_rules! stage_eval {
            ($combo:expr) => {{
                axpy(&mut stage, &x, $combo, h);
                match rhs.eval(&stage) {
                    Some(v) => v,
                    None => {
                        termination = Termination::Diverged;
                        break 'outer;
                    }
                }
            }};
        }
        let k1 = match rhs.eval(&x) {
            Some(v) => v,
            None => {
                termination = Termination::Diverged;
                break;
            }
        };
        let k2 = stage_eval!(&[(&k1, B21)]);
        let k3 = stage_eval!(&[(&k1, B31), (&k2, B32)]);
        let k4 = stage_eval!(&[(&k1, B41), (&k2, B42), (&k3, B43)]);
        let k5 = stage_eval!(&[(&k1, B51), (&k2, B52), (&k3, B53), (&k4, B54)]);
        let k6 = stage_eval!(&[(&k1, B61), (&k2, B62), (&k3, B63), (&k4, B64), (&k5, B65)]);

        // Fifth-order candidate and embedded fourth/fifth error estimate.
        let mut err_norm = 0.0f64;
        let mut tol_norm = f64::INFINITY;
        let mut candidate = x.clone();
        let mut finite = true;
        for i in 0..dim {
            let y5 =
                x[i] + h * (C1 * k1[i] + C3 * k3[i] + C4 * k4[i] + C5 * k5[i] + C6 * k6[i]);
            let y4 = x[i] + h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i]);
            let e = (y5 - y4).abs();
            let tol = abs_tol + rel_tol * y5.abs();
            err_norm = err_norm.max(e / tol);
            tol_norm = tol_norm.min(tol);
            candidate[i] = y5;
            finite &= y5.is_finite();
        }
        if !finite {
            termination = Termination::Diverged;
            break;
        }
        if err_norm <= 1.0 {
            x = candidate;
            t += h;
            stats.steps += 1;
            stats.min_dt = stats.min_dt.min(h);
            stats.max_dt = stats.max_dt.max(h);
            stats.max_error_ratio = stats.max_error_ratio.max(err_norm);
            times.push(t);
            states.push(x.clone());
            // PI controller (order-5 exponents 0.7/5 and 0.4/5).
            let e = err_norm.max(1e-10);
            let factor = (0.9 * e.powf(-0.14) * prev_err.powf(0.08)).clamp(0.1, 5.0);
            prev_err = e;
            dt = h * factor;
        } else {
            stats.rejected += 1;
            dt = h * (0.9 * err_norm.powf(-0.2)).clamp(0.1, 0.9);
        }
        if dt < MIN_STEP {
            termination = Termination::Diverged;
            break;
        }
    }
    if stats.steps == 0 {
        stats.min_dt = 0.0;
    }
    Ok(Trajectory {
        times,
        states,
        method: "rkf45",
        step_stats: stats,
        termination,
    })
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn classify(final_distance: f64, initial_distance: f64, escaped: bool) -> ConvergenceClass {
    if escaped || final_distance >= DIVERGE_FACTOR * initial_distance {
        ConvergenceClass::Diverged
    } else if final_distance <= CONVERGE_FACTOR * initial_distance {
        ConvergenceClass::Converged
    } else {
        ConvergenceClass::Inconclusive
    }
}

/// Horizon heuristic `10 / |abscissa|`, capped at [`HORIZON_CAP`].
pub fn default_horizon(abscissa: f64) -> f64 {
    if abscissa.abs() < 1e-12 {
        HORIZON_CAP
    } else {
        (10.0 / abscissa.abs()).min(HORIZON_CAP)
    }
}

/// Seeded perturbation trials around a homogeneous equilibrium.
///
/// Each trial displaces the equilibrium by `delta` along a random unit
/// direction (deterministic from `seed`), integrates with RKF45 defaults to
/// `horizon`, and classifies the final/initial distance ratio. `delta = 0`
/// degenerates to a homogeneity check: the state must stay at the
/// equilibrium up to integrator tolerance.
pub fn perturb_and_classify(
    system: &CoupledSystem,
    equilibrium: &HomogeneousEquilibrium,
    delta: f64,
    horizon: f64,
    trials: usize,
    seed: u64,
) -> Result<PerturbationOutcome> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must be finite and >= 0, got {delta}"
        )));
    }
    if trials < 1 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let dim = system.stacked_len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = Vec::with_capacity(trials);
    let mut sample = None;
    let method = Method::rkf45_default();
    for _ in 0..trials {
        // Isotropic direction from normalized Gaussian components.
        let mut dir = vec![0.0; dim];
        loop {
            let mut norm_sq = 0.0;
            for d in dir.iter_mut() {
                // Box-Muller from two uniforms.
                let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
                let u2: f64 = rng.gen_range(0.0..1.0);
                *d = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                norm_sq += *d * *d;
            }
            if norm_sq > 1e-12 {
                let norm = norm_sq.sqrt();
                for d in dir.iter_mut() {
                    *d /= norm;
                }
                break;
            }
        }
        let x0: Vec<f64> = equilibrium
            .stacked
            .iter()
            .zip(&dir)
            .map(|(x, d)| x + delta * d)
            .collect();
        let initial_distance = distance(&x0, &equilibrium.stacked);
        let trajectory = integrate(system, &x0, horizon, &method)?;
        let final_distance = distance(trajectory.final_state(), &equilibrium.stacked);
        let escaped = trajectory.termination == Termination::Diverged;
        let classification = if delta == 0.0 {
            // No perturbation: converged by definition if the state stayed put.
            if final_distance <= 1e-8 && trajectory.termination == Termination::Completed {
                ConvergenceClass::Converged
            } else {
                ConvergenceClass::Inconclusive
            }
        } else if trajectory.termination == Termination::StepCap {
            ConvergenceClass::Inconclusive
        } else {
            classify(final_distance, initial_distance, escaped)
        };
        results.push(ConvergenceResult {
            classification,
            initial_distance,
            final_distance,
            horizon,
        });
        if sample.is_none() {
            sample = Some(trajectory);
        }
    }
    let any_diverged = results
        .iter()
        .any(|r| r.classification == ConvergenceClass::Diverged);
    let all_converged = results
        .iter()
        .all(|r| r.classification == ConvergenceClass::Converged);
    let aggregate_class = if all_converged {
        ConvergenceClass::Converged
    } else if any_diverged {
        ConvergenceClass::Diverged
    } else {
        ConvergenceClass::Inconclusive
    };
    let worst = results
        .iter()
        .map(|r| r.final_distance)
        .fold(0.0, f64::max);
    let aggregate = ConvergenceResult {
        classification: aggregate_class,
        initial_distance: delta,
        final_distance: worst,
        horizon,
    };
    Ok(PerturbationOutcome {
        aggregate,
        trials: results,
        sample_trajectory: sample.expect("at least one trial"),
    })
}
