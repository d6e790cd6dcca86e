//! Per-patch ODE dynamics.
//!
//! Three builtin two-species predator-prey models plus user-supplied custom
//! dynamics. State vectors hold population densities `(x1, x2)` = (prey,
//! predator) for the builtins.
//!
//! * Rosenzweig-MacArthur (Holling type II response):
//!   `x1' = x1 (1 - x1/gamma) - x1 x2 / (1 + x1)`,
//!   `x2' = beta (x1/(1+x1) - alpha) x2`
//! * Lotka-Volterra:
//!   `x1' = r x1 - c x1 x2`, `x2' = b x1 x2 - m x2`
//! * ratio-dependent response:
//!   `x1' = x1 (1 - x1) - c x1 x2 / (x1 + x2)`,
//!   `x2' = m (b x1/(x1+x2) - 1) x2`
//!
//! Every builtin carries its analytic Jacobian; [`fd_jacobian`] is the
//! independent central-difference oracle the analytic forms are tested
//! against, and the fallback for custom models without a Jacobian.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use std::sync::Arc;

/// Right-hand side of a custom model: writes `f(x)` into the output slice.
pub type CustomRhs = dyn Fn(&[f64], &mut [f64]) + Send + Sync;
/// Analytic Jacobian of a custom model: writes `Df(x)` into the matrix.
pub type CustomJac = dyn Fn(&[f64], &mut DenseMatrix) + Send + Sync;

/// User-supplied dynamics of arbitrary dimension. When `jacobian` is absent,
/// [`PatchModel::eval_jacobian`] falls back to finite differences.
#[derive(Clone)]
pub struct CustomModel {
    pub dim: usize,
    pub f: Arc<CustomRhs>,
    pub jacobian: Option<Arc<CustomJac>>,
}

impl std::fmt::Debug for CustomModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CustomModel")
            .field("dim", &self.dim)
            .field("jacobian", &self.jacobian.is_some())
            .finish()
    }
}

/// One patch's local dynamics.
#[derive(Debug, Clone)]
pub enum PatchModel {
    RosenzweigMacarthur { gamma: f64, beta: f64, alpha: f64 },
    LotkaVolterra { r: f64, c: f64, b: f64, m: f64 },
    RatioDependent { c: f64, b: f64, m: f64 },
    Custom(CustomModel),
}

fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "parameter {name} must be finite and > 0, got {value}"
        )))
    }
}

impl PatchModel {
    pub fn rosenzweig_macarthur(gamma: f64, beta: f64, alpha: f64) -> Result<Self> {
        require_positive("gamma", gamma)?;
        require_positive("beta", beta)?;
        if !(alpha.is_finite() && alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "parameter alpha must lie in (0,1), got {alpha}"
            )));
        }
        Ok(Self::RosenzweigMacarthur { gamma, beta, alpha })
    }

    pub fn lotka_volterra(r: f64, c: f64, b: f64, m: f64) -> Result<Self> {
        require_positive("r", r)?;
        require_positive("c", c)?;
        require_positive("b", b)?;
        require_positive("m", m)?;
        Ok(Self::LotkaVolterra { r, c, b, m })
    }

    pub fn ratio_dependent(c: f64, b: f64, m: f64) -> Result<Self> {
        require_positive("c", c)?;
        require_positive("b", b)?;
        require_positive("m", m)?;
        Ok(Self::RatioDependent { c, b, m })
    }

    pub fn custom(model: CustomModel) -> Result<Self> {
        if model.dim < 1 {
            return Err(Error::InvalidArgument(
                "custom model dimension must be >= 1".into(),
            ));
        }
        Ok(Self::Custom(model))
    }

    /// Number of state variables.
    pub fn dim(&self) -> usize {
        match self {
            Self::Custom(c) => c.dim,
            _ => 2,
        }
    }

    fn check_state(&self, state: &[f64]) -> Result<()> {
        if state.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "patch state length",
                expected: self.dim(),
                actual: state.len(),
            });
        }
        if !state.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFiniteEntry {
                context: "patch state",
            });
        }
        Ok(())
    }

    /// Reject states where a builtin denominator is singular: `1 + x1 = 0`
    /// for the Holling response, `x1 + x2 <= 0` for the ratio-dependent
    /// response (the origin is rejected rather than limit-patched).
    fn check_domain(&self, state: &[f64]) -> Result<()> {
        match self {
            Self::RosenzweigMacarthur { .. } if 1.0 + state[0] == 0.0 => {
                Err(Error::DomainViolation {
                    denominator: "1 + x1",
                })
            }
            Self::RatioDependent { .. } if state[0] + state[1] <= 0.0 => {
                Err(Error::DomainViolation {
                    denominator: "x1 + x2",
                })
            }
            _ => Ok(()),
        }
    }

    /// Right-hand side `f(x)`.
    pub fn eval_f(&self, state: &[f64]) -> Result<Vec<f64>> {
        self.check_state(state)?;
        self.check_domain(state)?;
        let out = match self {
            Self::RosenzweigMacarthur { gamma, beta, alpha } => {
                let (x, y) = (state[0], state[1]);
                let h = x / (1.0 + x);
                vec![x * (1.0 - x / gamma) - h * y, beta * (h - alpha) * y]
            }
            Self::LotkaVolterra { r, c, b, m } => {
                let (x, y) = (state[0], state[1]);
                vec![r * x - c * x * y, b * x * y - m * y]
            }
            Self::RatioDependent { c, b, m } => {
                let (x, y) = (state[0], state[1]);
                let s = x + y;
                vec![x * (1.0 - x) - c * x * y / s, m * (b * x / s - 1.0) * y]
            }
            Self::Custom(custom) => {
                let mut out = vec![0.0; custom.dim];
                (custom.f)(state, &mut out);
                out
            }
        };
        if !out.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteEntry {
                context: "model right-hand side",
            });
        }
        Ok(out)
    }

    /// Analytic Jacobian `Df(x)`; custom models without one fall back to
    /// central differences.
    pub fn eval_jacobian(&self, state: &[f64]) -> Result<DenseMatrix> {
        self.check_state(state)?;
        self.check_domain(state)?;
        match self {
            Self::RosenzweigMacarthur { gamma, beta, alpha } => {
                let (x, y) = (state[0], state[1]);
                let d = 1.0 + x;
                let mut j = DenseMatrix::zeros(2, 2);
                j[(0, 0)] = 1.0 - 2.0 * x / gamma - y / (d * d);
                j[(0, 1)] = -x / d;
                j[(1, 0)] = beta * y / (d * d);
                j[(1, 1)] = beta * (x / d - alpha);
                Ok(j)
            }
            Self::LotkaVolterra { r, c, b, m } => {
                let (x, y) = (state[0], state[1]);
                let mut j = DenseMatrix::zeros(2, 2);
                j[(0, 0)] = r - c * y;
                j[(0, 1)] = -c * x;
                j[(1, 0)] = b * y;
                j[(1, 1)] = b * x - m;
                Ok(j)
            }
            Self::RatioDependent { c, b, m } => {
                let (x, y) = (state[0], state[1]);
                let s = x + y;
                let s2 = s * s;
                let mut j = DenseMatrix::zeros(2, 2);
                j[(0, 0)] = 1.0 - 2.0 * x - c * y * y / s2;
                j[(0, 1)] = -c * x * x / s2;
                j[(1, 0)] = m * b * y * y / s2;
                j[(1, 1)] = m * (b * x / s - 1.0) - m * b * x * y / s2;
                Ok(j)
            }
            Self::Custom(custom) => match &custom.jacobian {
                Some(jac) => {
                    let mut j = DenseMatrix::zeros(custom.dim, custom.dim);
                    jac(state, &mut j);
                    Ok(j)
                }
                None => self.fd_jacobian(state, None),
            },
        }
    }

    /// Central-difference Jacobian: column `q` is
    /// `(f(x + h e_q) - f(x - h e_q)) / (2h)` with per-column default
    /// `h = eps^(1/3) * max(1, |x_q|)`.
    pub fn fd_jacobian(&self, state: &[f64], h: Option<f64>) -> Result<DenseMatrix> {
        self.check_state(state)?;
        let n = self.dim();
        let mut j = DenseMatrix::zeros(n, n);
        let default_scale = f64::EPSILON.powf(1.0 / 3.0);
        let mut probe = state.to_vec();
        for q in 0..n {
            let hq = match h {
                Some(v) if v > 0.0 => v,
                Some(v) => {
                    return Err(Error::InvalidArgument(format!(
                        "finite-difference step must be > 0, got {v}"
                    )))
                }
                None => default_scale * state[q].abs().max(1.0),
            };
            probe[q] = state[q] + hq;
            let f_plus = self.eval_f(&probe)?;
            probe[q] = state[q] - hq;
            let f_minus = self.eval_f(&probe)?;
            probe[q] = state[q];
            for p in 0..n {
                j[(p, q)] = (f_plus[p] - f_minus[p]) / (2.0 * hq);
            }
        }
        Ok(j)
    }

    /// Damped Newton iteration for `f(x) = 0` from `guess`.
    ///
    /// Stops when the residual infinity norm drops to 1e-12; fails after 100
    /// iterations or on a singular Jacobian. Nonpositive equilibrium
    /// components are reported as warnings, not errors.
    pub fn find_equilibrium(&self, guess: &[f64]) -> Result<Equilibrium> {
        const TOL: f64 = 1e-12;
        const MAX_ITER: usize = 100;
        const MAX_HALVINGS: usize = 20;

        self.check_state(guess)?;
        let mut x = guess.to_vec();
        let mut f = self.eval_f(&x)?;
        let mut residual = inf_norm(&f);
        let mut iterations = 0;
        while residual > TOL && iterations < MAX_ITER {
            let jac = self.eval_jacobian(&x)?;
            let lu = crate::linalg::LuDecomposition::new(&jac)?;
            let step = lu.solve(&f)?;
            // Halve the step until the residual actually decreases.
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..=MAX_HALVINGS {
                let candidate: Vec<f64> =
                    x.iter().zip(&step).map(|(xi, si)| xi - lambda * si).collect();
                if let Ok(fc) = self.eval_f(&candidate) {
                    let rc = inf_norm(&fc);
                    if rc < residual {
                        x = candidate;
                        f = fc;
                        residual = rc;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
            iterations += 1;
        }
        if residual > TOL {
            return Err(Error::NoConvergence {
                algorithm: "Newton equilibrium search",
                iterations,
                residual,
                diagnostics: String::new(),
            });
        }
        let mut warnings = Vec::new();
        for (i, v) in x.iter().enumerate() {
            if *v <= 0.0 {
                warnings.push(format!(
                    "equilibrium component x{} = {v:.6e} is not positive",
                    i + 1
                ));
            }
        }
        Ok(Equilibrium {
            state: x,
            residual,
            iterations,
            warnings,
        })
    }
}

/// Converged output of [`PatchModel::find_equilibrium`].
#[derive(Debug, Clone)]
pub struct Equilibrium {
    pub state: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}
