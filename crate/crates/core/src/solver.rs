//! Driver loop shared by PGMM and SPG: `x_{k+1} = x_k + μ_k d_k` with an
//! Armijo-type line search along a feasible direction.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::direction::{compute_direction, spectral_eta};
use crate::error::{Error, Result};
use crate::line_search::{armijo_search, gll_reference, LineSearchParams};
use crate::numerics::{projected_step, DenseVector, Objective};
use crate::sets::{ConstraintSet, FEASIBILITY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Momentum directions, monotone Armijo search.
    Pgmm,
    /// Spectral projected gradient directions, nonmonotone search.
    Spg,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Pgmm, Method::Spg];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Pgmm => "pgmm",
            Method::Spg => "spg",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pgmm" => Ok(Method::Pgmm),
            "spg" => Ok(Method::Spg),
            other => Err(Error::invalid(format!("unknown solver '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    pub gamma: f64,
    pub delta: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub max_backtracks: usize,
    pub eta_min: f64,
    pub eta_max: f64,
    pub c1_bar: f64,
    pub c2_bar: f64,
    pub nu1: f64,
    pub nu2: f64,
    /// Stop once `‖P[x − ∇f(x)] − x‖∞` drops to this value.
    pub tol_residual: f64,
    pub max_iters: usize,
    /// Stop once `‖x_k − x_{k−1}‖²` drops below this value.
    pub tol_step_sq: f64,
    /// Memory of the nonmonotone reference (SPG only).
    pub gll_window: usize,
    /// η used by the gradient-related check; `None` means the current η_k.
    pub check_eta: Option<f64>,
    pub keep_trace: bool,
    /// Project an infeasible starting point instead of rejecting it.
    pub project_infeasible_start: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::Pgmm,
            gamma: 1e-4,
            delta: 0.5,
            sigma_min: 0.1,
            sigma_max: 0.9,
            max_backtracks: 100,
            eta_min: 1e-10,
            eta_max: 1e10,
            c1_bar: 1e-6,
            c2_bar: 1e-6,
            nu1: 1e-12,
            nu2: 1e12,
            tol_residual: 1e-5,
            max_iters: 100_000,
            tol_step_sq: 1e-15,
            gll_window: 10,
            check_eta: None,
            keep_trace: false,
            project_infeasible_start: false,
        }
    }
}

impl SolverConfig {
    pub fn with_method(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn line_search_params(&self) -> LineSearchParams {
        LineSearchParams {
            gamma: self.gamma,
            delta: self.delta,
            sigma_min: self.sigma_min,
            sigma_max: self.sigma_max,
            max_backtracks: self.max_backtracks,
        }
    }

    /// Constants `(c1, c2)` for which every PGMM direction is gradient related:
    /// the worst case over the accepted, repaired and fallback branches.
    pub fn effective_constants(&self) -> (f64, f64) {
        let inv_eta_max = 1.0 / self.eta_max;
        let c1 = self.c1_bar.min(self.nu1 / 4.0).min(inv_eta_max);
        let ratio = self.eta_min / self.eta_max;
        let repaired_c2 = (self.nu1 / self.nu2) * ratio * ratio * (inv_eta_max - 0.5 * self.nu1);
        let c2 = self.c2_bar.min(repaired_c2).min(inv_eta_max);
        (c1, c2)
    }

    pub fn validate(&self) -> Result<()> {
        self.line_search_params().validate()?;
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        positive("eta_min", self.eta_min)?;
        positive("eta_max", self.eta_max)?;
        positive("c1_bar", self.c1_bar)?;
        positive("c2_bar", self.c2_bar)?;
        positive("nu1", self.nu1)?;
        positive("nu2", self.nu2)?;
        positive("tol_residual", self.tol_residual)?;
        if !(self.tol_step_sq >= 0.0) {
            return Err(Error::invalid("tol_step_sq must be nonnegative"));
        }
        if let Some(eta) = self.check_eta {
            positive("check_eta", eta)?;
        }
        if self.eta_min > self.eta_max {
            return Err(Error::invalid("eta_min must not exceed eta_max"));
        }
        if self.nu1 > self.nu2 {
            return Err(Error::invalid("nu1 must not exceed nu2"));
        }
        if self.eta_max >= 2.0 / self.nu1 {
            return Err(Error::invalid(format!(
                "eta_max ({}) must be below 2/nu1 ({})",
                self.eta_max,
                2.0 / self.nu1
            )));
        }
        if self.max_iters == 0 || self.gll_window == 0 {
            return Err(Error::invalid("max_iters and gll_window must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIters,
    SmallStep,
    LineSearchFail,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIters => "max_iters",
            Termination::SmallStep => "small_step",
            Termination::LineSearchFail => "line_search_failure",
        }
    }

    pub fn is_success(&self) -> bool {
        matches!(self, Termination::Converged)
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Termination {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "converged" => Ok(Termination::Converged),
            "max_iters" => Ok(Termination::MaxIters),
            "small_step" => Ok(Termination::SmallStep),
            "line_search_failure" => Ok(Termination::LineSearchFail),
            other => Err(Error::invalid(format!("unknown status '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub iterations: usize,
    pub f_evals: usize,
    pub g_evals: usize,
    pub projections: usize,
    /// Iterations whose direction needed the three interpolation evaluations.
    pub interpolations: usize,
    pub line_search_evals: usize,
}

/// One accepted step `x_k → x_{k+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub f: f64,
    pub f_next: f64,
    /// Acceptance reference used by the line search.
    pub f_ref: f64,
    pub residual_inf: f64,
    pub eta_k: f64,
    /// `φ_{η_k}(x_k) = ‖d̂_k‖`
    pub phi_eta_k: f64,
    /// `φ_1(x_k)`
    pub phi_unit: f64,
    pub grad_dot_d: f64,
    pub d_norm_sq: f64,
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub fallback: bool,
    pub repaired: bool,
    pub backtracks: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub method: Method,
    pub termination: Termination,
    pub counters: Counters,
    pub trace: Option<Vec<IterationRecord>>,
    pub x_final: DenseVector,
    pub f_final: f64,
    pub f_initial: f64,
    pub residual_inf: f64,
    pub wall_time: f64,
    pub gamma: f64,
}

struct RunState {
    counters: Counters,
    trace: Option<Vec<IterationRecord>>,
    started: Instant,
}

impl RunState {
    fn finish(
        self,
        config: &SolverConfig,
        termination: Termination,
        x: DenseVector,
        f: f64,
        f_initial: f64,
        residual: f64,
    ) -> RunRecord {
        RunRecord {
            method: config.method,
            termination,
            counters: self.counters,
            trace: self.trace,
            x_final: x,
            f_final: f,
            f_initial,
            residual_inf: residual,
            wall_time: self.started.elapsed().as_secs_f64(),
            gamma: config.gamma,
        }
    }
}

/// Minimizes `obj` over `set` from `x0` with the configured method.
pub fn solve(
    obj: &dyn Objective,
    set: &ConstraintSet,
    x0: &DenseVector,
    config: &SolverConfig,
) -> Result<RunRecord> {
    config.validate()?;
    set.validate()?;
    let n = obj.dim();
    if set.dim() != n || x0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if set.dim() != n { set.dim() } else { x0.len() },
        });
    }

    let mut state = RunState {
        counters: Counters::default(),
        trace: config.keep_trace.then(Vec::new),
        started: Instant::now(),
    };

    let mut x = if set.contains(x0, FEASIBILITY_TOL)? {
        x0.clone()
    } else if config.project_infeasible_start {
        log::warn!("starting point is infeasible; projecting it onto the set");
        state.counters.projections += 1;
        set.project(x0)?
    } else {
        return Err(Error::Infeasible);
    };

    let (mut f, mut g) = obj.value_and_gradient(&x);
    state.counters.f_evals += 1;
    state.counters.g_evals += 1;
    if !f.is_finite() {
        return Err(Error::NonFinite(format!(
            "objective at the starting point is {f}"
        )));
    }
    check_gradient(&g)?;
    let f_initial = f;

    let params = config.line_search_params();
    let mut history = vec![f];
    let mut x_prev = x.clone();
    let mut g_prev = g.clone();
    let mut step_sq = f64::INFINITY;
    let mut k = 0usize;

    loop {
        let unit_step = projected_step(set, &x, &g, 1.0)?;
        state.counters.projections += 1;
        let residual = unit_step.amax();

        let stop = if residual <= config.tol_residual {
            Some(Termination::Converged)
        } else if k >= 1 && step_sq < config.tol_step_sq {
            Some(Termination::SmallStep)
        } else if k >= config.max_iters {
            Some(Termination::MaxIters)
        } else {
            None
        };
        if let Some(reason) = stop {
            state.counters.iterations = k;
            return Ok(state.finish(config, reason, x, f, f_initial, residual));
        }

        let eta_k = if k == 0 {
            (1.0 / residual).clamp(config.eta_min, config.eta_max)
        } else {
            spectral_eta(
                &(&x - &x_prev),
                &(&g - &g_prev),
                config.eta_min,
                config.eta_max,
            )
        };

        let (d, d_hat_norm, alpha, beta, fallback, repaired) =
            if k == 0 || config.method == Method::Spg {
                let d_hat = projected_step(set, &x, &g, eta_k)?;
                state.counters.projections += 1;
                let norm = d_hat.norm();
                (d_hat, norm, 1.0, 0.0, true, false)
            } else {
                let res = compute_direction(obj, set, &x, &x_prev, &g, f, eta_k, config)?;
                state.counters.projections += res.projections;
                state.counters.f_evals += res.f_evals;
                if res.f_evals > 0 {
                    state.counters.interpolations += 1;
                }
                let d_hat_norm = res.d_hat_norm;
                (
                    res.d,
                    d_hat_norm,
                    res.alpha,
                    res.beta,
                    res.used_fallback,
                    res.matrix_repaired,
                )
            };

        let slope = g.dot(&d);
        let f_ref = match config.method {
            Method::Pgmm => f,
            Method::Spg => gll_reference(&history, config.gll_window)?,
        };
        let outcome = if slope < 0.0 {
            match armijo_search(obj, &x, &d, f, f_ref, slope, &params, 1.0) {
                Ok(out) => Some(out),
                Err(Error::LineSearchFailure { .. }) => {
                    state.counters.f_evals += params.max_backtracks + 1;
                    state.counters.line_search_evals += params.max_backtracks + 1;
                    None
                }
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        let Some(ls) = outcome else {
            state.counters.iterations = k;
            return Ok(state.finish(
                config,
                Termination::LineSearchFail,
                x,
                f,
                f_initial,
                residual,
            ));
        };
        state.counters.f_evals += ls.f_evals;
        state.counters.line_search_evals += ls.f_evals;

        let g_new = obj.gradient(&ls.x_new);
        state.counters.g_evals += 1;
        check_gradient(&g_new)?;

        if let Some(trace) = state.trace.as_mut() {
            trace.push(IterationRecord {
                k,
                f,
                f_next: ls.f_new,
                f_ref,
                residual_inf: residual,
                eta_k,
                phi_eta_k: d_hat_norm,
                phi_unit: unit_step.norm(),
                grad_dot_d: slope,
                d_norm_sq: d.norm_squared(),
                mu: ls.mu,
                alpha,
                beta,
                fallback,
                repaired,
                backtracks: ls.backtracks,
            });
        }

        x_prev = std::mem::replace(&mut x, ls.x_new);
        g_prev = std::mem::replace(&mut g, g_new);
        f = ls.f_new;
        history.push(f);
        step_sq = (&x - &x_prev).norm_squared();
        k += 1;
    }
}

fn check_gradient(g: &DenseVector) -> Result<()> {
    if g.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("gradient".into()))
    }
}

/// Which stationarity measure the trace check compares against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceEta {
    /// φ at the iteration's own η_k.
    Iterate,
    /// φ at η = 1.
    Unit,
}

/// Re-checks, for every recorded iteration, `gᵀd ≤ −c1‖d‖²`, `gᵀd ≤ −c2φ²`
/// and the decrease `f(x_k) − f(x_{k+1}) ≥ γ μ_k |gᵀd|`.
pub fn check_assumption2_trace(
    record: &RunRecord,
    c1: f64,
    c2: f64,
    eta: TraceEta,
) -> Result<bool> {
    let trace = record.trace.as_ref().ok_or(Error::MissingTrace)?;
    Ok(trace.iter().all(|it| {
        let phi = match eta {
            TraceEta::Iterate => it.phi_eta_k,
            TraceEta::Unit => it.phi_unit,
        };
        it.grad_dot_d <= -c1 * it.d_norm_sq
            && it.grad_dot_d <= -c2 * phi * phi
            && it.f - it.f_next >= record.gamma * it.mu * it.grad_dot_d.abs()
    }))
}
