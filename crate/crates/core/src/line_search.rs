//! Armijo backtracking with safeguarded quadratic interpolation, in monotone
//! form or with the Grippo–Lampariello–Lucidi nonmonotone reference value.

use crate::error::{Error, Result};
use crate::numerics::{DenseVector, Objective};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchParams {
    /// Sufficient-decrease constant.
    pub gamma: f64,
    /// Plain reduction factor, used when the interpolation step is unusable.
    pub delta: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub max_backtracks: usize,
}

impl Default for LineSearchParams {
    fn default() -> Self {
        Self {
            gamma: 1e-4,
            delta: 0.5,
            sigma_min: 0.1,
            sigma_max: 0.9,
            max_backtracks: 100,
        }
    }
}

impl LineSearchParams {
    pub fn validate(&self) -> Result<()> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.gamma) || !open_unit(self.delta) {
            return Err(Error::invalid(format!(
                "gamma and delta must lie in (0, 1), got {} and {}",
                self.gamma, self.delta
            )));
        }
        if !(self.sigma_min > 0.0 && self.sigma_min <= self.sigma_max && self.sigma_max < 1.0) {
            return Err(Error::invalid(format!(
                "need 0 < sigma_min <= sigma_max < 1, got {} and {}",
                self.sigma_min, self.sigma_max
            )));
        }
        if self.max_backtracks == 0 {
            return Err(Error::invalid("max_backtracks must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Monotone,
    /// Reference value is the max over the last `window` objective values.
    Nonmonotone {
        window: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchOutcome {
    pub mu: f64,
    pub f_new: f64,
    pub x_new: DenseVector,
    pub backtracks: usize,
    pub f_evals: usize,
}

/// Max of the last `min(window, len)` values.
pub fn gll_reference(history: &[f64], window: usize) -> Result<f64> {
    if history.is_empty() {
        return Err(Error::invalid("GLL reference needs a nonempty history"));
    }
    if window == 0 {
        return Err(Error::invalid("GLL window must be positive"));
    }
    let start = history.len().saturating_sub(window);
    Ok(history[start..]
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Backtracks from `mu_init` until `f(x + μd) ≤ f_ref + γ μ slope`.
///
/// `f_x` is `f(x)`; it feeds the interpolation model even when the acceptance
/// test uses a nonmonotone `f_ref`.
#[allow(clippy::too_many_arguments)]
pub fn armijo_search(
    obj: &dyn Objective,
    x: &DenseVector,
    d: &DenseVector,
    f_x: f64,
    f_ref: f64,
    slope: f64,
    params: &LineSearchParams,
    mu_init: f64,
) -> Result<LineSearchOutcome> {
    if !(slope < 0.0) {
        return Err(Error::NotDescent { slope });
    }
    if !(mu_init > 0.0) {
        return Err(Error::invalid(format!(
            "initial step must be positive, got {mu_init}"
        )));
    }
    let mut mu = mu_init;
    let mut backtracks = 0;
    let mut f_evals = 0;
    loop {
        let x_new = x + d * mu;
        let f_new = obj.value(&x_new);
        f_evals += 1;
        if f_new <= f_ref + params.gamma * mu * slope {
            return Ok(LineSearchOutcome {
                mu,
                f_new,
                x_new,
                backtracks,
                f_evals,
            });
        }
        if backtracks == params.max_backtracks {
            return Err(Error::LineSearchFailure { backtracks });
        }
        backtracks += 1;
        mu = next_trial(mu, f_x, f_new, slope, params);
    }
}

/// Minimizer of the quadratic through `f(x)`, the slope, and the rejected
/// trial value, safeguarded into `[σ_min μ, σ_max μ]`.
fn next_trial(mu: f64, f_x: f64, f_trial: f64, slope: f64, params: &LineSearchParams) -> f64 {
    let curvature = f_trial - f_x - mu * slope;
    let mu_q = -slope * mu * mu / (2.0 * curvature);
    if mu_q.is_finite() && mu_q > 0.0 {
        mu_q.max(params.sigma_min * mu).min(params.sigma_max * mu)
    } else {
        params.delta * mu
    }
}
