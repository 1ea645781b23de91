//! Momentum search direction `d = α d̂ + β ŝ`.
//!
//! `d̂` is the projected gradient step and `ŝ` the projection-corrected
//! previous displacement. The weights come from minimizing an interpolated
//! bivariate quadratic model over the unit simplex, which keeps `x + d`
//! feasible for any convex set. If the resulting direction fails the
//! gradient-related test, the model matrix is clamped so that its
//! norm-scaled version is uniformly positive definite, and the subproblem is
//! solved again.

use crate::error::{Error, Result};
use crate::numerics::{projected_step, DenseVector, Objective};
use crate::qp2d::{minimize_on_simplex, Quad2DCoefficients, SimplexPoint};
use crate::sets::ConstraintSet;
use crate::solver::SolverConfig;

/// Relative threshold under which `ŝ` is treated as zero.
pub const MOMENTUM_ZERO_TOL: f64 = 1e-14;

/// Spectral (Barzilai–Borwein) parameter `sᵀs / sᵀy`, clamped to
/// `[eta_min, eta_max]`; `eta_max` when the curvature `sᵀy` is not positive.
pub fn spectral_eta(s: &DenseVector, y: &DenseVector, eta_min: f64, eta_max: f64) -> f64 {
    let sty = s.dot(y);
    if sty > 0.0 {
        let q = s.norm_squared() / sty;
        q.max(eta_min).min(eta_max)
    } else {
        eta_max
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaseDirections {
    /// `P[x_k − η_k ∇f(x_k)] − x_k`
    pub d_hat: DenseVector,
    /// `P[x_k + (x_k − x_{k−1})] − x_k`
    pub s_hat: DenseVector,
    pub eta_k: f64,
}

pub fn base_directions(
    set: &ConstraintSet,
    x_k: &DenseVector,
    x_prev: &DenseVector,
    grad_k: &DenseVector,
    eta_k: f64,
) -> Result<BaseDirections> {
    if !(eta_k > 0.0) {
        return Err(Error::invalid(format!(
            "eta_k must be positive, got {eta_k}"
        )));
    }
    let d_hat = projected_step(set, x_k, grad_k, eta_k)?;
    let extrapolated = x_k * 2.0 - x_prev;
    let s_hat = set.project(&extrapolated)? - x_k;
    Ok(BaseDirections {
        d_hat,
        s_hat,
        eta_k,
    })
}

/// Interpolated model `φ(α,β) = f₀ + lin_d α + lin_s β + ½[α β] H [α β]ᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadModel2D {
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
    /// `∇f(x_k)ᵀ d̂`
    pub lin_d: f64,
    /// `∇f(x_k)ᵀ ŝ`
    pub lin_s: f64,
}

impl QuadModel2D {
    pub fn coefficients(&self) -> Quad2DCoefficients {
        Quad2DCoefficients::new(self.h11, self.h12, self.h22, self.lin_d, self.lin_s)
    }
}

/// Recovers `H` from the values `F1 = f(x + ½ŝ)`, `F2 = f(x + ½d̂)`,
/// `F3 = f(x + ½d̂ + ½ŝ)` and `f0 = f(x)`.
pub fn interpolate_model(
    f0: f64,
    lin_d: f64,
    lin_s: f64,
    f1: f64,
    f2: f64,
    f3: f64,
) -> Result<QuadModel2D> {
    if ![f0, lin_d, lin_s, f1, f2, f3].iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite(format!(
            "interpolation values f0={f0}, F1={f1}, F2={f2}, F3={f3}"
        )));
    }
    let h22 = 8.0 * (f1 - f0 - 0.5 * lin_s);
    let h11 = 8.0 * (f2 - f0 - 0.5 * lin_d);
    let h12 = 4.0 * (f3 - f0 - 0.5 * (lin_d + lin_s)) - 0.5 * (h11 + h22);
    Ok(QuadModel2D {
        h11,
        h12,
        h22,
        lin_d,
        lin_s,
    })
}

/// `gᵀd ≤ −c̄1‖d‖²` and `gᵀd ≤ −c̄2 φ²`.
pub fn gradient_related_check(
    grad_dot_d: f64,
    d_norm_sq: f64,
    phi_eta_sq: f64,
    c1_bar: f64,
    c2_bar: f64,
) -> bool {
    grad_dot_d <= -c1_bar * d_norm_sq && grad_dot_d <= -c2_bar * phi_eta_sq
}

/// Clamps `H` so that `D⁻¹ H D⁻¹`, with `D = diag(‖d̂‖, ‖ŝ‖)`, has smallest
/// eigenvalue at least `nu1` and (1,1) entry at most `nu2`.
pub fn repair_matrix(
    model: &QuadModel2D,
    d_hat_norm: f64,
    s_hat_norm: f64,
    nu1: f64,
    nu2: f64,
) -> Result<QuadModel2D> {
    if !(d_hat_norm > 0.0 && s_hat_norm > 0.0) {
        return Err(Error::invalid(
            "matrix repair needs nonzero base directions; take the fallback path",
        ));
    }
    if !(nu1 > 0.0 && nu1 <= nu2) {
        return Err(Error::invalid(format!(
            "need 0 < nu1 <= nu2, got {nu1}, {nu2}"
        )));
    }
    let dd = d_hat_norm * d_hat_norm;
    let ss = s_hat_norm * s_hat_norm;
    let h11 = model.h11.min(nu2 * dd).max(nu1 * dd);
    let h22 = model.h22.max(nu1 * ss);
    let r = ((h11 - nu1 * dd) * (h22 - nu1 * ss)).sqrt();
    let h12 = model.h12.min(r).max(-r);
    Ok(QuadModel2D {
        h11,
        h12,
        h22,
        ..*model
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionResult {
    pub d: DenseVector,
    pub alpha: f64,
    pub beta: f64,
    /// `d = d̂` because `ŝ` vanished (or the repaired subproblem returned the origin).
    pub used_fallback: bool,
    pub matrix_repaired: bool,
    pub c1_effective: f64,
    pub c2_effective: f64,
    /// The interpolated (and possibly repaired) model, when one was built.
    pub model: Option<QuadModel2D>,
    /// `‖d̂_k‖ = φ_{η_k}(x_k)`
    pub d_hat_norm: f64,
    pub f_evals: usize,
    pub projections: usize,
}

/// Builds the PGMM direction at `x_k` (for iterations `k ≥ 1`).
#[allow(clippy::too_many_arguments)]
pub fn compute_direction(
    obj: &dyn Objective,
    set: &ConstraintSet,
    x_k: &DenseVector,
    x_prev: &DenseVector,
    grad_k: &DenseVector,
    f_k: f64,
    eta_k: f64,
    config: &SolverConfig,
) -> Result<DirectionResult> {
    let base = base_directions(set, x_k, x_prev, grad_k, eta_k)?;
    let (c1_effective, c2_effective) = config.effective_constants();
    let mut projections = 2;
    let d_norm = base.d_hat.norm();
    let s_norm = base.s_hat.norm();

    let fallback = |d_hat: DenseVector, f_evals, projections, model| DirectionResult {
        d: d_hat,
        alpha: 1.0,
        beta: 0.0,
        used_fallback: true,
        matrix_repaired: false,
        c1_effective,
        c2_effective,
        model,
        d_hat_norm: d_norm,
        f_evals,
        projections,
    };
    if s_norm <= MOMENTUM_ZERO_TOL * x_k.norm().max(1.0) || d_norm == 0.0 {
        return Ok(fallback(base.d_hat, 0, projections, None));
    }

    let lin_d = grad_k.dot(&base.d_hat);
    let lin_s = grad_k.dot(&base.s_hat);
    let half_d = &base.d_hat * 0.5;
    let half_s = &base.s_hat * 0.5;
    let f1 = obj.value(&(x_k + &half_s));
    let f2 = obj.value(&(x_k + &half_d));
    let f3 = obj.value(&(x_k + &half_d + &half_s));
    let f_evals = 3;

    let combine = |p: SimplexPoint| &base.d_hat * p.alpha + &base.s_hat * p.beta;

    // Trial points outside the smoothness domain leave the model undefined;
    // treat that like a failed check and go straight to a repaired model.
    let model = interpolate_model(f_k, lin_d, lin_s, f1, f2, f3).unwrap_or(QuadModel2D {
        h11: f64::NEG_INFINITY,
        h12: 0.0,
        h22: f64::NEG_INFINITY,
        lin_d,
        lin_s,
    });
    if model.h11.is_finite() && model.h22.is_finite() && model.h12.is_finite() {
        let (p, _) = minimize_on_simplex(&model.coefficients())?;
        let d = combine(p);
        let phi_sq = match config.check_eta {
            None => d_norm * d_norm,
            Some(eta) => {
                projections += 1;
                projected_step(set, x_k, grad_k, eta)?.norm_squared()
            }
        };
        if gradient_related_check(
            grad_k.dot(&d),
            d.norm_squared(),
            phi_sq,
            config.c1_bar,
            config.c2_bar,
        ) {
            return Ok(DirectionResult {
                d,
                alpha: p.alpha,
                beta: p.beta,
                used_fallback: false,
                matrix_repaired: false,
                c1_effective,
                c2_effective,
                model: Some(model),
                d_hat_norm: d_norm,
                f_evals,
                projections,
            });
        }
    }

    let sanitized = QuadModel2D {
        h11: if model.h11.is_nan() { 0.0 } else { model.h11 },
        h22: if model.h22.is_nan() { 0.0 } else { model.h22 },
        h12: if model.h12.is_finite() {
            model.h12
        } else {
            0.0
        },
        ..model
    };
    let repaired = repair_matrix(&sanitized, d_norm, s_norm, config.nu1, config.nu2)?;
    let (p, _) = minimize_on_simplex(&repaired.coefficients())?;
    if p == SimplexPoint::ORIGIN {
        let mut res = fallback(base.d_hat, f_evals, projections, Some(repaired));
        res.matrix_repaired = true;
        return Ok(res);
    }
    Ok(DirectionResult {
        d: combine(p),
        alpha: p.alpha,
        beta: p.beta,
        used_fallback: false,
        matrix_repaired: true,
        c1_effective,
        c2_effective,
        model: Some(repaired),
        d_hat_norm: d_norm,
        f_evals,
        projections,
    })
}

/// Smallest eigenvalue of the symmetric matrix `[[a, b], [b, c]]`.
pub fn min_eigenvalue_2x2(a: f64, b: f64, c: f64) -> f64 {
    let mean = 0.5 * (a + c);
    let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    mean - rad
}
