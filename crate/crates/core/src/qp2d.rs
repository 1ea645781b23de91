//! Closed-form global minimization of a bivariate quadratic over the simplex
//! `{(α, β) : α ≥ 0, β ≥ 0, α + β ≤ 1}`.

use crate::error::{Error, Result};

/// `φ(α, β) = ½ [α β] [[t, u], [u, w]] [α β]ᵀ + y α + h β`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad2DCoefficients {
    pub t: f64,
    pub u: f64,
    pub w: f64,
    pub y: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexPoint {
    pub alpha: f64,
    pub beta: f64,
}

impl SimplexPoint {
    pub const ORIGIN: SimplexPoint = SimplexPoint::new(0.0, 0.0);

    pub const fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    pub fn is_feasible(&self, tol: f64) -> bool {
        self.alpha >= -tol && self.beta >= -tol && self.alpha + self.beta <= 1.0 + tol
    }
}

impl Quad2DCoefficients {
    pub fn new(t: f64, u: f64, w: f64, y: f64, h: f64) -> Self {
        Self { t, u, w, y, h }
    }

    fn is_finite(&self) -> bool {
        [self.t, self.u, self.w, self.y, self.h]
            .iter()
            .all(|v| v.is_finite())
    }

    pub fn evaluate(&self, p: SimplexPoint) -> f64 {
        let (a, b) = (p.alpha, p.beta);
        0.5 * (self.t * a * a + 2.0 * self.u * a * b + self.w * b * b) + self.y * a + self.h * b
    }
}

pub fn evaluate_quad2d(c: &Quad2DCoefficients, p: SimplexPoint) -> f64 {
    c.evaluate(p)
}

/// Returns a global minimizer of `c` over the simplex and its value.
///
/// An interior stationary point is returned directly when the matrix is
/// positive definite and the point is feasible. Otherwise the candidates are
/// scanned as vertex (0,0), (1,0), (0,1), then the interior minimizers of the
/// edges β = 0, α = 0 and α + β = 1; a later candidate replaces the incumbent
/// only on strict improvement.
pub fn minimize_on_simplex(c: &Quad2DCoefficients) -> Result<(SimplexPoint, f64)> {
    if !c.is_finite() {
        return Err(Error::NonFinite(format!("quadratic coefficients {c:?}")));
    }
    let Quad2DCoefficients { t, u, w, y, h } = *c;

    let det = t * w - u * u;
    if t > 0.0 && det > 0.0 {
        let p = SimplexPoint::new((-w * y + u * h) / det, (u * y - t * h) / det);
        if p.alpha >= 0.0 && p.beta >= 0.0 && p.alpha + p.beta <= 1.0 {
            return Ok((p, c.evaluate(p)));
        }
    }

    let mut best = SimplexPoint::ORIGIN;
    let mut best_val = 0.0;
    let mut consider = |p: SimplexPoint, val: f64| {
        if val < best_val {
            best = p;
            best_val = val;
        }
    };

    consider(SimplexPoint::new(1.0, 0.0), 0.5 * t + y);
    consider(SimplexPoint::new(0.0, 1.0), 0.5 * w + h);

    // β = 0: ½tα² + yα
    if t > 0.0 {
        let a = -y / t;
        if 0.0 < a && a < 1.0 {
            consider(SimplexPoint::new(a, 0.0), -y * y / (2.0 * t));
        }
    }
    // α = 0: ½wβ² + hβ
    if w > 0.0 {
        let b = -h / w;
        if 0.0 < b && b < 1.0 {
            consider(SimplexPoint::new(0.0, b), -h * h / (2.0 * w));
        }
    }
    // α + β = 1: ½(t − 2u + w)α² + (u − w + y − h)α + (½w + h)
    let curv = t - 2.0 * u + w;
    if curv > 0.0 {
        let a = -(u - w + y - h) / curv;
        if 0.0 < a && a < 1.0 {
            let p = SimplexPoint::new(a, 1.0 - a);
            consider(p, c.evaluate(p));
        }
    }

    Ok((best, best_val))
}
