//! Vector type, objective interface and stationarity measures.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::sets::{ConstraintSet, FEASIBILITY_TOL};

/// Iterate / gradient carrier.
pub type DenseVector = DVector<f64>;

/// A smooth objective `f: ℝⁿ → ℝ` with an analytic gradient.
///
/// Implementations must accept exactly `dim()`-length inputs. Evaluations
/// outside the smoothness domain may return non-finite values; the solvers
/// treat those as rejected trial points.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &DenseVector) -> f64;

    fn gradient(&self, x: &DenseVector) -> DenseVector;

    fn value_and_gradient(&self, x: &DenseVector) -> (f64, DenseVector) {
        (self.value(x), self.gradient(x))
    }
}

impl<T: Objective + ?Sized> Objective for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &DenseVector) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &DenseVector) -> DenseVector {
        (**self).gradient(x)
    }
    fn value_and_gradient(&self, x: &DenseVector) -> (f64, DenseVector) {
        (**self).value_and_gradient(x)
    }
}

impl<T: Objective + ?Sized> Objective for std::sync::Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &DenseVector) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &DenseVector) -> DenseVector {
        (**self).gradient(x)
    }
    fn value_and_gradient(&self, x: &DenseVector) -> (f64, DenseVector) {
        (**self).value_and_gradient(x)
    }
}

/// Both stationarity measures evaluated at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationarityReport {
    /// `‖P[x − η∇f(x)] − x‖₂`
    pub phi_eta: f64,
    /// `‖P[x − ∇f(x)] − x‖∞`
    pub inf_norm_residual: f64,
    pub eta_used: f64,
}

impl StationarityReport {
    pub fn compute(
        obj: &dyn Objective,
        set: &ConstraintSet,
        x: &DenseVector,
        eta: f64,
    ) -> Result<Self> {
        Ok(Self {
            phi_eta: stationarity_measure(obj, set, x, eta)?,
            inf_norm_residual: inf_norm_residual(obj, set, x)?,
            eta_used: eta,
        })
    }
}

/// `P[x − η g] − x`, the projected gradient step for a given gradient.
pub fn projected_step(
    set: &ConstraintSet,
    x: &DenseVector,
    grad: &DenseVector,
    eta: f64,
) -> Result<DenseVector> {
    let trial = x - grad * eta;
    Ok(set.project(&trial)? - x)
}

fn check_point(obj: &dyn Objective, set: &ConstraintSet, x: &DenseVector) -> Result<()> {
    if x.len() != obj.dim() {
        return Err(Error::DimensionMismatch {
            expected: obj.dim(),
            found: x.len(),
        });
    }
    if !set.contains(x, FEASIBILITY_TOL)? {
        return Err(Error::Infeasible);
    }
    Ok(())
}

/// φ_η(x) = ‖P_S[x − η∇f(x)] − x‖ (Euclidean norm). Zero exactly at stationary points.
pub fn stationarity_measure(
    obj: &dyn Objective,
    set: &ConstraintSet,
    x: &DenseVector,
    eta: f64,
) -> Result<f64> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::invalid(format!("eta must be positive, got {eta}")));
    }
    check_point(obj, set, x)?;
    let g = obj.gradient(x);
    Ok(projected_step(set, x, &g, eta)?.norm())
}

/// ‖P_S[x − ∇f(x)] − x‖∞, the stopping residual.
pub fn inf_norm_residual(obj: &dyn Objective, set: &ConstraintSet, x: &DenseVector) -> Result<f64> {
    check_point(obj, set, x)?;
    let g = obj.gradient(x);
    Ok(projected_step(set, x, &g, 1.0)?.amax())
}

/// Default central-difference step: `1e-6 · max(1, ‖x‖∞)`.
pub fn default_fd_step(x: &DenseVector) -> f64 {
    1e-6 * x.amax().max(1.0)
}

/// Central-difference gradient `(f(x + h eᵢ) − f(x − h eᵢ)) / 2h`.
pub fn finite_difference_gradient(
    obj: &dyn Objective,
    x: &DenseVector,
    h: f64,
) -> Result<DenseVector> {
    if !(h > 0.0) {
        return Err(Error::invalid(format!("step must be positive, got {h}")));
    }
    if x.len() != obj.dim() {
        return Err(Error::DimensionMismatch {
            expected: obj.dim(),
            found: x.len(),
        });
    }
    let mut probe = x.clone();
    let mut grad = DenseVector::zeros(x.len());
    for i in 0..x.len() {
        let xi = x[i];
        probe[i] = xi + h;
        let fp = obj.value(&probe);
        probe[i] = xi - h;
        let fm = obj.value(&probe);
        probe[i] = xi;
        grad[i] = (fp - fm) / (2.0 * h);
    }
    Ok(grad)
}

/// Closure-backed objective, handy for tests and small ad-hoc problems.
pub struct FnObjective<F, G> {
    dim: usize,
    f: F,
    g: G,
}

impl<F, G> FnObjective<F, G>
where
    F: Fn(&DenseVector) -> f64 + Send + Sync,
    G: Fn(&DenseVector) -> DenseVector + Send + Sync,
{
    pub fn new(dim: usize, f: F, g: G) -> Self {
        Self { dim, f, g }
    }
}

impl<F, G> Objective for FnObjective<F, G>
where
    F: Fn(&DenseVector) -> f64 + Send + Sync,
    G: Fn(&DenseVector) -> DenseVector + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &DenseVector) -> f64 {
        (self.f)(x)
    }
    fn gradient(&self, x: &DenseVector) -> DenseVector {
        (self.g)(x)
    }
}
