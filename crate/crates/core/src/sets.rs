//! Closed convex sets with exact Euclidean projection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::DenseVector;

/// Absolute tolerance used when checking that iterates lie in the set.
pub const FEASIBILITY_TOL: f64 = 1e-10;

/// A nonempty closed convex set.
///
/// Construct through [`ConstraintSet::new_box`], [`ConstraintSet::l1_ball`],
/// [`ConstraintSet::l2_ball`] or [`ConstraintSet::unbounded`], which enforce
/// the invariants (`l ≤ u`, positive radius). Box bounds may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintSet {
    Box {
        lower: DenseVector,
        upper: DenseVector,
    },
    L1Ball {
        dim: usize,
        radius: f64,
    },
    L2Ball {
        center: DenseVector,
        radius: f64,
    },
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "radius must be positive and finite, got {radius}"
        )))
    }
}

impl ConstraintSet {
    pub fn new_box(lower: DenseVector, upper: DenseVector) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::invalid("box must have positive dimension"));
        }
        for (i, (l, u)) in lower.iter().zip(upper.iter()).enumerate() {
            if l.is_nan() || u.is_nan() || l > u || *l == f64::INFINITY || *u == f64::NEG_INFINITY {
                return Err(Error::invalid(format!(
                    "empty box at coordinate {i}: [{l}, {u}]"
                )));
            }
        }
        Ok(ConstraintSet::Box { lower, upper })
    }

    /// The whole space, represented as a box with infinite bounds.
    pub fn unbounded(dim: usize) -> Self {
        ConstraintSet::Box {
            lower: DenseVector::from_element(dim, f64::NEG_INFINITY),
            upper: DenseVector::from_element(dim, f64::INFINITY),
        }
    }

    pub fn l1_ball(dim: usize, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        if dim == 0 {
            return Err(Error::invalid("ball must have positive dimension"));
        }
        Ok(ConstraintSet::L1Ball { dim, radius })
    }

    pub fn l2_ball(center: DenseVector, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid(
                "ball center must be finite with positive dimension",
            ));
        }
        Ok(ConstraintSet::L2Ball { center, radius })
    }

    /// Re-checks the invariants, for values built directly from the enum.
    pub fn validate(&self) -> Result<()> {
        match self {
            ConstraintSet::Box { lower, upper } => {
                Self::new_box(lower.clone(), upper.clone()).map(|_| ())
            }
            ConstraintSet::L1Ball { dim, radius } => Self::l1_ball(*dim, *radius).map(|_| ()),
            ConstraintSet::L2Ball { center, radius } => {
                Self::l2_ball(center.clone(), *radius).map(|_| ())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConstraintSet::Box { lower, .. } => lower.len(),
            ConstraintSet::L1Ball { dim, .. } => *dim,
            ConstraintSet::L2Ball { center, .. } => center.len(),
        }
    }

    fn check_dim(&self, x: &DenseVector) -> Result<()> {
        if x.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            })
        }
    }

    /// Euclidean projection `argmin_{y ∈ S} ‖x − y‖`.
    pub fn project(&self, x: &DenseVector) -> Result<DenseVector> {
        self.check_dim(x)?;
        Ok(match self {
            ConstraintSet::Box { lower, upper } => {
                DenseVector::from_fn(x.len(), |i, _| x[i].max(lower[i]).min(upper[i]))
            }
            ConstraintSet::L1Ball { radius, .. } => project_l1_ball(x, *radius),
            ConstraintSet::L2Ball { center, radius } => {
                let offset = x - center;
                let dist = offset.norm();
                if dist <= *radius {
                    x.clone()
                } else {
                    center + offset * (*radius / dist)
                }
            }
        })
    }

    /// Membership test with additive tolerance on the defining inequalities.
    pub fn contains(&self, x: &DenseVector, tol: f64) -> Result<bool> {
        self.check_dim(x)?;
        if x.iter().any(|v| v.is_nan()) {
            return Ok(false);
        }
        Ok(match self {
            ConstraintSet::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper.iter()))
                .all(|(v, (l, u))| *v >= l - tol && *v <= u + tol),
            ConstraintSet::L1Ball { radius, .. } => x.lp_norm(1) <= radius + tol,
            ConstraintSet::L2Ball { center, radius } => (x - center).norm() <= radius + tol,
        })
    }
}

/// Sort-based projection onto `{x : ‖x‖₁ ≤ r}`: find the soft threshold θ with
/// `Σ max(|xᵢ| − θ, 0) = r`, then shrink.
fn project_l1_ball(x: &DenseVector, radius: f64) -> DenseVector {
    if x.lp_norm(1) <= radius {
        return x.clone();
    }
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));

    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &m) in mags.iter().enumerate() {
        cumsum += m;
        let candidate = (cumsum - radius) / (j + 1) as f64;
        if m > candidate {
            theta = candidate;
        } else {
            break;
        }
    }
    x.map(|v| v.signum() * (v.abs() - theta).max(0.0))
}

/// Serializable description of a set, as accepted in problem files:
/// `{"type":"box","l":[...],"u":[...]}` (null entries mean unbounded),
/// `{"type":"l1ball","radius":R}`, `{"type":"l2ball","center":[...],"radius":R}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SetSpec {
    Box {
        l: Vec<Option<f64>>,
        u: Vec<Option<f64>>,
    },
    L1Ball {
        radius: f64,
    },
    L2Ball {
        center: Vec<f64>,
        radius: f64,
    },
}

impl SetSpec {
    pub fn into_set(self, dim: usize) -> Result<ConstraintSet> {
        let set = match self {
            SetSpec::Box { l, u } => ConstraintSet::new_box(
                DenseVector::from_iterator(
                    l.len(),
                    l.iter().map(|v| v.unwrap_or(f64::NEG_INFINITY)),
                ),
                DenseVector::from_iterator(u.len(), u.iter().map(|v| v.unwrap_or(f64::INFINITY))),
            )?,
            SetSpec::L1Ball { radius } => ConstraintSet::l1_ball(dim, radius)?,
            SetSpec::L2Ball { center, radius } => {
                ConstraintSet::l2_ball(DenseVector::from_vec(center), radius)?
            }
        };
        if set.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: set.dim(),
            });
        }
        Ok(set)
    }
}

impl From<&ConstraintSet> for SetSpec {
    fn from(set: &ConstraintSet) -> Self {
        let finite = |v: &f64| v.is_finite().then_some(*v);
        match set {
            ConstraintSet::Box { lower, upper } => SetSpec::Box {
                l: lower.iter().map(finite).collect(),
                u: upper.iter().map(finite).collect(),
            },
            ConstraintSet::L1Ball { radius, .. } => SetSpec::L1Ball { radius: *radius },
            ConstraintSet::L2Ball { center, radius } => SetSpec::L2Ball {
                center: center.iter().copied().collect(),
                radius: *radius,
            },
        }
    }
}
