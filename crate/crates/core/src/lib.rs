//! Projected gradient methods with momentum (PGMM) and the spectral projected
//! gradient (SPG) baseline for minimizing smooth, possibly nonconvex functions
//! over convex sets with an exact Euclidean projection.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: the [`Objective`] trait, stationarity measures and a
//!   finite-difference gradient used as a test oracle.
//! * [`sets`]: box, ℓ1-ball and ℓ2-ball projections.
//! * [`qp2d`]: closed-form minimization of a bivariate quadratic over the unit simplex.
//! * [`direction`]: spectral step, base directions, interpolated 2×2 model,
//!   gradient-related safeguard and the matrix repair.
//! * [`line_search`]: monotone / nonmonotone Armijo backtracking with safeguarded
//!   quadratic interpolation.
//! * [`solver`]: the driver loop shared by PGMM and SPG.
//! * [`problems`], [`profile`], [`report`]: benchmark instances, performance
//!   profiles and CSV output.

// `!(x > 0.0)` is how argument checks reject NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod direction;
pub mod error;
pub mod line_search;
pub mod numerics;
pub mod problems;
pub mod profile;
pub mod qp2d;
pub mod report;
pub mod sets;
pub mod solver;

pub use direction::{BaseDirections, DirectionResult, QuadModel2D};
pub use error::{Error, Result};
pub use line_search::{LineSearchOutcome, LineSearchParams, SearchMode};
pub use numerics::{DenseVector, Objective, StationarityReport};
pub use problems::{ProblemInstance, ProblemSpec, SparseDataset};
pub use profile::ProfileTable;
pub use qp2d::{Quad2DCoefficients, SimplexPoint};
pub use sets::{ConstraintSet, SetSpec};
pub use solver::{
    check_assumption2_trace, solve, Counters, IterationRecord, Method, RunRecord, SolverConfig,
    Termination, TraceEta,
};
