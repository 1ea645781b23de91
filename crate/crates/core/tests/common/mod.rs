//! Independent oracles and shared fixtures for the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use pgmm_core::numerics::projected_step;
use pgmm_core::problems::{Quadratic, SparseDataset};
use pgmm_core::{ConstraintSet, DenseVector, Objective, ProblemSpec, Quad2DCoefficients};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> DenseVector {
    DenseVector::from_fn(n, |_, _| rng.random_range(lo..hi))
}

/// Projection onto `{‖x‖₁ ≤ r}` by enumerating every sign pattern
/// `σ ∈ {−1, 0, 1}ⁿ` and keeping the closest KKT point
/// `x = z − θσ`, `θ ≥ 0`, `σᵢxᵢ ≥ 0`, `|z_j| ≤ θ` off the support.
pub fn l1_projection_oracle(z: &DenseVector, r: f64) -> DenseVector {
    if z.lp_norm(1) <= r {
        return z.clone();
    }
    let n = z.len();
    let mut best: Option<(f64, DenseVector)> = None;
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut sigma = vec![0.0; n];
        let mut c = code;
        for s in sigma.iter_mut() {
            *s = (c % 3) as f64 - 1.0;
            c /= 3;
        }
        let support = sigma.iter().filter(|s| **s != 0.0).count();
        if support == 0 {
            continue;
        }
        let theta = ((0..n).map(|i| sigma[i] * z[i]).sum::<f64>() - r) / support as f64;
        if theta < 0.0 {
            continue;
        }
        let x = DenseVector::from_fn(n, |i, _| {
            if sigma[i] == 0.0 {
                0.0
            } else {
                z[i] - theta * sigma[i]
            }
        });
        let ok = (0..n).all(|i| {
            if sigma[i] == 0.0 {
                z[i].abs() <= theta + 1e-12
            } else {
                sigma[i] * x[i] >= -1e-12
            }
        });
        if !ok {
            continue;
        }
        let dist = (&x - z).norm();
        if best.as_ref().is_none_or(|(d, _)| dist < *d) {
            best = Some((dist, x));
        }
    }
    best.expect("some sign pattern satisfies KKT").1
}

/// Minimum of the model over the simplex grid `{(i/m, j/m) : i + j ≤ m}`.
pub fn qp2d_grid_min(c: &Quad2DCoefficients, m: usize) -> f64 {
    let step = 1.0 / m as f64;
    let mut best = f64::INFINITY;
    for i in 0..=m {
        let a = i as f64 * step;
        for j in 0..=(m - i) {
            let b = j as f64 * step;
            let v = 0.5 * c.t * a * a + c.u * a * b + 0.5 * c.w * b * b + c.y * a + c.h * b;
            best = best.min(v);
        }
    }
    best
}

/// Plain projected gradient with constant step `1/L`, run until the unit
/// residual drops to `tol`.
pub fn projected_gradient_oracle(
    obj: &dyn Objective,
    set: &ConstraintSet,
    x0: &DenseVector,
    lipschitz: f64,
    tol: f64,
    max_iters: usize,
) -> DenseVector {
    let mut x = x0.clone();
    for _ in 0..max_iters {
        let g = obj.gradient(&x);
        if projected_step(set, &x, &g, 1.0).unwrap().amax() <= tol {
            return x;
        }
        x += projected_step(set, &x, &g, 1.0 / lipschitz).unwrap();
    }
    panic!("projected-gradient oracle did not reach {tol}");
}

/// Random symmetric positive definite matrix with eigenvalues in `[lo, hi]`.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let q = g.qr().q();
    let lam = DVector::from_fn(n, |_, _| rng.random_range(lo..hi));
    let a = &q * DMatrix::from_diagonal(&lam) * q.transpose();
    (&a + a.transpose()) * 0.5
}

pub fn random_quadratic(rng: &mut ChaCha8Rng, n: usize) -> Quadratic {
    let a = random_spd(rng, n, 0.5, 20.0);
    let b = uniform_vec(rng, n, -3.0, 3.0);
    Quadratic::new(a, b)
}

/// A random set of each kind in turn (box with some infinite sides, ℓ1 ball, ℓ2 ball).
pub fn random_set(rng: &mut ChaCha8Rng, n: usize, kind: usize) -> ConstraintSet {
    match kind % 3 {
        0 => {
            let lower = DenseVector::from_fn(n, |_, _| {
                if rng.random_bool(0.2) {
                    f64::NEG_INFINITY
                } else {
                    rng.random_range(-2.0..0.0)
                }
            });
            let upper = DenseVector::from_fn(n, |_, _| {
                if rng.random_bool(0.2) {
                    f64::INFINITY
                } else {
                    rng.random_range(0.0..2.0)
                }
            });
            ConstraintSet::new_box(lower, upper).unwrap()
        }
        1 => ConstraintSet::l1_ball(n, rng.random_range(0.1..3.0)).unwrap(),
        _ => {
            let center = uniform_vec(rng, n, -1.0, 1.0);
            ConstraintSet::l2_ball(center, rng.random_range(0.1..3.0)).unwrap()
        }
    }
}

pub fn random_feasible_point(rng: &mut ChaCha8Rng, set: &ConstraintSet) -> DenseVector {
    let z = uniform_vec(rng, set.dim(), -3.0, 3.0);
    set.project(&z).unwrap()
}

/// Thirty-instance synthetic suite: quadratics at three condition numbers,
/// box Rosenbrock and the nonconvex quartic.
pub fn synthetic_suite() -> Vec<ProblemSpec> {
    let mut out = Vec::new();
    for cond in [10.0, 100.0, 1000.0] {
        for seed in 1..=4 {
            out.push(spec(&format!(
                "quad:n=30,cond={cond},active=0.5,seed={seed}"
            )));
        }
    }
    for seed in 1..=9 {
        out.push(spec(&format!("rosen:n=10,seed={seed}")));
    }
    for seed in 1..=9 {
        out.push(spec(&format!("quartic:n=20,seed={seed}")));
    }
    out
}

/// Twenty ℓ1-constrained logistic regressions: two synthetic datasets
/// (m = 200, n = 50) times ten starting points each.
pub fn lr_suite() -> Vec<ProblemSpec> {
    let mut out = Vec::new();
    for data in [1, 2] {
        for seed in 0..10 {
            out.push(spec(&format!(
                "lrsyn:m=200,n=50,density=0.3,data={data},frac=0.5,seed={seed}"
            )));
        }
    }
    out
}

pub fn spec(text: &str) -> ProblemSpec {
    text.parse().unwrap()
}

pub fn toy_dataset() -> SparseDataset {
    SparseDataset::synthetic(40, 4, 0.8, 5)
}
