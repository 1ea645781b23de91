//! Seeded box-constrained test functions.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::sync::Arc;

use crate::numerics::{DenseVector, Objective};
use crate::problems::ProblemInstance;
use crate::sets::ConstraintSet;

/// `½ xᵀAx − bᵀx`.
#[derive(Debug, Clone)]
pub struct Quadratic {
    pub a: DMatrix<f64>,
    pub b: DenseVector,
}

impl Quadratic {
    pub fn new(a: DMatrix<f64>, b: DenseVector) -> Self {
        assert_eq!(a.nrows(), b.len());
        assert_eq!(a.ncols(), b.len());
        Self { a, b }
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &DenseVector) -> f64 {
        0.5 * x.dot(&(&self.a * x)) - self.b.dot(x)
    }

    fn gradient(&self, x: &DenseVector) -> DenseVector {
        &self.a * x - &self.b
    }

    fn value_and_gradient(&self, x: &DenseVector) -> (f64, DenseVector) {
        let ax = &self.a * x;
        (0.5 * x.dot(&ax) - self.b.dot(x), ax - &self.b)
    }
}

/// Chained Rosenbrock `Σ 100(x_{i+1} − x_i²)² + (1 − x_i)²`.
#[derive(Debug, Clone, Copy)]
pub struct Rosenbrock {
    pub n: usize,
}

impl Objective for Rosenbrock {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &DenseVector) -> f64 {
        (0..self.n - 1)
            .map(|i| 100.0 * (x[i + 1] - x[i] * x[i]).powi(2) + (1.0 - x[i]).powi(2))
            .sum()
    }

    fn gradient(&self, x: &DenseVector) -> DenseVector {
        let mut g = DenseVector::zeros(self.n);
        for i in 0..self.n - 1 {
            let r = x[i + 1] - x[i] * x[i];
            g[i] += -400.0 * x[i] * r - 2.0 * (1.0 - x[i]);
            g[i + 1] += 200.0 * r;
        }
        g
    }
}

/// Double-well quartic with a chain coupling:
/// `Σ (¼x_i⁴ − ½a_i x_i²) + ½ρ Σ (x_{i+1} − x_i)² + cᵀx`.
#[derive(Debug, Clone)]
pub struct Quartic {
    pub a: DenseVector,
    pub c: DenseVector,
    pub rho: f64,
}

impl Quartic {
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DenseVector::from_fn(n, |_, _| rng.random_range(0.5..2.0));
        let c = DenseVector::from_fn(n, |_, _| rng.random_range(-0.5..0.5));
        Self { a, c, rho: 0.5 }
    }
}

impl Objective for Quartic {
    fn dim(&self) -> usize {
        self.a.len()
    }

    fn value(&self, x: &DenseVector) -> f64 {
        let n = self.a.len();
        let wells: f64 = (0..n)
            .map(|i| 0.25 * x[i].powi(4) - 0.5 * self.a[i] * x[i] * x[i])
            .sum();
        let chain: f64 = (0..n.saturating_sub(1))
            .map(|i| (x[i + 1] - x[i]).powi(2))
            .sum();
        wells + 0.5 * self.rho * chain + self.c.dot(x)
    }

    fn gradient(&self, x: &DenseVector) -> DenseVector {
        let n = self.a.len();
        let mut g = DenseVector::from_fn(n, |i, _| x[i].powi(3) - self.a[i] * x[i] + self.c[i]);
        for i in 0..n.saturating_sub(1) {
            let t = self.rho * (x[i + 1] - x[i]);
            g[i] -= t;
            g[i + 1] += t;
        }
        g
    }
}

/// Uniform sample from a bounded box.
pub(crate) fn uniform_in_box(
    rng: &mut ChaCha8Rng,
    lower: &DenseVector,
    upper: &DenseVector,
) -> DenseVector {
    DenseVector::from_fn(lower.len(), |i, _| {
        lower[i] + (upper[i] - lower[i]) * rng.random::<f64>()
    })
}

/// Strictly convex quadratic over a box whose solution is built to satisfy
/// the KKT conditions with `round(active_fraction · n)` active bounds.
///
/// Eigenvalues are log-spaced in `[1, cond]`, so the gradient Lipschitz
/// constant is `cond`.
pub fn gen_quadratic_box(n: usize, cond: f64, active_fraction: f64, seed: u64) -> ProblemInstance {
    assert!(n > 0 && cond >= 1.0 && (0.0..=1.0).contains(&active_fraction));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let a = if cond == 1.0 {
        DMatrix::identity(n, n)
    } else {
        let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let q = g.qr().q();
        let lambda = DenseVector::from_fn(n, |i, _| {
            let t = if n == 1 {
                1.0
            } else {
                i as f64 / (n - 1) as f64
            };
            cond.powf(t)
        });
        let a = &q * DMatrix::from_diagonal(&lambda) * q.transpose();
        (&a + a.transpose()) * 0.5
    };

    let x_star = DenseVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let n_active = (active_fraction * n as f64).round() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);

    let mut lower = DenseVector::zeros(n);
    let mut upper = DenseVector::zeros(n);
    let mut g_star = DenseVector::zeros(n);
    for (rank, &i) in order.iter().enumerate() {
        let width_lo: f64 = rng.random_range(0.5..2.0);
        let width_hi: f64 = rng.random_range(0.5..2.0);
        lower[i] = x_star[i] - width_lo;
        upper[i] = x_star[i] + width_hi;
        if rank < n_active {
            let mag: f64 = rng.random_range(0.1..1.0);
            if rng.random::<bool>() {
                lower[i] = x_star[i];
                g_star[i] = mag;
            } else {
                upper[i] = x_star[i];
                g_star[i] = -mag;
            }
        }
    }

    // ∇f(x*) = A x* − b = g*
    let b = &a * &x_star - &g_star;
    let quad = Quadratic::new(a, b);
    let f_star = quad.value(&x_star);
    let x0 = uniform_in_box(&mut rng, &lower, &upper);
    let set = ConstraintSet::new_box(lower, upper).expect("generated box is valid");

    ProblemInstance {
        objective: Arc::new(quad),
        set,
        x0,
        known_f_star: Some(f_star),
        known_solution: Some(x_star),
        lipschitz: Some(cond),
        name: format!("quad:n={n},cond={cond},active={active_fraction}"),
        seed,
        x0_rule: "uniform in the box",
    }
}

/// Chained Rosenbrock over a random box around the origin. Some upper bounds
/// fall below 1, which cuts the unconstrained minimizer out.
pub fn gen_rosenbrock_box(n: usize, seed: u64) -> ProblemInstance {
    assert!(n >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lower = DenseVector::from_fn(n, |_, _| rng.random_range(-2.0..-1.0));
    let upper = DenseVector::from_fn(n, |_, _| rng.random_range(0.5..2.0));
    let x0 = uniform_in_box(&mut rng, &lower, &upper);
    ProblemInstance {
        objective: Arc::new(Rosenbrock { n }),
        set: ConstraintSet::new_box(lower, upper).expect("generated box is valid"),
        x0,
        known_f_star: None,
        known_solution: None,
        lipschitz: None,
        name: format!("rosen:n={n}"),
        seed,
        x0_rule: "uniform in the box",
    }
}

/// Nonconvex quartic on `[−2, 2]ⁿ`.
pub fn gen_quartic_box(n: usize, seed: u64) -> ProblemInstance {
    assert!(n >= 1);
    let quartic = Quartic::random(n, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9e37_79b9));
    let lower = DenseVector::from_element(n, -2.0);
    let upper = DenseVector::from_element(n, 2.0);
    let x0 = uniform_in_box(&mut rng, &lower, &upper);
    ProblemInstance {
        objective: Arc::new(quartic),
        set: ConstraintSet::new_box(lower, upper).expect("generated box is valid"),
        x0,
        known_f_star: None,
        known_solution: None,
        lipschitz: None,
        name: format!("quartic:n={n}"),
        seed,
        x0_rule: "uniform in the box",
    }
}
