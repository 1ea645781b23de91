//! Seeded fixtures shared by the criterion benches.

use pgmm_core::{ConstraintSet, DenseVector, ProblemInstance, ProblemSpec, Quad2DCoefficients};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random simplex-QP coefficients in `[−20, 20]⁵`.
pub fn qp2d_coefficients(count: usize, seed: u64) -> Vec<Quad2DCoefficients> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || rng.random_range(-20.0..20.0);
    (0..count)
        .map(|_| Quad2DCoefficients::new(draw(), draw(), draw(), draw(), draw()))
        .collect()
}

/// Points to project, mostly outside `ball`.
pub fn projection_inputs(ball: &ConstraintSet, count: usize, seed: u64) -> Vec<DenseVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| DenseVector::from_fn(ball.dim(), |_, _| rng.random_range(-3.0..3.0)))
        .collect()
}

/// One instance per problem family, sized to take milliseconds per solve.
pub fn solver_cases() -> Vec<(&'static str, ProblemInstance)> {
    [
        ("quad", "quad:n=100,cond=1000,active=0.5,seed=1"),
        ("rosen", "rosen:n=20,seed=1"),
        ("quartic", "quartic:n=50,seed=1"),
        ("lr", "lrsyn:m=200,n=50,density=0.3,data=1,frac=0.5,seed=0"),
    ]
    .into_iter()
    .map(|(label, spec)| {
        let spec: ProblemSpec = spec.parse().expect("valid spec");
        (label, spec.build().expect("instance builds"))
    })
    .collect()
}
