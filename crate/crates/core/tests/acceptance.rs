//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, Matrix2};
use pgmm_core::direction::{base_directions, interpolate_model, repair_matrix, QuadModel2D};
use pgmm_core::numerics::projected_step;
use pgmm_core::problems::{gen_quadratic_box, Quadratic};
use pgmm_core::qp2d::minimize_on_simplex;
use pgmm_core::report::{run_suite, write_results_csv, ResultRow};
use pgmm_core::{
    check_assumption2_trace, solve, ConstraintSet, Method, Objective, ProblemInstance, ProblemSpec,
    Quad2DCoefficients, RunRecord, SolverConfig, TraceEta,
};
use rand::Rng;
use rayon::prelude::*;

use common::*;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || {
        format!("took {:.1}s, limit {limit_s}s", elapsed.as_secs_f64())
    })
}

fn qp2d_oracle() -> Result<String, String> {
    let start = Instant::now();
    let mut r = rng(1);
    let tuples: Vec<Quad2DCoefficients> = (0..1000)
        .map(|i| {
            let mut v = || r.random_range(-5.0..5.0);
            match i % 10 {
                // purely linear
                0 => Quad2DCoefficients::new(0.0, 0.0, 0.0, v(), v()),
                // rank one
                1 => {
                    let (a, b) = (v(), v());
                    Quad2DCoefficients::new(a * a, a * b, b * b, v(), v())
                }
                _ => Quad2DCoefficients::new(v(), v(), v(), v(), v()),
            }
        })
        .collect();
    let worst = tuples
        .par_iter()
        .map(|c| {
            let (p, val) = minimize_on_simplex(c).map_err(|e| e.to_string())?;
            let grid = qp2d_grid_min(c, 1000);
            if !p.is_feasible(1e-12) {
                return Err(format!("infeasible minimizer {p:?} for {c:?}"));
            }
            if val > grid + 1e-12 {
                return Err(format!(
                    "closed form {val} worse than grid {grid} for {c:?}"
                ));
            }
            Ok((val - grid).abs())
        })
        .collect::<Result<Vec<f64>, String>>()?
        .into_iter()
        .fold(0.0, f64::max);
    ensure(worst <= 1e-3, || format!("max gap to grid {worst:e}"))?;
    within(start.elapsed(), 30.0)?;
    Ok(format!("max |closed − grid| = {worst:.2e}"))
}

fn l1_projection_oracle_check() -> Result<String, String> {
    let start = Instant::now();
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let n = r.random_range(1..=6);
        let scale = r.random_range(0.1..5.0);
        let z = uniform_vec(&mut r, n, -scale, scale);
        let radius = r.random_range(0.05..3.0);
        let got = ConstraintSet::l1_ball(n, radius)
            .unwrap()
            .project(&z)
            .unwrap();
        let want = l1_projection_oracle(&z, radius);
        worst = worst.max((got - want).amax());
    }
    ensure(worst <= 1e-8, || format!("max coordinate error {worst:e}"))?;
    within(start.elapsed(), 5.0)?;
    Ok(format!("max coordinate error {worst:.2e}"))
}

fn projection_monotonicity() -> Result<String, String> {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let n = r.random_range(1..=8);
        let set = random_set(&mut r, n, i);
        let x = random_feasible_point(&mut r, &set);
        let z = uniform_vec(&mut r, n, -4.0, 4.0);
        let ts: Vec<f64> = (1..=50).map(|j| 0.1 * j as f64).collect();
        let p: Vec<f64> = ts
            .iter()
            .map(|t| (set.project(&(&x + &z * *t)).unwrap() - &x).norm())
            .collect();
        for j in 1..ts.len() {
            worst = worst.max(p[j - 1] - p[j]);
            worst = worst.max(p[j] / ts[j] - p[j - 1] / ts[j - 1]);
        }
    }
    ensure(worst <= 1e-12, || format!("largest violation {worst:e}"))?;
    Ok(format!("largest violation {worst:.2e}"))
}

fn descent_inequality() -> Result<String, String> {
    let mut r = rng(4);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..500 {
        let n = r.random_range(1..=10);
        let set = random_set(&mut r, n, i);
        let obj = random_quadratic(&mut r, n);
        let x = random_feasible_point(&mut r, &set);
        let eta = 10f64.powf(r.random_range(-2.0..1.0));
        let g = obj.gradient(&x);
        let d = projected_step(&set, &x, &g, eta).unwrap();
        worst = worst.max(g.dot(&d) + d.norm_squared() / eta);
    }
    ensure(worst <= 1e-10, || format!("gᵀd̂ + ‖d̂‖²/η reached {worst:e}"))?;
    Ok(format!("max gᵀd̂ + ‖d̂‖²/η = {worst:.2e}"))
}

fn repair_guarantee() -> Result<String, String> {
    let mut r = rng(5);
    let nus = [(1e-12, 1e12), (1e-3, 10.0), (0.5, 2.0)];
    let mut min_margin = f64::INFINITY;
    for i in 0..500 {
        let (nu1, nu2) = nus[i % nus.len()];
        let dn = 10f64.powf(r.random_range(-2.0..2.0));
        let sn = 10f64.powf(r.random_range(-2.0..2.0));
        let off_scale = if i % 4 == 0 { 1e4 } else { 10.0 };
        let model = QuadModel2D {
            h11: r.random_range(-100.0..100.0) * dn * dn,
            h12: r.random_range(-off_scale..off_scale) * dn * sn,
            h22: r.random_range(-100.0..100.0) * sn * sn,
            lin_d: -1.0,
            lin_s: 0.0,
        };
        let rep = repair_matrix(&model, dn, sn, nu1, nu2).map_err(|e| e.to_string())?;
        let scaled = Matrix2::new(
            rep.h11 / (dn * dn),
            rep.h12 / (dn * sn),
            rep.h12 / (dn * sn),
            rep.h22 / (sn * sn),
        );
        let lam = scaled.symmetric_eigenvalues().min();
        ensure(lam >= nu1 - 1e-10, || {
            format!("λ_min {lam:e} below ν1 {nu1:e}")
        })?;
        // rounding slack for the division by ‖d̂‖²
        ensure(scaled[(0, 0)] <= nu2 * (1.0 + 4.0 * f64::EPSILON), || {
            format!("Ĥ11 = {} above ν2 {nu2}", scaled[(0, 0)])
        })?;
        min_margin = min_margin.min(lam - nu1);
    }
    Ok(format!("min λ_min(Ĥ) − ν1 = {min_margin:.2e}"))
}

fn interpolation_exactness() -> Result<String, String> {
    let mut r = rng(6);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for i in 0..100 {
        let n = r.random_range(2..=8);
        // Indefinite on purpose: exactness does not need convexity.
        let g = DMatrix::from_fn(n, n, |_, _| r.random_range(-3.0..3.0));
        let a = (&g + g.transpose()) * 0.5;
        let obj = Quadratic::new(a.clone(), uniform_vec(&mut r, n, -2.0, 2.0));
        let set = random_set(&mut r, n, i);
        let x = random_feasible_point(&mut r, &set);
        let x_prev = random_feasible_point(&mut r, &set);
        let grad = obj.gradient(&x);
        let eta = r.random_range(0.1..2.0);
        let base = base_directions(&set, &x, &x_prev, &grad, eta).map_err(|e| e.to_string())?;
        let (d, s) = (&base.d_hat, &base.s_hat);
        if d.norm() < 1e-6 || s.norm() < 1e-6 {
            continue;
        }
        let f0 = obj.value(&x);
        let model = interpolate_model(
            f0,
            grad.dot(d),
            grad.dot(s),
            obj.value(&(&x + s * 0.5)),
            obj.value(&(&x + d * 0.5)),
            obj.value(&(&x + d * 0.5 + s * 0.5)),
        )
        .map_err(|e| e.to_string())?;
        let truth = [d.dot(&(&a * d)), d.dot(&(&a * s)), s.dot(&(&a * s))];
        let scale = truth.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        let got = [model.h11, model.h12, model.h22];
        for (g, t) in got.iter().zip(&truth) {
            worst = worst.max((g - t).abs() / scale);
        }
        checked += 1;
    }
    ensure(checked >= 80, || {
        format!("only {checked} instances had nonzero directions")
    })?;
    ensure(worst <= 1e-8, || format!("relative error {worst:e}"))?;
    Ok(format!(
        "{checked} instances, max relative error {worst:.2e}"
    ))
}

fn run_instance(inst: &ProblemInstance, method: Method, keep_trace: bool) -> RunRecord {
    let cfg = SolverConfig {
        keep_trace,
        ..SolverConfig::with_method(method)
    };
    solve(inst.objective.as_ref(), &inst.set, &inst.x0, &cfg).expect("solver error")
}

fn build_all(specs: &[ProblemSpec]) -> Vec<ProblemInstance> {
    specs
        .par_iter()
        .map(|s| s.build().expect("instance"))
        .collect()
}

fn trace_check() -> Result<String, String> {
    let mut specs = synthetic_suite();
    specs.extend(lr_suite());
    let instances = build_all(&specs);
    let (c1, c2) = SolverConfig::default().effective_constants();
    let failures: Vec<String> = instances
        .par_iter()
        .filter_map(|inst| {
            let run = run_instance(inst, Method::Pgmm, true);
            let ok = check_assumption2_trace(&run, c1, c2, TraceEta::Iterate).unwrap();
            let monotone = run.trace.as_ref().unwrap().iter().all(|t| t.f_next <= t.f);
            (!(ok && monotone)).then(|| format!("{}#{}", inst.name, inst.seed))
        })
        .collect();
    ensure(failures.is_empty(), || format!("failed on {failures:?}"))?;
    Ok(format!(
        "{} PGMM runs, c1 = {c1:.1e}, c2 = {c2:.1e}",
        instances.len()
    ))
}

/// Iterations with `φ₁ > ε` against `gap/(δ α_L γ c₂) ε⁻²`, where
/// `gap = f₀ − f*` and `α_L = min(1, 2c₁(1 − γ)/L)`.
fn count_and_bound(
    trace: &[pgmm_core::IterationRecord],
    gap: f64,
    lip: f64,
    (c1, c2): (f64, f64),
    eps: f64,
    cfg: &SolverConfig,
) -> (f64, f64) {
    let alpha_l = (2.0 * c1 * (1.0 - cfg.gamma) / lip).min(1.0);
    let count = trace.iter().filter(|t| t.phi_unit > eps).count() as f64;
    let bound = gap / (cfg.delta * alpha_l * cfg.gamma * c2) / (eps * eps);
    (count, bound)
}

fn complexity_bound() -> Result<String, String> {
    let cfg = SolverConfig {
        keep_trace: true,
        ..Default::default()
    };
    let (c1, c2) = cfg.effective_constants();
    let mut max_ratio = 0.0f64;
    let mut max_tight = 0.0f64;
    for (i, cond) in [1.0, 10.0, 100.0, 1000.0].iter().enumerate() {
        for seed in 0..5u64 {
            let inst = gen_quadratic_box(20, *cond, 0.5, 100 * i as u64 + seed);
            let lip = inst.lipschitz.unwrap();
            let f_star = inst.known_f_star.unwrap();
            let run = solve(inst.objective.as_ref(), &inst.set, &inst.x0, &cfg).unwrap();
            let trace = run.trace.unwrap();
            // Constants this run actually exhibits; the bound's derivation holds
            // for them too because the interpolated step is exact on quadratics.
            let obs_c1 = trace
                .iter()
                .map(|t| -t.grad_dot_d / t.d_norm_sq)
                .fold(f64::INFINITY, f64::min);
            let obs_c2 = trace
                .iter()
                .map(|t| -t.grad_dot_d / (t.phi_unit * t.phi_unit))
                .fold(f64::INFINITY, f64::min);
            for eps in [1e-1, 1e-2] {
                for (a, b, tight) in [(c1, c2, false), (obs_c1, obs_c2, true)] {
                    let (count, bound) =
                        count_and_bound(&trace, run.f_initial - f_star, lip, (a, b), eps, &cfg);
                    ensure(count <= bound, || {
                        format!("cond {cond} seed {seed} ε {eps} (observed constants: {tight}): {count} > {bound:e}")
                    })?;
                    let ratio = if bound > 0.0 { count / bound } else { 0.0 };
                    if tight {
                        max_tight = max_tight.max(ratio);
                    } else {
                        max_ratio = max_ratio.max(ratio);
                    }
                }
            }
        }
    }
    Ok(format!(
        "20 quadratics, max count/bound = {max_ratio:.1e} (observed constants: {max_tight:.1e})"
    ))
}

fn suite_rows(specs: &[ProblemSpec]) -> Vec<(ProblemSpec, Vec<ResultRow>)> {
    specs
        .par_iter()
        .map(|spec| {
            let seedless = spec.with_seed(0);
            let rows = run_suite(
                std::slice::from_ref(&seedless),
                &[spec.seed],
                &Method::ALL,
                &SolverConfig::default(),
            )
            .unwrap();
            (spec.clone(), rows)
        })
        .collect()
}

fn convergence() -> Result<String, String> {
    let specs = synthetic_suite();
    let results = suite_rows(&specs);
    let mut converged = [0usize; 2];
    let mut worst_gap = 0.0f64;
    for (spec, rows) in &results {
        let f_star = spec.build().unwrap().known_f_star;
        for (m, row) in rows.iter().enumerate() {
            if row.converged() {
                converged[m] += 1;
            }
            if let (true, Some(f_star)) = (spec.is_convex(), f_star) {
                worst_gap = worst_gap.max((row.f_final - f_star).abs());
            }
        }
    }
    let n = specs.len() as f64;
    for (m, count) in converged.iter().enumerate() {
        ensure(*count as f64 >= 0.9 * n, || {
            format!("{} converged on {count}/{n}", Method::ALL[m])
        })?;
    }
    ensure(worst_gap <= 1e-6, || {
        format!("|f − f*| reached {worst_gap:e}")
    })?;
    Ok(format!(
        "pgmm {}/{n}, spg {}/{n}, max |f − f*| = {worst_gap:.1e}",
        converged[0], converged[1]
    ))
}

fn lr_replication() -> Result<String, String> {
    let start = Instant::now();
    let specs = lr_suite();
    let results = suite_rows(&specs);
    let mut wins = 0;
    let mut converged = [0usize; 2];
    let mut iters = [0usize; 2];
    for (_, rows) in &results {
        let (p, s) = (&rows[0], &rows[1]);
        assert_eq!((p.solver.as_str(), s.solver.as_str()), ("pgmm", "spg"));
        if p.iters < s.iters {
            wins += 1;
        }
        for (m, row) in [p, s].iter().enumerate() {
            converged[m] += row.converged() as usize;
            iters[m] += row.iters;
        }
    }
    let n = specs.len() as f64;
    ensure(wins as f64 >= 0.6 * n, || {
        format!("PGMM strictly fewer iterations on {wins}/{n}")
    })?;
    for (m, count) in converged.iter().enumerate() {
        ensure(*count as f64 >= 0.95 * n, || {
            format!("{} converged on {count}/{n}", Method::ALL[m])
        })?;
    }
    within(start.elapsed(), 120.0)?;
    Ok(format!(
        "PGMM fewer iterations on {wins}/{n}; total iterations pgmm {} vs spg {}",
        iters[0], iters[1]
    ))
}

fn determinism() -> Result<String, String> {
    let specs: Vec<ProblemSpec> = [
        "quad:n=15,cond=50,active=0.4",
        "rosen:n=6",
        "quartic:n=8",
        "lrsyn:m=80,n=10,density=0.5,data=3",
    ]
    .iter()
    .map(|s| spec(s))
    .collect();
    let csv = || {
        let mut rows = run_suite(&specs, &[1, 2], &Method::ALL, &SolverConfig::default()).unwrap();
        for row in &mut rows {
            row.wall_time_s = 0.0;
        }
        let mut buf = Vec::new();
        write_results_csv(&mut buf, &rows).unwrap();
        buf
    };
    let (a, b) = (csv(), csv());
    ensure(a == b, || "results differ between invocations".into())?;
    Ok(format!("{} identical rows", specs.len() * 2 * 2))
}

fn main() {
    let criteria: [(&str, Check); 11] = [
        ("qp2d matches 1001×1001 grid oracle", qp2d_oracle),
        (
            "ℓ1 projection matches KKT enumeration",
            l1_projection_oracle_check,
        ),
        (
            "projection step length monotonicity",
            projection_monotonicity,
        ),
        ("projected-gradient descent inequality", descent_inequality),
        ("repaired 2×2 model eigenvalue bounds", repair_guarantee),
        (
            "interpolated model exact on quadratics",
            interpolation_exactness,
        ),
        ("PGMM traces satisfy direction conditions", trace_check),
        ("ε-stationarity iteration bound", complexity_bound),
        ("synthetic suite convergence", convergence),
        (
            "PGMM vs SPG iterations on ℓ1 logistic regression",
            lr_replication,
        ),
        ("bench output determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2}  {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2}  {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
