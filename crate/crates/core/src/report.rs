//! Benchmark runs and their CSV files.

use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::ProblemSpec;
use crate::profile::{performance_profile, ProfileTable};
use crate::solver::{solve, IterationRecord, Method, SolverConfig};

pub const RESULTS_HEADER: [&str; 11] = [
    "problem",
    "seed",
    "solver",
    "status",
    "iters",
    "f_evals",
    "g_evals",
    "projections",
    "f_final",
    "residual_inf",
    "wall_time_s",
];

pub const PROFILE_HEADER: [&str; 3] = ["solver", "tau", "rho"];

/// Status written when a run could not start (bad instance, I/O, ...).
pub const STATUS_ERROR: &str = "error";

/// One line of the results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub problem: String,
    pub seed: u64,
    pub solver: String,
    pub status: String,
    pub iters: usize,
    pub f_evals: usize,
    pub g_evals: usize,
    pub projections: usize,
    pub f_final: f64,
    pub residual_inf: f64,
    pub wall_time_s: f64,
}

impl ResultRow {
    pub fn converged(&self) -> bool {
        self.status == "converged"
    }

    fn failed(problem: String, seed: u64, solver: Method, message: &str) -> Self {
        log::warn!("{problem} seed {seed} with {solver}: {message}");
        Self {
            problem,
            seed,
            solver: solver.to_string(),
            status: STATUS_ERROR.into(),
            iters: 0,
            f_evals: 0,
            g_evals: 0,
            projections: 0,
            f_final: f64::NAN,
            residual_inf: f64::NAN,
            wall_time_s: 0.0,
        }
    }
}

/// Thread count from `PGMM_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("PGMM_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
}

/// Runs problems × seeds × methods. Rows come back in that nesting order
/// regardless of scheduling; failures become rows with an error status.
pub fn run_suite(
    specs: &[ProblemSpec],
    seeds: &[u64],
    methods: &[Method],
    base: &SolverConfig,
) -> Result<Vec<ResultRow>> {
    if specs.is_empty() || seeds.is_empty() || methods.is_empty() {
        return Err(Error::invalid("suite needs problems, seeds and solvers"));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;

    let cases: Vec<ProblemSpec> = specs
        .iter()
        .flat_map(|spec| seeds.iter().map(move |&s| spec.with_seed(s)))
        .collect();

    Ok(pool.install(|| {
        cases
            .par_iter()
            .flat_map_iter(|spec| run_case(spec, methods, base))
            .collect()
    }))
}

fn run_case(spec: &ProblemSpec, methods: &[Method], base: &SolverConfig) -> Vec<ResultRow> {
    let name = spec.name();
    let instance = match spec.build() {
        Ok(inst) => inst,
        Err(e) => {
            let msg = e.to_string();
            return methods
                .iter()
                .map(|&m| ResultRow::failed(name.clone(), spec.seed, m, &msg))
                .collect();
        }
    };
    methods
        .iter()
        .map(|&method| {
            let config = SolverConfig {
                method,
                keep_trace: false,
                ..base.clone()
            };
            match solve(
                instance.objective.as_ref(),
                &instance.set,
                &instance.x0,
                &config,
            ) {
                Ok(run) => ResultRow {
                    problem: name.clone(),
                    seed: spec.seed,
                    solver: method.to_string(),
                    status: run.termination.to_string(),
                    iters: run.counters.iterations,
                    f_evals: run.counters.f_evals,
                    g_evals: run.counters.g_evals,
                    projections: run.counters.projections,
                    f_final: run.f_final,
                    residual_inf: run.residual_inf,
                    wall_time_s: run.wall_time,
                },
                Err(e) => ResultRow::failed(name.clone(), spec.seed, method, &e.to_string()),
            }
        })
        .collect()
}

pub fn write_results_csv<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(RESULTS_HEADER)?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a results file, insisting on the exact column set.
pub fn read_results_csv<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let missing: Vec<&str> = RESULTS_HEADER
        .iter()
        .copied()
        .filter(|c| !header.iter().any(|h| h == *c))
        .collect();
    if !missing.is_empty() {
        return Err(Error::invalid(format!(
            "results CSV is missing column(s): {}",
            missing.join(", ")
        )));
    }
    if header.len() != RESULTS_HEADER.len() {
        return Err(Error::invalid(format!(
            "results CSV has {} columns, expected {}",
            header.len(),
            RESULTS_HEADER.len()
        )));
    }
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}

/// Writes the trace of one run, one iteration per row.
pub fn write_trace_csv<W: Write>(out: W, trace: &[IterationRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for rec in trace {
        w.serialize(rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileMetric {
    Iters,
    FEvals,
    WallTime,
}

impl ProfileMetric {
    /// Metric value; zero counts and zero times are floored so ratios stay finite.
    fn value(&self, row: &ResultRow) -> f64 {
        match self {
            ProfileMetric::Iters => (row.iters as f64).max(1.0),
            ProfileMetric::FEvals => (row.f_evals as f64).max(1.0),
            ProfileMetric::WallTime => row.wall_time_s.max(1e-9),
        }
    }
}

impl FromStr for ProfileMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iters" => Ok(Self::Iters),
            "f_evals" => Ok(Self::FEvals),
            "wall_time_s" => Ok(Self::WallTime),
            _ => Err(Error::invalid(format!(
                "unknown metric '{s}' (expected iters, f_evals or wall_time_s)"
            ))),
        }
    }
}

/// Profile over (problem, seed) pairs; only converged runs count as solved.
pub fn profile_from_results(rows: &[ResultRow], metric: ProfileMetric) -> Result<ProfileTable> {
    let mut solvers: Vec<String> = Vec::new();
    let mut problems: Vec<(String, u64)> = Vec::new();
    for row in rows {
        if !solvers.contains(&row.solver) {
            solvers.push(row.solver.clone());
        }
        let key = (row.problem.clone(), row.seed);
        if !problems.contains(&key) {
            problems.push(key);
        }
    }
    let mut metrics = vec![vec![None; solvers.len()]; problems.len()];
    for row in rows.iter().filter(|r| r.converged()) {
        let p = problems
            .iter()
            .position(|(n, s)| *n == row.problem && *s == row.seed)
            .expect("collected above");
        let s = solvers
            .iter()
            .position(|n| *n == row.solver)
            .expect("collected above");
        metrics[p][s] = Some(metric.value(row));
    }
    let names = problems
        .into_iter()
        .map(|(n, s)| format!("{n}#{s}"))
        .collect();
    performance_profile(solvers, names, metrics)
}

pub fn write_profile_csv<W: Write>(out: W, table: &ProfileTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PROFILE_HEADER)?;
    for (solver, curve) in table.solvers.iter().zip(&table.curves) {
        for (tau, rho) in curve {
            w.write_record([solver.clone(), tau.to_string(), rho.to_string()])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
