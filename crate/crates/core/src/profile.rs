//! Dolan–Moré performance profiles.

use crate::error::{Error, Result};

/// Metric matrix (problems × solvers, `None` marks a failure) together with
/// the per-solver step curves `(τ, ρ(τ))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    pub solvers: Vec<String>,
    /// Problems that at least one solver solved.
    pub problems: Vec<String>,
    pub metrics: Vec<Vec<Option<f64>>>,
    pub curves: Vec<Vec<(f64, f64)>>,
    /// Problems every solver failed on; excluded from the curves.
    pub dropped: Vec<String>,
}

impl ProfileTable {
    /// `ρ_s(τ)`: fraction of kept problems solver `s` solved within `τ` times the best.
    pub fn rho(&self, solver: usize, tau: f64) -> f64 {
        if self.problems.is_empty() {
            return 0.0;
        }
        let hits = self
            .metrics
            .iter()
            .filter(|row| ratio(row, solver).is_some_and(|r| r <= tau))
            .count();
        hits as f64 / self.problems.len() as f64
    }
}

fn ratio(row: &[Option<f64>], solver: usize) -> Option<f64> {
    let best = row.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    row[solver].map(|m| m / best)
}

/// Builds the profile. `metrics[p][s]` is solver `s` on problem `p`.
pub fn performance_profile(
    solvers: Vec<String>,
    problems: Vec<String>,
    metrics: Vec<Vec<Option<f64>>>,
) -> Result<ProfileTable> {
    if solvers.is_empty() || problems.is_empty() {
        return Err(Error::invalid(
            "profile needs at least one solver and one problem",
        ));
    }
    if metrics.len() != problems.len() || metrics.iter().any(|r| r.len() != solvers.len()) {
        return Err(Error::invalid(
            "metric matrix shape does not match problems × solvers",
        ));
    }
    if let Some(bad) = metrics
        .iter()
        .flatten()
        .flatten()
        .find(|m| !(m.is_finite() && **m > 0.0))
    {
        return Err(Error::invalid(format!(
            "metric values must be positive, got {bad}"
        )));
    }

    let mut kept_problems = Vec::new();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (name, row) in problems.into_iter().zip(metrics) {
        if row.iter().all(Option::is_none) {
            log::warn!("dropping '{name}' from the profile: no solver succeeded");
            dropped.push(name);
        } else {
            kept_problems.push(name);
            kept.push(row);
        }
    }

    let mut taus: Vec<f64> = kept
        .iter()
        .flat_map(|row| (0..solvers.len()).filter_map(|s| ratio(row, s)))
        .collect();
    taus.sort_by(f64::total_cmp);
    taus.dedup();

    let mut table = ProfileTable {
        solvers,
        problems: kept_problems,
        metrics: kept,
        curves: Vec::new(),
        dropped,
    };
    table.curves = (0..table.solvers.len())
        .map(|s| taus.iter().map(|&t| (t, table.rho(s, t))).collect())
        .collect();
    Ok(table)
}
