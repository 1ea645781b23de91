//! Benchmark instances and the textual specs that name them.
//!
//! Spec strings look like `quad:n=10,cond=10,active=0.5,seed=1`,
//! `rosen:n=10`, `quartic:n=8`, `lr:data.txt,frac=0.5,seed=3`,
//! `lrsyn:m=200,n=50,density=0.3,data=1,frac=0.5` or `file:problem.json`
//! (a bare `*.json` path also works).

mod dataset;
mod logistic;
mod synthetic;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

pub use dataset::SparseDataset;
pub use logistic::{logistic_loss_grad, LogisticLoss};
pub use synthetic::{
    gen_quadratic_box, gen_quartic_box, gen_rosenbrock_box, Quadratic, Quartic, Rosenbrock,
};

use crate::error::{Error, Result};
use crate::numerics::{DenseVector, Objective};
use crate::sets::{ConstraintSet, SetSpec, FEASIBILITY_TOL};
use crate::solver::{solve, Method, SolverConfig};

/// An objective, a feasible set and a feasible starting point.
#[derive(Clone)]
pub struct ProblemInstance {
    pub objective: Arc<dyn Objective>,
    pub set: ConstraintSet,
    pub x0: DenseVector,
    pub known_f_star: Option<f64>,
    /// Minimizer, when the generator constructs one.
    pub known_solution: Option<DenseVector>,
    /// Lipschitz constant of the gradient, when known.
    pub lipschitz: Option<f64>,
    pub name: String,
    pub seed: u64,
    /// How `x0` was chosen, for run metadata.
    pub x0_rule: &'static str,
}

impl fmt::Debug for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemInstance")
            .field("name", &self.name)
            .field("seed", &self.seed)
            .field("x0_rule", &self.x0_rule)
            .field("dim", &self.x0.len())
            .field("set", &self.set)
            .field("known_f_star", &self.known_f_star)
            .finish()
    }
}

impl ProblemInstance {
    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    /// Convex instances: quadratics and logistic regression.
    pub fn is_convex(&self) -> bool {
        self.name.starts_with("quad") || self.name.starts_with("lr")
    }
}

/// ℓ1-constrained logistic regression on `data`.
///
/// `w̄` comes from an unconstrained PGMM solve from the origin; the radius is
/// `radius_fraction · ‖w̄‖₁` and `x0` is a uniform draw from `[−1, 1]ⁿ`
/// projected onto the ball.
pub fn build_lr_instance(
    data: Arc<SparseDataset>,
    radius_fraction: f64,
    seed: u64,
) -> Result<ProblemInstance> {
    let w_bar = unconstrained_minimizer(&data)?;
    build_lr_instance_with_reference(data, &w_bar, radius_fraction, seed)
}

/// Approximate unconstrained minimizer of the logistic loss.
pub fn unconstrained_minimizer(data: &Arc<SparseDataset>) -> Result<DenseVector> {
    if data.n_samples() == 0 {
        return Err(Error::invalid("dataset has no samples"));
    }
    let loss = LogisticLoss::new(Arc::clone(data));
    let n = data.n_features;
    let run = solve(
        &loss,
        &ConstraintSet::unbounded(n),
        &DenseVector::zeros(n),
        &SolverConfig::with_method(Method::Pgmm),
    )?;
    if !run.termination.is_success() {
        return Err(Error::invalid(format!(
            "unconstrained reference solve stopped with {} at residual {:e}",
            run.termination, run.residual_inf
        )));
    }
    Ok(run.x_final)
}

/// As [`build_lr_instance`], reusing a precomputed `w̄`.
pub fn build_lr_instance_with_reference(
    data: Arc<SparseDataset>,
    w_bar: &DenseVector,
    radius_fraction: f64,
    seed: u64,
) -> Result<ProblemInstance> {
    if !(radius_fraction > 0.0 && radius_fraction <= 1.0) {
        return Err(Error::invalid(format!(
            "radius fraction must lie in (0, 1], got {radius_fraction}"
        )));
    }
    let n = data.n_features;
    if w_bar.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: w_bar.len(),
        });
    }
    let radius = radius_fraction * w_bar.lp_norm(1);
    if !(radius > 0.0) {
        return Err(Error::invalid(
            "unconstrained minimizer is zero; ball would be degenerate",
        ));
    }
    let set = ConstraintSet::l1_ball(n, radius)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cube = DenseVector::from_fn(n, |_, _| rng.random_range(-1.0..=1.0));
    let x0 = set.project(&cube)?;
    Ok(ProblemInstance {
        objective: Arc::new(LogisticLoss::new(data)),
        set,
        x0,
        known_f_star: None,
        known_solution: None,
        lipschitz: None,
        name: format!("lr:frac={radius_fraction}"),
        seed,
        x0_rule: "uniform in [-1, 1]^n, then projected onto the ball",
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemKind {
    Quadratic {
        n: usize,
        cond: f64,
        active: f64,
    },
    Rosenbrock {
        n: usize,
    },
    Quartic {
        n: usize,
    },
    Logistic {
        path: PathBuf,
        features: Option<usize>,
        frac: f64,
    },
    SyntheticLogistic {
        m: usize,
        n: usize,
        density: f64,
        data_seed: u64,
        frac: f64,
    },
    File(PathBuf),
}

/// A problem family plus the seed of one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub seed: u64,
}

impl ProblemSpec {
    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            kind: self.kind.clone(),
            seed,
        }
    }

    /// Spec string without the seed; used as the problem column in results.
    pub fn name(&self) -> String {
        match &self.kind {
            ProblemKind::Quadratic { n, cond, active } => {
                format!("quad:n={n},cond={cond},active={active}")
            }
            ProblemKind::Rosenbrock { n } => format!("rosen:n={n}"),
            ProblemKind::Quartic { n } => format!("quartic:n={n}"),
            ProblemKind::Logistic {
                path,
                features,
                frac,
            } => match features {
                Some(k) => format!("lr:{},features={k},frac={frac}", path.display()),
                None => format!("lr:{},frac={frac}", path.display()),
            },
            ProblemKind::SyntheticLogistic {
                m,
                n,
                density,
                data_seed,
                frac,
            } => format!("lrsyn:m={m},n={n},density={density},data={data_seed},frac={frac}"),
            ProblemKind::File(path) => format!("file:{}", path.display()),
        }
    }

    pub fn is_convex(&self) -> bool {
        matches!(
            self.kind,
            ProblemKind::Quadratic { .. }
                | ProblemKind::Logistic { .. }
                | ProblemKind::SyntheticLogistic { .. }
        )
    }

    pub fn build(&self) -> Result<ProblemInstance> {
        let seed = self.seed;
        let mut inst = match &self.kind {
            ProblemKind::Quadratic { n, cond, active } => {
                gen_quadratic_box(*n, *cond, *active, seed)
            }
            ProblemKind::Rosenbrock { n } => gen_rosenbrock_box(*n, seed),
            ProblemKind::Quartic { n } => gen_quartic_box(*n, seed),
            ProblemKind::Logistic {
                path,
                features,
                frac,
            } => {
                let data = SparseDataset::from_path(path, *features)?;
                build_lr_instance(Arc::new(data), *frac, seed)?
            }
            ProblemKind::SyntheticLogistic {
                m,
                n,
                density,
                data_seed,
                frac,
            } => {
                let data = SparseDataset::synthetic(*m, *n, *density, *data_seed);
                build_lr_instance(Arc::new(data), *frac, seed)?
            }
            ProblemKind::File(path) => load_problem_file(path, seed)?,
        };
        inst.name = self.name();
        Ok(inst)
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},seed={}", self.name(), self.seed)
    }
}

struct Args {
    positional: Vec<String>,
    named: BTreeMap<String, String>,
}

impl Args {
    fn parse(text: &str) -> Result<Self> {
        let mut positional = Vec::new();
        let mut named = BTreeMap::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.split_once('=') {
                Some((k, v)) => {
                    if named
                        .insert(k.trim().to_string(), v.trim().to_string())
                        .is_some()
                    {
                        return Err(Error::invalid(format!("duplicate key '{k}'")));
                    }
                }
                None => positional.push(part.to_string()),
            }
        }
        Ok(Self { positional, named })
    }

    fn get<T: FromStr>(&mut self, key: &str, default: Option<T>) -> Result<T> {
        match self.named.remove(key) {
            Some(v) => v
                .parse()
                .map_err(|_| Error::invalid(format!("bad value '{v}' for '{key}'"))),
            None => default.ok_or_else(|| Error::invalid(format!("missing '{key}'"))),
        }
    }

    fn get_opt<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        if self.named.contains_key(key) {
            self.get(key, None).map(Some)
        } else {
            Ok(None)
        }
    }

    fn finish(self, kind: &str) -> Result<()> {
        if let Some(k) = self.named.keys().next() {
            return Err(Error::invalid(format!("unknown key '{k}' for '{kind}'")));
        }
        Ok(())
    }
}

impl FromStr for ProblemSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.ends_with(".json") && !s.contains(':') {
            return Ok(Self {
                kind: ProblemKind::File(PathBuf::from(s)),
                seed: 0,
            });
        }
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("problem spec '{s}' has no 'kind:' prefix")))?;
        if kind == "file" {
            return Ok(Self {
                kind: ProblemKind::File(PathBuf::from(rest)),
                seed: 0,
            });
        }
        let mut args = Args::parse(rest)?;
        let seed = args.get("seed", Some(0u64))?;
        let parsed = match kind {
            "quad" => ProblemKind::Quadratic {
                n: args.get("n", None)?,
                cond: args.get("cond", Some(10.0))?,
                active: args.get("active", Some(0.5))?,
            },
            "rosen" => ProblemKind::Rosenbrock {
                n: args.get("n", None)?,
            },
            "quartic" => ProblemKind::Quartic {
                n: args.get("n", None)?,
            },
            "lr" => {
                if args.positional.len() != 1 {
                    return Err(Error::invalid("lr spec needs exactly one dataset path"));
                }
                ProblemKind::Logistic {
                    path: PathBuf::from(args.positional.remove(0)),
                    features: args.get_opt("features")?,
                    frac: args.get("frac", Some(0.5))?,
                }
            }
            "lrsyn" => ProblemKind::SyntheticLogistic {
                m: args.get("m", Some(200))?,
                n: args.get("n", Some(50))?,
                density: args.get("density", Some(0.3))?,
                data_seed: args.get("data", Some(1))?,
                frac: args.get("frac", Some(0.5))?,
            },
            other => return Err(Error::invalid(format!("unknown problem kind '{other}'"))),
        };
        if kind != "lr" && !args.positional.is_empty() {
            return Err(Error::invalid(format!(
                "unexpected argument '{}' for '{kind}'",
                args.positional[0]
            )));
        }
        args.finish(kind)?;
        validate_kind(&parsed)?;
        Ok(Self { kind: parsed, seed })
    }
}

fn validate_kind(kind: &ProblemKind) -> Result<()> {
    let ok = match kind {
        ProblemKind::Quadratic { n, cond, active } => {
            *n > 0 && *cond >= 1.0 && cond.is_finite() && (0.0..=1.0).contains(active)
        }
        ProblemKind::Rosenbrock { n } => *n >= 2,
        ProblemKind::Quartic { n } => *n >= 1,
        ProblemKind::Logistic { frac, .. } => *frac > 0.0 && *frac <= 1.0,
        ProblemKind::SyntheticLogistic {
            m,
            n,
            density,
            frac,
            ..
        } => *m > 0 && *n > 0 && *density > 0.0 && *density <= 1.0 && *frac > 0.0 && *frac <= 1.0,
        ProblemKind::File(_) => true,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "parameters out of range in {kind:?}"
        )))
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ObjectiveFile {
    Quadratic {
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
    Rosenbrock {
        n: usize,
    },
    Quartic {
        n: usize,
        seed: u64,
    },
    Logistic {
        data: PathBuf,
        features: Option<usize>,
    },
}

#[derive(Debug, Deserialize)]
struct ProblemFile {
    objective: ObjectiveFile,
    set: SetSpec,
    x0: Option<Vec<f64>>,
    f_star: Option<f64>,
}

/// Loads a JSON problem description. Relative dataset paths resolve against
/// the file's directory. Without `x0`, the projection of the origin is used.
pub fn load_problem_file(path: &Path, seed: u64) -> Result<ProblemInstance> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ProblemFile = serde_json::from_str(&text)?;
    let objective: Arc<dyn Objective> = match file.objective {
        ObjectiveFile::Quadratic { a, b } => {
            let n = b.len();
            if n == 0 || a.len() != n || a.iter().any(|row| row.len() != n) {
                return Err(Error::invalid("quadratic needs a square A matching b"));
            }
            let a = DMatrix::from_fn(n, n, |i, j| a[i][j]);
            if (&a - a.transpose()).amax() > 1e-12 * a.amax().max(1.0) {
                return Err(Error::invalid("quadratic matrix must be symmetric"));
            }
            Arc::new(Quadratic::new(a, DenseVector::from_vec(b)))
        }
        ObjectiveFile::Rosenbrock { n } if n >= 2 => Arc::new(Rosenbrock { n }),
        ObjectiveFile::Rosenbrock { .. } => {
            return Err(Error::invalid("rosenbrock needs n >= 2"));
        }
        ObjectiveFile::Quartic { n, seed } => Arc::new(Quartic::random(n, seed)),
        ObjectiveFile::Logistic { data, features } => {
            let data = if data.is_relative() {
                path.parent().unwrap_or(Path::new(".")).join(data)
            } else {
                data
            };
            Arc::new(LogisticLoss::new(Arc::new(SparseDataset::from_path(
                &data, features,
            )?)))
        }
    };
    let n = objective.dim();
    let set = file.set.into_set(n)?;
    let (x0, x0_rule) = match file.x0 {
        Some(v) => {
            let x0 = DenseVector::from_vec(v);
            if x0.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: x0.len(),
                });
            }
            if !set.contains(&x0, FEASIBILITY_TOL)? {
                return Err(Error::Infeasible);
            }
            (x0, "given in the problem file")
        }
        None => (
            set.project(&DenseVector::zeros(n))?,
            "projection of the origin",
        ),
    };
    Ok(ProblemInstance {
        objective,
        set,
        x0,
        known_f_star: file.f_star,
        known_solution: None,
        lipschitz: None,
        name: format!("file:{}", path.display()),
        seed,
        x0_rule,
    })
}
