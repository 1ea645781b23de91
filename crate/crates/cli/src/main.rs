use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pgmm_core::report::{self, ProfileMetric};
use pgmm_core::{solve, Error, Method, ProblemSpec, SolverConfig, Termination};

#[derive(Parser)]
#[command(
    name = "pgmm",
    version,
    about = "Projected gradient solvers with momentum"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and print a summary line.
    Solve(SolveArgs),
    /// Run problems × seeds × solvers and write a results CSV.
    Bench(BenchArgs),
    /// Turn a results CSV into performance-profile curves.
    Profile(ProfileArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Generator spec (quad:n=10,cond=10,seed=1) or a JSON problem file.
    #[arg(long)]
    problem: ProblemSpec,
    #[arg(long, value_enum, default_value_t = SolverArg::Pgmm)]
    solver: SolverArg,
    /// Override the seed in the problem spec.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the per-iteration trace CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct BenchArgs {
    /// Problem spec; repeat for several problems.
    #[arg(long, required = true)]
    problem: Vec<ProblemSpec>,
    /// Solvers to run; repeat or comma-separate. Defaults to both.
    #[arg(long, value_enum, value_delimiter = ',')]
    solver: Vec<SolverArg>,
    /// Seeds as a list and/or ranges, e.g. `0..9` or `1,2,5`.
    #[arg(long, default_value = "0..9")]
    seeds: SeedList,
    /// Results CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct ProfileArgs {
    /// Results CSV produced by `bench`.
    results: PathBuf,
    #[arg(long, value_enum, default_value_t = MetricArg::Iters)]
    metric: MetricArg,
    /// Profile CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    max_iters: Option<usize>,
    /// Stopping tolerance on the ∞-norm projected-gradient residual.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    eta_min: Option<f64>,
    #[arg(long)]
    eta_max: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
}

impl Overrides {
    fn apply(&self, mut cfg: SolverConfig) -> Result<SolverConfig, Error> {
        if let Some(v) = self.max_iters {
            cfg.max_iters = v;
        }
        if let Some(v) = self.tol {
            cfg.tol_residual = v;
        }
        if let Some(v) = self.eta_min {
            cfg.eta_min = v;
        }
        if let Some(v) = self.eta_max {
            cfg.eta_max = v;
        }
        if let Some(v) = self.gamma {
            cfg.gamma = v;
        }
        if let Some(v) = self.delta {
            cfg.delta = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Pgmm,
    Spg,
}

impl From<SolverArg> for Method {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Pgmm => Method::Pgmm,
            SolverArg::Spg => Method::Spg,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Iters,
    #[value(name = "f_evals")]
    FEvals,
    #[value(name = "wall_time_s")]
    WallTime,
}

impl From<MetricArg> for ProfileMetric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Iters => ProfileMetric::Iters,
            MetricArg::FEvals => ProfileMetric::FEvals,
            MetricArg::WallTime => ProfileMetric::WallTime,
        }
    }
}

#[derive(Clone, Debug)]
struct SeedList(Vec<u64>);

impl std::str::FromStr for SeedList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut seeds = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let parse = |t: &str| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|e| format!("bad seed {t:?}: {e}"))
            };
            match part.split_once("..") {
                Some((a, b)) => {
                    let (a, b) = (parse(a)?, parse(b)?);
                    if a > b {
                        return Err(format!("empty seed range {part}"));
                    }
                    seeds.extend(a..=b);
                }
                None => seeds.push(parse(part)?),
            }
        }
        if seeds.is_empty() {
            return Err("no seeds given".into());
        }
        Ok(SeedList(seeds))
    }
}

/// Failure with its exit code: 2 for configuration, 3 for I/O.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let io = matches!(&e, Error::Io { .. }) || matches!(&e, Error::Csv(c) if c.is_io_error());
        Failure {
            code: if io { 3 } else { 2 },
            // The core error already carries its source in the message.
            err: anyhow::anyhow!("{e}"),
        }
    }
}

fn io_failure(err: io::Error, path: &Path) -> Failure {
    Failure {
        code: 3,
        err: anyhow::Error::new(err).context(path.display().to_string()),
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => Ok(Box::new(BufWriter::new(
            File::create(p).map_err(|e| io_failure(e, p))?,
        ))),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode, Failure> {
    let spec = match args.seed {
        Some(s) => args.problem.with_seed(s),
        None => args.problem,
    };
    let mut cfg = args
        .overrides
        .apply(SolverConfig::with_method(args.solver.into()))?;
    cfg.keep_trace = args.trace.is_some();
    let inst = spec.build()?;
    log::info!("{}: dim {}, seed {}", inst.name, inst.dim(), inst.seed);
    println!("x0: {}", inst.x0_rule);
    let run = solve(inst.objective.as_ref(), &inst.set, &inst.x0, &cfg)?;
    if let Some(path) = &args.trace {
        let out = File::create(path).map_err(|e| io_failure(e, path))?;
        report::write_trace_csv(
            BufWriter::new(out),
            run.trace.as_deref().unwrap_or_default(),
        )?;
    }
    println!(
        "{} {}: termination={} iters={} f_final={:.12e} residual_inf={:.3e}",
        inst.name,
        cfg.method,
        run.termination,
        run.counters.iterations,
        run.f_final,
        run.residual_inf,
    );
    Ok(if run.termination == Termination::Converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode, Failure> {
    let methods: Vec<Method> = if args.solver.is_empty() {
        Method::ALL.to_vec()
    } else {
        args.solver.iter().map(|&s| s.into()).collect()
    };
    let cfg = args.overrides.apply(SolverConfig::default())?;
    // Open the output first so an unwritable path fails before any solving.
    let out = open_out(args.out.as_deref())?;
    let rows = report::run_suite(&args.problem, &args.seeds.0, &methods, &cfg)?;
    report::write_results_csv(out, &rows)?;
    for m in &methods {
        let mine = rows.iter().filter(|r| r.solver == m.as_str());
        let (ok, total) = mine.fold((0, 0), |(ok, n), r| (ok + r.converged() as usize, n + 1));
        eprintln!("{m}: {ok}/{total} converged");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_profile(args: ProfileArgs) -> Result<ExitCode, Failure> {
    let input = File::open(&args.results).map_err(|e| io_failure(e, &args.results))?;
    let rows = report::read_results_csv(input).map_err(|e| {
        let mut f = Failure::from(e);
        f.err = f.err.context(args.results.display().to_string());
        f
    })?;
    let table = report::profile_from_results(&rows, args.metric.into())?;
    let out = open_out(args.out.as_deref())?;
    report::write_profile_csv(out, &table)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Profile(a) => cmd_profile(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
