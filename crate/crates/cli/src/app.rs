//! Commands behind the `bilinear` binary.
//!
//! Exit codes: 0 success, 1 unreadable input or bad flags, 2 infeasible or
//! unbounded program, 3 model too large to enumerate, 4 failed `oracle --check`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use bilinear_core::bilinear::BilinearProgram;
use bilinear_core::models::{
    compile_decmdp, compile_game, extract_policy, generate_rover, oracle_enumerate, prune_unreachable, DecMdp,
    RoverConfig,
};
use bilinear_core::pipeline::{solve_program, PipelineConfig, PipelineResult};
use bilinear_core::reduction::{project_objective, reduce, Scale};
use bilinear_core::solver::{PivotMethod, SolverConfig, TraceRow};
use bilinear_core::Error as CoreError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::document::{
    policy_doc, read_document, read_solution, write_document, write_solution, AssignmentDoc, BilinearDoc, DecMdpDoc,
    DocumentError, ProblemDocument, SolutionDocument,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_TOO_LARGE: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

pub const TRACE_HEADER: [&str; 7] = [
    "iteration",
    "incumbent_value",
    "upper_bound",
    "error_bound",
    "region_count",
    "planes_count",
    "elapsed_ms",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Document { path: PathBuf, source: DocumentError },
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
    #[error("solution value {solver} disagrees with the oracle value {oracle} (allowed gap {allowed})")]
    CheckFailed { solver: f64, oracle: f64, allowed: f64 },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                CoreError::XInfeasible | CoreError::YInfeasible | CoreError::XUnbounded | CoreError::YUnbounded => {
                    EXIT_INFEASIBLE
                }
                CoreError::TooLarge { .. } => EXIT_TOO_LARGE,
                _ => EXIT_INPUT,
            },
            CliError::CheckFailed { .. } => EXIT_CHECK_FAILED,
            _ => EXIT_INPUT,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bilinear", version, about = "Separable bilinear program solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a problem document.
    Solve(SolveArgs),
    /// Write the dimensionality-reduced program of a problem document.
    Reduce(ReduceArgs),
    /// Generate benchmark instances.
    Benchmark(BenchmarkArgs),
    /// Enumerate all deterministic policies of a DEC-MDP document.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PivotArg {
    Basic,
    Feasible,
    LinearBound,
    CuttingPlane,
}

impl From<PivotArg> for PivotMethod {
    fn from(p: PivotArg) -> Self {
        match p {
            PivotArg::Basic => PivotMethod::Basic,
            PivotArg::Feasible => PivotMethod::Feasible,
            PivotArg::LinearBound => PivotMethod::LinearBound,
            PivotArg::CuttingPlane => PivotMethod::CuttingPlane,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Target gap.
    #[arg(long, default_value_t = 1e-4)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long, value_enum, default_value_t = PivotArg::LinearBound)]
    pub pivot: PivotArg,
    /// Number of iterated best-response runs seeding the incumbent.
    #[arg(long, default_value_t = 0)]
    pub presolve: usize,
    /// Singular directions with scaled value at or below this are dropped.
    #[arg(long, default_value_t = 1e-4)]
    pub reduce_epsilon: f64,
    /// Project the coupling onto the null space of pure equality rows first.
    #[arg(long)]
    pub project: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SolverArgs {
    fn pipeline(&self, seed: u64) -> Result<PipelineConfig, CliError> {
        if !(self.epsilon > 0.0) {
            return Err(CliError::Usage("--epsilon must be positive".into()));
        }
        if !(self.reduce_epsilon >= 0.0) {
            return Err(CliError::Usage("--reduce-epsilon must be nonnegative".into()));
        }
        Ok(PipelineConfig {
            solver: SolverConfig {
                epsilon: self.epsilon,
                max_iter: self.max_iter,
                method: self.pivot.into(),
                presolve: self.presolve,
                seed,
            },
            reduce_epsilon: self.reduce_epsilon,
            project: self.project,
            scale: Scale::Auto,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Solution document; printed to stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Convergence trace CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReduceArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Reduced problem document; printed to stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-4)]
    pub reduce_epsilon: f64,
    #[arg(long)]
    pub project: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Rover,
}

#[derive(Debug, Clone, Args)]
pub struct BenchmarkArgs {
    #[arg(value_enum)]
    pub family: Family,
    /// Directory for the instance files and the summary.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Number of shared sites, counted from the first.
    #[arg(long, default_value_t = 5)]
    pub shared: usize,
    #[arg(long, default_value_t = 6)]
    pub sites: usize,
    #[arg(long, default_value_t = 15)]
    pub horizon: usize,
    /// Solve every instance and write `summary.csv`.
    #[arg(long)]
    pub solve: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Solution document to compare against the enumerated optimum.
    #[arg(long)]
    pub check: Option<PathBuf>,
}

/// Runs a parsed command, writing reports to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(a) => cmd_solve(&a, out),
        Command::Reduce(a) => cmd_reduce(&a, out),
        Command::Benchmark(a) => cmd_benchmark(&a, out),
        Command::Oracle(a) => cmd_oracle(&a, out),
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn stdout_text(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
}

pub fn load_problem(path: &Path) -> Result<ProblemDocument, CliError> {
    read_document(&read_text(path)?).map_err(|source| CliError::Document { path: path.to_path_buf(), source })
}

/// A document as a program, with the model it came from when it is a DEC-MDP.
fn compile(path: &Path, doc: &ProblemDocument) -> Result<(BilinearProgram, Option<DecMdp>), CliError> {
    let bad = |source: DocumentError| CliError::Document { path: path.to_path_buf(), source };
    Ok(match doc {
        ProblemDocument::Bilinear(b) => (b.to_program().map_err(bad)?, None),
        ProblemDocument::Decmdp(d) => {
            let m = prune_unreachable(&d.to_model().map_err(bad)?);
            (compile_decmdp(&m)?, Some(m))
        }
        ProblemDocument::Game(g) => (compile_game(&g.to_spec().map_err(bad)?)?, None),
    })
}

fn format_float(v: f64) -> String {
    format!("{v:e}")
}

pub fn write_trace(path: &Path, rows: &[TraceRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TRACE_HEADER)?;
    for r in rows {
        w.write_record([
            r.iteration.to_string(),
            format_float(r.incumbent_value),
            format_float(r.upper_bound),
            format_float(r.error_bound),
            r.region_count.to_string(),
            r.planes_count.to_string(),
            format!("{:.3}", r.elapsed_ms),
        ])?;
    }
    w.flush().map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    Ok(())
}

fn solution_document(r: &PipelineResult, model: Option<&DecMdp>) -> Result<SolutionDocument, CliError> {
    let policy = match model {
        Some(m) => Some(policy_doc(m, &extract_policy(m, &r.assignment)?)),
        None => None,
    };
    Ok(SolutionDocument {
        value: r.value,
        bound: r.bound,
        iterations: r.iterations,
        converged: r.converged,
        kept_dims: r.kept_dims,
        reduction_error: r.reduction_error,
        assignment: AssignmentDoc::from(&r.assignment),
        policy,
    })
}

/// Seed of stream `stream` derived from the user seed.
fn derived_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(index) * 2);
    rng.next_u64()
}

const PRESOLVE_STREAM: u64 = 1;
const INSTANCE_STREAM: u64 = 2;

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let config = a.solver.pipeline(derived_seed(a.solver.seed, PRESOLVE_STREAM, 0))?;
    let doc = load_problem(&a.input)?;
    let (program, model) = compile(&a.input, &doc)?;
    let r = solve_program(&program, &config)?;
    let text = write_solution(&solution_document(&r, model.as_ref())?);
    if let Some(path) = &a.trace {
        write_trace(path, &r.trace)?;
    }
    match &a.output {
        Some(path) => {
            write_text(path, &text)?;
            stdout_text(out, &format!("value {}\nbound {}\niterations {}\n", r.value, r.bound, r.iterations))
        }
        None => stdout_text(out, &text),
    }
}

fn cmd_reduce(a: &ReduceArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if !(a.reduce_epsilon >= 0.0) {
        return Err(CliError::Usage("--reduce-epsilon must be nonnegative".into()));
    }
    let doc = load_problem(&a.input)?;
    let (program, _) = compile(&a.input, &doc)?;
    let program = if a.project { project_objective(&program)? } else { program };
    let r = reduce(&program, a.reduce_epsilon, Scale::Auto)?;
    let report = format!("kept_dims {}\nerror_bound {}\n", r.kept_dims, r.error_bound);
    let text = write_document(&ProblemDocument::Bilinear(BilinearDoc::from_program(&r.program)));
    match &a.output {
        Some(path) => {
            write_text(path, &text)?;
            stdout_text(out, &report)
        }
        None => {
            stdout_text(out, &text)?;
            eprint!("{report}");
            Ok(())
        }
    }
}

pub const SUMMARY_HEADER: [&str; 5] = ["instance", "value", "bound", "iterations", "ms"];

fn cmd_benchmark(a: &BenchmarkArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.shared > a.sites {
        return Err(CliError::Usage(format!("--shared {} exceeds --sites {}", a.shared, a.sites)));
    }
    let config = a.solver.pipeline(derived_seed(a.solver.seed, PRESOLVE_STREAM, 0))?;
    fs::create_dir_all(&a.output).map_err(|source| CliError::Io { path: a.output.clone(), source })?;
    let mut summary = if a.solve {
        let path = a.output.join("summary.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(SUMMARY_HEADER)?;
        Some((path, w))
    } else {
        None
    };
    for i in 0..a.count {
        let rover = RoverConfig {
            sites: a.sites,
            horizon: a.horizon,
            shared: (1..=a.shared).collect(),
            seed: derived_seed(a.solver.seed, INSTANCE_STREAM, i as u64),
        };
        let m = generate_rover(&rover).map_err(|e| CliError::Usage(e.to_string()))?;
        let name = format!("rover_{i:03}");
        let doc = ProblemDocument::Decmdp(DecMdpDoc::from_model(&m));
        write_text(&a.output.join(format!("{name}.json")), &write_document(&doc))?;
        if let Some((_, w)) = summary.as_mut() {
            let started = Instant::now();
            let r = solve_program(&compile_decmdp(&prune_unreachable(&m))?, &config)?;
            let ms = started.elapsed().as_secs_f64() * 1e3;
            w.write_record([
                name.clone(),
                format_float(r.value),
                format_float(r.bound),
                r.iterations.to_string(),
                format!("{ms:.3}"),
            ])?;
            stdout_text(out, &format!("{name} value {} bound {} iterations {}\n", r.value, r.bound, r.iterations))?;
        }
    }
    if let Some((path, mut w)) = summary {
        w.flush().map_err(|source| CliError::Io { path, source })?;
    }
    Ok(())
}

fn cmd_oracle(a: &OracleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let doc = load_problem(&a.input)?;
    let ProblemDocument::Decmdp(d) = &doc else {
        return Err(CliError::Usage("the oracle needs a decmdp document".into()));
    };
    let m = d
        .to_model()
        .map_err(|source| CliError::Document { path: a.input.clone(), source })?;
    let (value, policy) = oracle_enumerate(&m)?;
    let mut report = format!("value {value}\n");
    for (i, side) in policy_doc(&m, &policy).iter().enumerate() {
        for (s, act) in side {
            report.push_str(&format!("agent{} {s} {act}\n", i + 1));
        }
    }
    stdout_text(out, &report)?;
    if let Some(path) = &a.check {
        let sol = read_solution(&read_text(path)?).map_err(|source| CliError::Document { path: path.clone(), source })?;
        let allowed = 1e-6 + sol.bound;
        if (value - sol.value).abs() > allowed {
            return Err(CliError::CheckFailed { solver: sol.value, oracle: value, allowed });
        }
        stdout_text(out, "check ok\n")?;
    }
    Ok(())
}
