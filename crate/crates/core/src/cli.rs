//! `bk-harness` command line: `generate`, `solve` and `bench`.
//!
//! Exit codes: 0 success (target reached), 2 target not reached, 1 usage or I/O error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::bench::{self, BenchSpec, InstanceSource, Manifest};
use crate::driver::{run, TraceRecord};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::mtx::{read_matrix_market, read_vector, write_matrix_market_array, write_vector};
use crate::problem::{generate_gaussian, ProblemInstance};
use crate::sketch::SketchDistribution;
use crate::solver::{Method, SolverConfig, StepRule, DEP_TOL_DEFAULT, D_TOL_DEFAULT, D_TOL_GAUSSIAN};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_REACHED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "bk-harness", version, about = "Bregman-Kaczmarz solvers and benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a Gaussian instance (A.mtx, b.mtx, x_hat.mtx, instance.json).
    Generate(GenerateArgs),
    /// Run one method and write its trace CSV.
    Solve(SolveArgs),
    /// Run repeated trials of several methods and aggregate.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub nnz: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Where the system comes from.
#[derive(Debug, Args, Clone)]
pub struct SourceArgs {
    /// Directory written by `generate`.
    #[arg(long, conflicts_with_all = ["mtx", "m"])]
    pub instance: Option<PathBuf>,
    /// Matrix Market file; a solution with `--density` nonzeros is planted.
    #[arg(long, conflicts_with = "m")]
    pub mtx: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    pub density: f64,
    /// Gaussian instance size (with --n and --nnz).
    #[arg(long, requires_all = ["n", "nnz"])]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub nnz: Option<usize>,
}

#[derive(Debug, Args, Clone)]
pub struct ConfigArgs {
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, default_value = "nonadaptive")]
    pub step_rule: StepRule,
    /// Default: 2.2e-16 for Gaussian instances, 1e-6 otherwise.
    #[arg(long)]
    pub d_tol: Option<f64>,
    #[arg(long, default_value_t = DEP_TOL_DEFAULT)]
    pub dep_tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iters: u64,
    #[arg(long, default_value_t = 1e-6)]
    pub residual_tol: f64,
    /// Default: number of rows (one epoch).
    #[arg(long)]
    pub checkpoint_every: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write 0 for elapsed time so outputs are byte-reproducible.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, default_value = "bkrem")]
    pub method: Method,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Output directory for `trace_<method>.csv`; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Methods to run (repeat or comma-separate); all four by default.
    #[arg(long, value_delimiter = ',')]
    pub method: Vec<Method>,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, default_value_t = 50)]
    pub repeats: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Rerun the bench recorded in a manifest.json (other options ignored).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

/// Metadata written next to a generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceInfo {
    pub kind: String,
    pub m: usize,
    pub n: usize,
    pub nnz: usize,
    pub seed: u64,
}

pub fn write_instance(dir: &Path, p: &ProblemInstance, info: &InstanceInfo) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_matrix_market_array(dir.join("A.mtx"), &p.a.to_dense(), p.rows(), p.cols())?;
    write_vector(dir.join("b.mtx"), &p.b)?;
    if let Some(x) = &p.x_hat {
        write_vector(dir.join("x_hat.mtx"), x)?;
    }
    let path = dir.join("instance.json");
    let json = serde_json::to_string_pretty(info).expect("instance info serializes");
    fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))
}

/// Loads a directory written by [`write_instance`]; `x_hat.mtx` is optional.
pub fn read_instance(dir: &Path, lambda: f64) -> Result<(ProblemInstance, Option<InstanceInfo>)> {
    let a = read_matrix_market(dir.join("A.mtx"))?;
    let b = read_vector(dir.join("b.mtx"))?;
    let xp = dir.join("x_hat.mtx");
    let x_hat = if xp.exists() { Some(read_vector(xp)?) } else { None };
    let ip = dir.join("instance.json");
    let info = match fs::read_to_string(&ip) {
        Ok(text) => Some(serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: ip.clone(),
            line: e.line(),
            msg: e.to_string(),
        })?),
        Err(_) => None,
    };
    Ok((ProblemInstance::new(a, b, x_hat, lambda)?, info))
}

fn is_gaussian(source: &SourceArgs, info: Option<&InstanceInfo>) -> bool {
    source.m.is_some() || info.is_some_and(|i| i.kind == "gaussian")
}

fn build_config(method: Method, c: &ConfigArgs, gaussian: bool, rows: usize) -> Result<SolverConfig> {
    let mut cfg = SolverConfig::new(method);
    cfg.step_rule = c.step_rule;
    cfg.d_tol = c.d_tol.unwrap_or(if gaussian { D_TOL_GAUSSIAN } else { D_TOL_DEFAULT });
    cfg.dep_tol = c.dep_tol;
    cfg.max_iters = c.max_iters;
    cfg.residual_tol = c.residual_tol;
    cfg.checkpoint_every = c.checkpoint_every.unwrap_or(rows.max(1) as u64);
    cfg.seed = c.seed;
    cfg.timing = !c.no_timing;
    cfg.validate()?;
    Ok(cfg)
}

fn gaussian_dims(s: &SourceArgs) -> Option<(usize, usize, usize)> {
    Some((s.m?, s.n?, s.nnz?))
}

/// CSV with header `k,rel_residual,bregman,elapsed_s`.
pub fn solve_csv(trace: &[TraceRecord]) -> String {
    let mut s = String::from("k,rel_residual,bregman,elapsed_s\n");
    for r in trace {
        let breg = r.bregman_to_xhat.map_or_else(String::new, |x| x.to_string());
        s.push_str(&format!("{},{},{},{}\n", r.k, r.rel_residual, breg, r.elapsed_seconds));
    }
    s
}

fn cmd_generate(a: &GenerateArgs) -> Result<i32> {
    let p = generate_gaussian(a.m, a.n, a.nnz, a.seed)?;
    let info = InstanceInfo { kind: "gaussian".into(), m: a.m, n: a.n, nnz: a.nnz, seed: a.seed };
    write_instance(&a.out, &p, &info)?;
    eprintln!("wrote {}x{} instance to {}", a.m, a.n, a.out.display());
    Ok(EXIT_OK)
}

fn cmd_solve(a: &SolveArgs) -> Result<i32> {
    let lambda = a.config.lambda;
    let (problem, info) = if let Some(dir) = &a.source.instance {
        read_instance(dir, lambda)?
    } else if let Some(path) = &a.source.mtx {
        let m: Matrix = read_matrix_market(path)?;
        let src = InstanceSource::MatrixMarket { path: path.clone(), density: a.source.density };
        (bench::trial_instance(&src, lambda, a.config.seed, Some(&m))?, None)
    } else if let Some((m, n, nnz)) = gaussian_dims(&a.source) {
        (generate_gaussian(m, n, nnz, a.config.seed)?.with_lambda(lambda), None)
    } else {
        return Err(Error::InvalidConfig("one of --instance, --mtx or --m/--n/--nnz is required".into()));
    };
    let gaussian = is_gaussian(&a.source, info.as_ref());
    let cfg = build_config(a.method, &a.config, gaussian, problem.rows())?;
    let dist = SketchDistribution::squared_row_norms(&problem.a)?;
    let out = run(&problem, &dist, &cfg)?;
    let csv = solve_csv(&out.trace);
    match &a.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            let p = dir.join(format!("trace_{}.csv", a.method));
            fs::write(&p, csv).map_err(|e| Error::io(&p, e))?;
        }
        None => print!("{csv}"),
    }
    eprintln!(
        "{}: k = {}, relative residual {:.3e}, {}",
        a.method,
        out.iterations,
        out.final_residual(),
        if out.converged { "target reached" } else { "target not reached" }
    );
    Ok(if out.converged { EXIT_OK } else { EXIT_NOT_REACHED })
}

fn bench_spec(a: &BenchArgs) -> Result<BenchSpec> {
    let (source, rows) = if let Some(path) = &a.source.mtx {
        let rows = read_matrix_market(path)?.rows();
        (InstanceSource::MatrixMarket { path: path.clone(), density: a.source.density }, rows)
    } else if let Some((m, n, nnz)) = gaussian_dims(&a.source) {
        (InstanceSource::Gaussian { m, n, nnz }, m)
    } else {
        return Err(Error::InvalidConfig("bench needs --mtx or --m/--n/--nnz".into()));
    };
    let gaussian = matches!(source, InstanceSource::Gaussian { .. });
    let methods = if a.method.is_empty() { Method::ALL.to_vec() } else { a.method.clone() };
    let mut config = build_config(methods[0], &a.config, gaussian, rows)?;
    config.seed = a.config.seed;
    Ok(BenchSpec { source, lambda: a.config.lambda, methods, repeats: a.repeats, base_seed: a.config.seed, config })
}

fn cmd_bench(a: &BenchArgs) -> Result<i32> {
    let spec = match &a.manifest {
        Some(path) => Manifest::load(path)?.spec,
        None => bench_spec(a)?,
    };
    let dir = a.out.as_path();
    let report = bench::run_bench_with(&spec, bench::threads_from_env(), |m| bench::write_method_files(dir, m))?;
    bench::write_summary(dir, &report)?;
    let mut all = true;
    for m in &report.methods {
        let med = m.quantiles.last().map_or(f64::INFINITY, |r| r.median);
        all &= med < spec.config.residual_tol;
        eprintln!(
            "{:>6}: reached {}/{}, median iterations {}",
            m.method.name(),
            m.iterations.reached,
            m.iterations.trials,
            m.iterations.median.map_or("*".into(), |v| v.to_string())
        );
    }
    Ok(if all { EXIT_OK } else { EXIT_NOT_REACHED })
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn main() -> i32 {
    run_cli(std::env::args_os())
}
