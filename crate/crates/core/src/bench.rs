//! Repeated seeded trials of several methods with quantile aggregation.
//!
//! Output files written by [`write_report`]:
//!
//! | file | columns |
//! |------|---------|
//! | `trace_<method>.csv` | `trial,seed,k,rel_residual,bregman,elapsed_s` |
//! | `quantiles_<method>.csv` | `k,min,q25,median,q75,max,elapsed_median` |
//! | `time_to_target.csv` | `method,min,median,mean,max,reached` (seconds) |
//! | `iterations_to_target.csv` | same shape, in iterations |
//! | `manifest.json` | the full [`BenchSpec`] plus per-trial seeds |
//!
//! Quantiles are taken across trials at each point of a shared checkpoint
//! grid `{0, c, 2c, ...} ∪ {max_iters}`. A trial that stopped early carries its
//! last record forward. Unreached targets print as `*`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::driver::{run, RunOutcome, TraceRecord};
use crate::error::{Error, Result};
use crate::mtx::read_matrix_market;
use crate::problem::{generate_gaussian, plant_solution, ProblemInstance};
use crate::sketch::SketchDistribution;
use crate::solver::{Method, SolverConfig};

pub const THREADS_ENV: &str = "BK_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceSource {
    /// Fresh Gaussian instance per trial.
    Gaussian { m: usize, n: usize, nnz: usize },
    /// Fixed matrix, fresh planted solution per trial.
    MatrixMarket { path: PathBuf, density: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    pub source: InstanceSource,
    pub lambda: f64,
    pub methods: Vec<Method>,
    pub repeats: u64,
    pub base_seed: u64,
    /// Shared settings; `config.method` and `config.seed` are overridden per run.
    pub config: SolverConfig,
}

impl BenchSpec {
    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::InvalidConfig("repeats must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("at least one method is required".into()));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::InvalidConfig(format!("lambda must be finite and >= 0, got {}", self.lambda)));
        }
        self.config.validate()
    }

    pub fn trial_seed(&self, trial: u64) -> u64 {
        self.base_seed.wrapping_add(trial)
    }

    pub fn grid(&self) -> Vec<u64> {
        checkpoint_grid(self.config.max_iters, self.config.checkpoint_every)
    }
}

/// Builds the instance of one trial.
pub fn trial_instance(source: &InstanceSource, lambda: f64, seed: u64, base: Option<&crate::linalg::Matrix>) -> Result<ProblemInstance> {
    match source {
        InstanceSource::Gaussian { m, n, nnz } => Ok(generate_gaussian(*m, *n, *nnz, seed)?.with_lambda(lambda)),
        InstanceSource::MatrixMarket { path, density } => {
            let a = match base {
                Some(a) => a.clone(),
                None => read_matrix_market(path)?,
            };
            let (x_hat, b) = plant_solution(&a, *density, seed)?;
            ProblemInstance::new(a, b, Some(x_hat), lambda)
        }
    }
}

/// `{0, c, 2c, ...}` up to `max_iters`, always ending in `max_iters`.
pub fn checkpoint_grid(max_iters: u64, every: u64) -> Vec<u64> {
    let every = every.max(1);
    let mut grid: Vec<u64> = (0..=max_iters / every).map(|i| i * every).collect();
    if grid.last() != Some(&max_iters) {
        grid.push(max_iters);
    }
    grid
}

/// Value of the last record at or before each grid point.
pub fn align_trace(trace: &[TraceRecord], grid: &[u64]) -> Vec<TraceRecord> {
    let mut out = Vec::with_capacity(grid.len());
    let mut idx = 0;
    for &g in grid {
        while idx + 1 < trace.len() && trace[idx + 1].k <= g {
            idx += 1;
        }
        let mut rec = trace[idx].clone();
        rec.k = g;
        out.push(rec);
    }
    out
}

/// Linear-interpolation quantile of sorted data (`h = (n-1) q`).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileRow {
    pub k: u64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
    pub elapsed_median: f64,
}

/// Quantiles of relative residuals across trials at every grid point.
pub fn aggregate(traces: &[Vec<TraceRecord>], grid: &[u64]) -> Vec<QuantileRow> {
    let aligned: Vec<Vec<TraceRecord>> = traces.iter().map(|t| align_trace(t, grid)).collect();
    grid.iter()
        .enumerate()
        .map(|(i, &k)| {
            let mut res: Vec<f64> = aligned.iter().map(|t| t[i].rel_residual).collect();
            let mut el: Vec<f64> = aligned.iter().map(|t| t[i].elapsed_seconds).collect();
            res.sort_by(f64::total_cmp);
            el.sort_by(f64::total_cmp);
            QuantileRow {
                k,
                min: res[0],
                q25: quantile_sorted(&res, 0.25),
                median: quantile_sorted(&res, 0.5),
                q75: quantile_sorted(&res, 0.75),
                max: res[res.len() - 1],
                elapsed_median: quantile_sorted(&el, 0.5),
            }
        })
        .collect()
}

/// Summary of a censored sample (`None` = target not reached).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetStats {
    pub min: Option<f64>,
    pub median: Option<f64>,
    pub mean: Option<f64>,
    pub max: Option<f64>,
    pub reached: usize,
    pub trials: usize,
}

impl TargetStats {
    /// Unreached trials count as `+inf`; mean and max are undefined if any is unreached.
    pub fn from_samples(samples: &[Option<f64>]) -> Self {
        let mut v: Vec<f64> = samples.iter().map(|s| s.unwrap_or(f64::INFINITY)).collect();
        v.sort_by(f64::total_cmp);
        let reached = samples.iter().filter(|s| s.is_some()).count();
        let finite = |x: f64| x.is_finite().then_some(x);
        let all = reached == samples.len() && !samples.is_empty();
        Self {
            min: v.first().copied().and_then(finite),
            median: if v.is_empty() { None } else { finite(quantile_sorted(&v, 0.5)) },
            mean: all.then(|| v.iter().sum::<f64>() / v.len() as f64),
            max: if all { v.last().copied() } else { None },
            reached,
            trials: samples.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: u64,
    pub seed: u64,
    pub converged: bool,
    pub iterations: u64,
    pub trace: Vec<TraceRecord>,
}

impl TrialResult {
    fn from_outcome(trial: u64, seed: u64, out: RunOutcome) -> Self {
        Self { trial, seed, converged: out.converged, iterations: out.iterations, trace: out.trace }
    }

    pub fn time_to_target(&self, tol: f64) -> Option<f64> {
        self.trace.iter().find(|r| r.rel_residual < tol).map(|r| r.elapsed_seconds)
    }

    pub fn iterations_to_target(&self, tol: f64) -> Option<f64> {
        self.trace.iter().find(|r| r.rel_residual < tol).map(|r| r.k as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodReport {
    pub method: Method,
    pub trials: Vec<TrialResult>,
    pub quantiles: Vec<QuantileRow>,
    pub time: TargetStats,
    pub iterations: TargetStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub spec: BenchSpec,
    pub methods: Vec<MethodReport>,
}

impl BenchReport {
    pub fn method(&self, m: Method) -> Option<&MethodReport> {
        self.methods.iter().find(|r| r.method == m)
    }
}

/// Worker count from `BK_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n: &usize| n > 0)
}

/// Runs every (method, trial) pair. Trials run on a rayon pool capped by
/// `threads` (all cores if `None`); instances are built outside the timed region.
pub fn run_bench(spec: &BenchSpec, threads: Option<usize>) -> Result<BenchReport> {
    run_bench_with(spec, threads, |_| Ok(()))
}

/// Like [`run_bench`], calling `on_method` as soon as each method is finished.
pub fn run_bench_with(
    spec: &BenchSpec,
    threads: Option<usize>,
    mut on_method: impl FnMut(&MethodReport) -> Result<()>,
) -> Result<BenchReport> {
    spec.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;

    let base = match &spec.source {
        InstanceSource::MatrixMarket { path, .. } => Some(read_matrix_market(path)?),
        InstanceSource::Gaussian { .. } => None,
    };
    let instances: Vec<(ProblemInstance, SketchDistribution)> = pool.install(|| {
        (0..spec.repeats)
            .into_par_iter()
            .map(|t| {
                let p = trial_instance(&spec.source, spec.lambda, spec.trial_seed(t), base.as_ref())?;
                let d = SketchDistribution::squared_row_norms(&p.a)?;
                Ok((p, d))
            })
            .collect::<Result<_>>()
    })?;

    let grid = spec.grid();
    let tol = spec.config.residual_tol;
    let mut methods = Vec::with_capacity(spec.methods.len());
    for &method in &spec.methods {
        let trials: Vec<TrialResult> = pool.install(|| {
            instances
                .par_iter()
                .enumerate()
                .map(|(t, (p, d))| {
                    let t = t as u64;
                    let mut cfg = spec.config.clone();
                    cfg.method = method;
                    cfg.seed = spec.trial_seed(t);
                    Ok(TrialResult::from_outcome(t, cfg.seed, run(p, d, &cfg)?))
                })
                .collect::<Result<_>>()
        })?;
        let traces: Vec<Vec<TraceRecord>> = trials.iter().map(|t| t.trace.clone()).collect();
        let time: Vec<Option<f64>> = trials.iter().map(|t| t.time_to_target(tol)).collect();
        let iters: Vec<Option<f64>> = trials.iter().map(|t| t.iterations_to_target(tol)).collect();
        let report = MethodReport {
            method,
            quantiles: aggregate(&traces, &grid),
            time: TargetStats::from_samples(&time),
            iterations: TargetStats::from_samples(&iters),
            trials,
        };
        on_method(&report)?;
        methods.push(report);
    }
    Ok(BenchReport { spec: spec.clone(), methods })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "*".to_string(), |x| x.to_string())
}

fn fmt_bregman(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn trace_csv(trials: &[TrialResult]) -> String {
    let mut s = String::from("trial,seed,k,rel_residual,bregman,elapsed_s\n");
    for t in trials {
        for r in &t.trace {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                t.trial,
                t.seed,
                r.k,
                r.rel_residual,
                fmt_bregman(r.bregman_to_xhat),
                r.elapsed_seconds
            );
        }
    }
    s
}

pub fn quantiles_csv(rows: &[QuantileRow]) -> String {
    let mut s = String::from("k,min,q25,median,q75,max,elapsed_median\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{},{},{}", r.k, r.min, r.q25, r.median, r.q75, r.max, r.elapsed_median);
    }
    s
}

pub fn target_csv<'a>(rows: impl IntoIterator<Item = (Method, &'a TargetStats)>) -> String {
    let mut s = String::from("method,min,median,mean,max,reached\n");
    for (m, t) in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}/{}",
            m,
            fmt_opt(t.min),
            fmt_opt(t.median),
            fmt_opt(t.mean),
            fmt_opt(t.max),
            t.reached,
            t.trials
        );
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub spec: BenchSpec,
    pub trial_seeds: Vec<u64>,
    pub files: Vec<String>,
}

impl Manifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.into(),
            line: e.line(),
            msg: e.to_string(),
        })
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let p = dir.join(name);
    fs::write(&p, contents).map_err(|e| Error::io(&p, e))
}

/// Writes the per-method files of one method.
pub fn write_method_files(dir: &Path, report: &MethodReport) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(dir, &format!("trace_{}.csv", report.method), &trace_csv(&report.trials))?;
    write_file(dir, &format!("quantiles_{}.csv", report.method), &quantiles_csv(&report.quantiles))
}

/// Writes the summary tables and manifest; returns the manifest.
pub fn write_summary(dir: &Path, report: &BenchReport) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(dir, "time_to_target.csv", &target_csv(report.methods.iter().map(|r| (r.method, &r.time))))?;
    write_file(
        dir,
        "iterations_to_target.csv",
        &target_csv(report.methods.iter().map(|r| (r.method, &r.iterations))),
    )?;
    let mut files: Vec<String> = report
        .methods
        .iter()
        .flat_map(|r| [format!("trace_{}.csv", r.method), format!("quantiles_{}.csv", r.method)])
        .collect();
    files.extend(["time_to_target.csv".into(), "iterations_to_target.csv".into(), "manifest.json".into()]);
    let manifest = Manifest {
        spec: report.spec.clone(),
        trial_seeds: (0..report.spec.repeats).map(|t| report.spec.trial_seed(t)).collect(),
        files,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(dir, "manifest.json", &(json + "\n"))?;
    Ok(manifest)
}

pub fn write_report(dir: &Path, report: &BenchReport) -> Result<Manifest> {
    for m in &report.methods {
        write_method_files(dir, m)?;
    }
    write_summary(dir, report)
}
