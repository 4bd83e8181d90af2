//! Seeded benchmark sweeps and their CSV outputs.
//!
//! Each (sweep value, trial) pair generates one instance from the seed
//! `mix(master, sweep_index, trial)` and runs every requested algorithm on it.
//! A failed generation or solve is recorded as a NaN error and the sweep goes on.
//! Rows are sorted by (algorithm tag, sweep index, trial), so the output does
//! not depend on scheduling.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analysis::{instance_error, EdgeSetTag};
use crate::error::{Error, Result};
use crate::models::{generate, Corruption, ModelConfig, ModelKind};
use crate::rng::{mix, seeded_rng};
use crate::solvers::{Algorithm, SolverConfig};

pub const RAW_HEADER: &str = "model,algo,sweep_param,sweep_value,trial,seed,error,iterations,converged,runtime_ms";
pub const AGGREGATE_HEADER: &str = "model,algo,sweep_param,sweep_value,n_trials,mean_error,std_error,n_failed";

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "PERMSYNC_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    None,
    N,
    M,
    P,
    Q,
    Eps,
    Nc,
    Mc,
}

impl SweepParam {
    pub const ALL: [SweepParam; 8] = [
        SweepParam::None,
        SweepParam::N,
        SweepParam::M,
        SweepParam::P,
        SweepParam::Q,
        SweepParam::Eps,
        SweepParam::Nc,
        SweepParam::Mc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::None => "none",
            SweepParam::N => "n",
            SweepParam::M => "m",
            SweepParam::P => "p",
            SweepParam::Q => "q",
            SweepParam::Eps => "eps",
            SweepParam::Nc => "nc",
            SweepParam::Mc => "mc",
        }
    }

    fn integral(self) -> bool {
        matches!(self, SweepParam::N | SweepParam::M | SweepParam::Nc | SweepParam::Mc)
    }

    /// `base` with this parameter set to `value`.
    pub fn apply(self, base: &ModelConfig, value: f64) -> Result<ModelConfig> {
        if self.integral() && (value < 0.0 || value.fract() != 0.0) {
            return Err(Error::input(format!("{} takes nonnegative integers, got {value}", self.name())));
        }
        let mut cfg = base.clone();
        let wrong = || Error::input(format!("model {} has no parameter {}", base.kind(), self.name()));
        match (self, &mut cfg.corruption) {
            (SweepParam::None, _) => {}
            (SweepParam::N, _) => cfg.n = value as usize,
            (SweepParam::M, _) => cfg.m = value as usize,
            (SweepParam::P, _) => cfg.p = value,
            (SweepParam::Q, Corruption::Uniform { q }) => *q = value,
            (SweepParam::Eps, Corruption::Superspreader { eps, .. }) => *eps = value,
            (SweepParam::Nc, Corruption::Lbc { nc, .. } | Corruption::Lac { nc, .. }) => *nc = value as usize,
            (SweepParam::Mc, Corruption::Lbc { mc, .. } | Corruption::Lac { mc, .. }) => *mc = value as usize,
            _ => return Err(wrong()),
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepParam::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::input(format!("unknown sweep parameter `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn none() -> Self {
        Sweep {
            param: SweepParam::None,
            values: vec![0.0],
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchmarkConfig {
    pub model: ModelConfig,
    pub algorithms: Vec<Algorithm>,
    pub sweep: Sweep,
    pub trials: usize,
    pub seed: u64,
    /// Pairs the error is averaged over; `None` picks all pairs for the uniform
    /// model and corrupted edges otherwise.
    pub error_set: Option<EdgeSetTag>,
    /// Record wall-clock time per run. Off by default so that outputs are
    /// reproducible byte for byte.
    pub timing: bool,
    pub solver: SolverConfig,
}

impl BenchmarkConfig {
    pub fn new(model: ModelConfig, algorithms: Vec<Algorithm>, trials: usize, seed: u64) -> Self {
        BenchmarkConfig {
            model,
            algorithms,
            sweep: Sweep::none(),
            trials,
            seed,
            error_set: None,
            timing: false,
            solver: SolverConfig::default(),
        }
    }

    pub fn error_set(&self) -> EdgeSetTag {
        self.error_set.unwrap_or(match self.model.kind() {
            ModelKind::Uniform => EdgeSetTag::AllPairs,
            _ => EdgeSetTag::BadEdges,
        })
    }

    pub fn validate(&self) -> Result<Vec<ModelConfig>> {
        if self.trials == 0 {
            return Err(Error::input("trials must be at least 1"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::input("no algorithms requested"));
        }
        if let Some(a) = self.algorithms.iter().find(|a| !a.yields_permutations()) {
            return Err(Error::input(format!("{a} cannot be benchmarked: it does not produce permutations")));
        }
        if self.sweep.values.is_empty() {
            return Err(Error::input("sweep has no values"));
        }
        self.solver.schedule.validate()?;
        self.sweep
            .values
            .iter()
            .map(|&v| self.sweep.param.apply(&self.model, v))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkRow {
    pub model: ModelKind,
    pub algo: Algorithm,
    pub sweep_param: SweepParam,
    pub sweep_value: f64,
    pub trial: usize,
    pub seed: u64,
    /// NaN when the solver failed.
    pub error: f64,
    pub iterations: usize,
    pub converged: bool,
    pub runtime_ms: Option<f64>,
}

/// Thread pool honoring [`THREADS_ENV`].
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let k: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::input(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
        if k == 0 {
            return Err(Error::input(format!("{THREADS_ENV} must be positive")));
        }
        builder = builder.num_threads(k);
    }
    builder.build().map_err(|e| Error::input(format!("thread pool: {e}")))
}

pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<Vec<BenchmarkRow>> {
    let models = cfg.validate()?;
    let set = cfg.error_set();
    let jobs: Vec<(usize, usize)> = (0..models.len())
        .flat_map(|s| (0..cfg.trials).map(move |t| (s, t)))
        .collect();
    let run_job = |&(s, t): &(usize, usize)| -> Vec<BenchmarkRow> {
        let seed = mix(cfg.seed, s as u64, t as u64);
        let inst = generate(&models[s], &mut seeded_rng(seed, 0));
        cfg.algorithms
            .iter()
            .map(|&algo| {
                let outcome = inst.as_ref().ok().and_then(|inst| {
                    let rep = algo.run(inst, &cfg.solver).ok()?;
                    Some((instance_error(inst, &rep.estimate, set).ok()?.error, rep))
                });
                let (error, iterations, converged, runtime) = match outcome {
                    Some((err, rep)) => (err, rep.iterations, rep.converged, rep.wall_time),
                    None => (f64::NAN, 0, false, Default::default()),
                };
                BenchmarkRow {
                    model: models[s].kind(),
                    algo,
                    sweep_param: cfg.sweep.param,
                    sweep_value: cfg.sweep.values[s],
                    trial: t,
                    seed,
                    error,
                    iterations,
                    converged,
                    runtime_ms: cfg.timing.then_some(runtime.as_secs_f64() * 1e3),
                }
            })
            .collect()
    };
    let pool = thread_pool()?;
    let nested: Vec<Vec<BenchmarkRow>> = pool.install(|| jobs.par_iter().map(run_job).collect());
    let sweep_index = |v: f64| cfg.sweep.values.iter().position(|x| *x == v).unwrap_or(usize::MAX);
    let mut rows: Vec<BenchmarkRow> = nested.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        (a.algo.tag(), sweep_index(a.sweep_value), a.trial).cmp(&(b.algo.tag(), sweep_index(b.sweep_value), b.trial))
    });
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub model: ModelKind,
    pub algo: Algorithm,
    pub sweep_param: SweepParam,
    pub sweep_value: f64,
    pub n_trials: usize,
    /// Mean over trials whose error is finite.
    pub mean_error: f64,
    /// Sample standard deviation (`n − 1` denominator) over the same trials.
    pub std_error: f64,
    pub n_failed: usize,
}

/// Per (algorithm, sweep value) statistics, in first-appearance order of `rows`.
pub fn aggregate(rows: &[BenchmarkRow]) -> Vec<AggregateRow> {
    let mut groups: Vec<(usize, Vec<f64>, usize)> = Vec::new();
    for (k, r) in rows.iter().enumerate() {
        let pos = groups.iter().position(|(first, _, _)| {
            let f = &rows[*first];
            f.algo == r.algo && f.sweep_value == r.sweep_value && f.model == r.model
        });
        let g = match pos {
            Some(p) => &mut groups[p],
            None => {
                groups.push((k, Vec::new(), 0));
                groups.last_mut().expect("just pushed")
            }
        };
        if r.error.is_finite() {
            g.1.push(r.error);
        } else {
            g.2 += 1;
        }
    }
    groups
        .into_iter()
        .map(|(first, errs, failed)| {
            let f = &rows[first];
            let n = errs.len() as f64;
            let mean = if errs.is_empty() { f64::NAN } else { errs.iter().sum::<f64>() / n };
            let std = if errs.len() < 2 {
                if errs.is_empty() {
                    f64::NAN
                } else {
                    0.0
                }
            } else {
                (errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            };
            AggregateRow {
                model: f.model,
                algo: f.algo,
                sweep_param: f.sweep_param,
                sweep_value: f.sweep_value,
                n_trials: errs.len() + failed,
                mean_error: mean,
                std_error: std,
                n_failed: failed,
            }
        })
        .collect()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

pub fn write_raw_csv(out: impl Write, rows: &[BenchmarkRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RAW_HEADER.split(',')).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.model.to_string(),
            r.algo.to_string(),
            r.sweep_param.to_string(),
            r.sweep_value.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.error.to_string(),
            r.iterations.to_string(),
            r.converged.to_string(),
            r.runtime_ms.map(|t| format!("{t:.3}")).unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_aggregate_csv(out: impl Write, rows: &[AggregateRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AGGREGATE_HEADER.split(',')).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.model.to_string(),
            r.algo.to_string(),
            r.sweep_param.to_string(),
            r.sweep_value.to_string(),
            r.n_trials.to_string(),
            r.mean_error.to_string(),
            r.std_error.to_string(),
            r.n_failed.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
