use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use permsync::analysis::suites::Suite;
use permsync::analysis::{instance_error, EdgeSetTag};
use permsync::bench::{aggregate, run_benchmark, write_aggregate_csv, write_raw_csv, BenchmarkConfig, Sweep, SweepParam};
use permsync::models::io::{read_problem, write_problem, write_solution};
use permsync::models::{generate, DxSampler, ModelConfig, ModelKind};
use permsync::rng::seeded_rng;
use permsync::solvers::{cemp_init, Algorithm, SolverConfig};
use permsync::{Error, Result};

const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "permsync", version, about = "Permutation synchronization solvers, benchmarks and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic problem and write it as a PSYNC file.
    Generate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a PSYNC problem file.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        algo: Algorithm,
        /// Solution file, or an `i,j,affinity` CSV for cemp-init.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Run seeded trials over a parameter sweep and write raw and aggregate CSVs.
    Benchmark {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated algorithm tags.
        #[arg(long, value_delimiter = ',', required = true)]
        algos: Vec<Algorithm>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "none")]
        sweep_param: SweepParam,
        /// Comma-separated values of the swept parameter.
        #[arg(long, value_delimiter = ',')]
        sweep_values: Vec<f64>,
        #[arg(long)]
        error_set: Option<ErrorSetArg>,
        /// Fill the runtime_ms column.
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: PathBuf,
        /// Aggregate CSV path; defaults to `<out stem>.aggregate.csv`.
        #[arg(long)]
        aggregate: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Run a verification suite. Exit status 0 pass, 1 fail, 2 vacuous.
    Verify {
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ErrorSetArg {
    AllPairs,
    BadEdges,
}

#[derive(Clone, Copy, ValueEnum)]
enum DxArg {
    Haar,
    Lac,
    LacRelative,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    model: ModelKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Corruption probability (uniform).
    #[arg(long)]
    q: Option<f64>,
    /// Probability that a superspreader edge stays clean.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, value_enum, default_value = "haar")]
    dx: DxArg,
    /// Number of corrupting nodes (lbc, lac).
    #[arg(long)]
    nc: Option<usize>,
    /// Edges corrupted per corrupting node (lbc, lac).
    #[arg(long)]
    mc: Option<usize>,
}

impl ModelArgs {
    fn config(&self) -> Result<ModelConfig> {
        let need = |name: &str, v: Option<f64>| {
            v.ok_or_else(|| Error::Input(format!("--{name} is required for model {}", self.model)))
        };
        let local = || -> Result<(usize, usize)> {
            Ok((
                need("nc", self.nc.map(|x| x as f64))? as usize,
                need("mc", self.mc.map(|x| x as f64))? as usize,
            ))
        };
        let cfg = match self.model {
            ModelKind::Uniform => ModelConfig::uniform(self.n, self.m, self.p, need("q", self.q)?),
            ModelKind::Superspreader => {
                let dx = match self.dx {
                    DxArg::Haar => DxSampler::Haar,
                    DxArg::Lac => DxSampler::Lac,
                    DxArg::LacRelative => DxSampler::LacRelative,
                };
                ModelConfig::superspreader(self.n, self.m, self.p, need("eps", self.eps)?, dx)
            }
            ModelKind::Lbc => {
                let (nc, mc) = local()?;
                ModelConfig::lbc(self.n, self.m, self.p, nc, mc)
            }
            ModelKind::Lac => {
                let (nc, mc) = local()?;
                ModelConfig::lac(self.n, self.m, self.p, nc, mc)
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SolverArgs {
    /// Walk length of the cycle-consistency affinities.
    #[arg(long, default_value_t = 2)]
    cycle_len: usize,
    #[arg(long)]
    t0: Option<usize>,
    #[arg(long)]
    t_max: Option<usize>,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        let mut cfg = SolverConfig {
            cycle_len: self.cycle_len,
            ..SolverConfig::default()
        };
        if let Some(t0) = self.t0 {
            cfg.schedule.t0 = t0;
        }
        if let Some(t) = self.t_max {
            cfg.schedule.t_max = t;
        }
        cfg.schedule.validate()?;
        Ok(cfg)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn cmd_generate(model: &ModelArgs, seed: u64, out: &Path) -> Result<ExitCode> {
    let cfg = model.config()?;
    let inst = generate(&cfg, &mut seeded_rng(seed, 0))?;
    write_problem(out, &inst)?;
    println!(
        "n {} m {} edges {} bad {}",
        inst.n(),
        inst.m(),
        inst.topology().num_edges(),
        inst.num_bad().unwrap_or(0)
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(input: &Path, algo: Algorithm, out: Option<&Path>, solver: &SolverArgs) -> Result<ExitCode> {
    let inst = read_problem(input)?;
    let cfg = solver.config()?;
    if algo == Algorithm::CempInit {
        let a = cemp_init(inst.measurement(), &cfg.schedule, cfg.cycle_len, 0.5)?;
        let mut w: Box<dyn Write> = match out {
            Some(p) => Box::new(create(p)?),
            None => Box::new(std::io::stdout().lock()),
        };
        writeln!(w, "i,j,affinity")?;
        for (e, &(i, j)) in inst.topology().edges().iter().enumerate() {
            writeln!(w, "{i},{j},{}", a.value(e))?;
        }
        w.flush()?;
        return Ok(ExitCode::SUCCESS);
    }
    if !inst.topology().is_connected() {
        return Err(Error::Disconnected);
    }
    let rep = algo.run(&inst, &cfg)?;
    if let Some(p) = out {
        write_solution(p, &rep.estimate)?;
    }
    println!("algo {algo} iterations {} converged {}", rep.iterations, rep.converged);
    if inst.truth().is_some() {
        let set = if inst.num_bad().unwrap_or(0) > 0 {
            EdgeSetTag::BadEdges
        } else {
            EdgeSetTag::AllPairs
        };
        println!("error {:.6}", instance_error(&inst, &rep.estimate, set)?.error);
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_benchmark(
    model: &ModelArgs,
    algos: Vec<Algorithm>,
    trials: usize,
    seed: u64,
    sweep_param: SweepParam,
    sweep_values: Vec<f64>,
    error_set: Option<ErrorSetArg>,
    timing: bool,
    out: &Path,
    aggregate_path: Option<PathBuf>,
    solver: &SolverArgs,
) -> Result<ExitCode> {
    let mut cfg = BenchmarkConfig::new(model.config()?, algos, trials, seed);
    cfg.sweep = match (sweep_param, sweep_values.is_empty()) {
        (SweepParam::None, true) => Sweep::none(),
        (SweepParam::None, false) => return Err(Error::Input("--sweep-values given without --sweep-param".into())),
        (_, true) => return Err(Error::Input("--sweep-param given without --sweep-values".into())),
        (param, false) => Sweep {
            param,
            values: sweep_values,
        },
    };
    cfg.error_set = error_set.map(|e| match e {
        ErrorSetArg::AllPairs => EdgeSetTag::AllPairs,
        ErrorSetArg::BadEdges => EdgeSetTag::BadEdges,
    });
    cfg.timing = timing;
    cfg.solver = solver.config()?;
    let rows = run_benchmark(&cfg)?;
    let agg = aggregate(&rows);
    let agg_path = aggregate_path.unwrap_or_else(|| {
        let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        out.with_file_name(format!("{stem}.aggregate.csv"))
    });
    write_raw_csv(create(out)?, &rows)?;
    write_aggregate_csv(create(&agg_path)?, &agg)?;
    for a in &agg {
        println!(
            "{} {}={} mean {:.6} std {:.6} failed {}",
            a.algo, a.sweep_param, a.sweep_value, a.mean_error, a.std_error, a.n_failed
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(suite: Suite, seed: u64) -> Result<ExitCode> {
    let report = suite.run(seed)?;
    for line in &report.lines {
        println!("{line}");
    }
    println!("{}: {}", report.suite, report.outcome);
    Ok(ExitCode::from(report.outcome.exit_code() as u8))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Generate { model, seed, out } => cmd_generate(&model, seed, &out),
        Command::Solve {
            input,
            algo,
            out,
            solver,
        } => cmd_solve(&input, algo, out.as_deref(), &solver),
        Command::Benchmark {
            model,
            algos,
            trials,
            seed,
            sweep_param,
            sweep_values,
            error_set,
            timing,
            out,
            aggregate,
            solver,
        } => cmd_benchmark(
            &model,
            algos,
            trials,
            seed,
            sweep_param,
            sweep_values,
            error_set,
            timing,
            &out,
            aggregate,
            &solver,
        ),
        Command::Verify { suite, seed } => cmd_verify(suite, seed),
    };
    match result {
        Ok(code) => code,
        Err(e @ Error::Input(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
