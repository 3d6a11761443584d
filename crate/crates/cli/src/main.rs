//! `cgsieve`: plant, solve, verify and benchmark from the command line.

mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use cgsieve_core::kernel::dense::cross_check;
use cgsieve_core::rep::IdentityReport;
use cgsieve_core::{solve_hidden_involution, HiddenOracle, InvolutionLabel, SolverConfig};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use report::{BenchFit, BenchPoint, RunReport, RunSummary};

const EXIT_IO: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_ALGORITHM: u8 = 3;
const EXIT_IDENTITIES: u8 = 4;
const EXIT_CROSS_CHECK: u8 = 5;

#[derive(Parser)]
#[command(name = "cgsieve", version, about = "Hidden involutions in D4^n and Simon's algorithm, simulated")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a uniformly random involution label as JSON.
    Plant {
        #[arg(long, env = "CGSIEVE_N")]
        n: usize,
        #[arg(long, env = "CGSIEVE_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Plant and recover `trials` labels; one JSON line per trial plus a summary.
    Run(RunArgs),
    /// Check the representation identities and print the report.
    VerifyReps {
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compare the symbolic kernel with the dense simulator.
    CrossCheck {
        #[arg(long, env = "CGSIEVE_N")]
        n: usize,
        /// Labels to sample when n = 2 (n = 1 always checks all four).
        #[arg(long, env = "CGSIEVE_CASES", default_value_t = 50)]
        cases: usize,
        #[arg(long, env = "CGSIEVE_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Sweep n and fit the growth of the mean query count.
    Bench {
        /// Comma-separated sizes.
        #[arg(long, env = "CGSIEVE_NS", value_delimiter = ',', default_value = "4,8,16")]
        ns: Vec<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args)]
struct OutArgs {
    /// Write output here instead of stdout.
    #[arg(long, env = "CGSIEVE_OUT")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, env = "CGSIEVE_TRIALS", default_value_t = 10)]
    trials: u64,
    #[arg(long, env = "CGSIEVE_SEED", default_value_t = 0)]
    seed: u64,
    /// Degenerate cascades tolerated per doubling round.
    #[arg(long, env = "CGSIEVE_RETRIES", default_value_t = 10)]
    retries: u32,
    /// Orthogonality samples per component in stage C.
    #[arg(long = "stage-c-k", env = "CGSIEVE_STAGE_C_K", default_value_t = 20)]
    stage_c_k: u32,
    /// Full-pipeline restarts after a failed attempt.
    #[arg(long, env = "CGSIEVE_RESTARTS", default_value_t = 3)]
    restarts: u32,
    /// Worker threads (default: available parallelism).
    #[arg(long, env = "CGSIEVE_JOBS")]
    jobs: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, env = "CGSIEVE_N")]
    n: usize,
    #[command(flatten)]
    common: CommonArgs,
    /// Add per-trial wall time (makes output nondeterministic).
    #[arg(long)]
    timing: bool,
}

#[derive(Debug)]
enum Failure {
    Validation(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type CmdResult = Result<u8, Failure>;

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn open_output(out: &OutArgs) -> io::Result<Box<dyn Write>> {
    Ok(match &out.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_line<T: Serialize>(w: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *w, value).map_err(io::Error::from)?;
    w.write_all(b"\n")
}

fn check_n(n: usize) -> Result<(), Failure> {
    if n == 0 {
        return Err(Failure::Validation("--n must be at least 1".into()));
    }
    Ok(())
}

impl CommonArgs {
    fn solver_config(&self) -> Result<SolverConfig, Failure> {
        if self.trials == 0 {
            return Err(Failure::Validation("--trials must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(Failure::Validation("--jobs must be at least 1".into()));
        }
        let config = SolverConfig {
            retry_budget: self.retries,
            stage_c_samples: self.stage_c_k,
            restarts: self.restarts,
            ..SolverConfig::default()
        };
        config.validate().map_err(|e| Failure::Validation(e.to_string()))?;
        Ok(config)
    }

    fn pool(&self) -> Result<rayon::ThreadPool, Failure> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(jobs) = self.jobs {
            builder = builder.num_threads(jobs);
        }
        builder.build().map_err(|e| Failure::Validation(e.to_string()))
    }
}

fn run_trials(n: usize, common: &CommonArgs, config: &SolverConfig, timing: bool) -> Result<Vec<RunReport>, Failure> {
    let seed = common.seed;
    let pool = common.pool()?;
    Ok(pool.install(|| {
        (0..common.trials)
            .into_par_iter()
            .map(|trial| {
                let start = Instant::now();
                let mut rng = trial_rng(seed, trial);
                let planted = InvolutionLabel::random(n, &mut rng);
                let oracle = HiddenOracle::plant(planted.clone());
                let result = solve_hidden_involution(&oracle, config, &mut rng).expect("config validated");
                let wall = timing.then(|| start.elapsed().as_secs_f64() * 1e3);
                RunReport::new(trial, seed, planted, result, wall)
            })
            .collect()
    }))
}

fn cmd_plant(n: usize, seed: u64) -> CmdResult {
    check_n(n)?;
    let label = InvolutionLabel::random(n, &mut trial_rng(seed, 0));
    let mut w = open_output(&OutArgs { out: None })?;
    write_line(&mut w, &label)?;
    w.flush()?;
    Ok(0)
}

fn cmd_run(args: &RunArgs) -> CmdResult {
    check_n(args.n)?;
    let config = args.common.solver_config()?;
    let mut w = open_output(&args.common.out)?;
    let reports = run_trials(args.n, &args.common, &config, args.timing)?;
    for r in &reports {
        write_line(&mut w, r)?;
    }
    let summary = RunSummary::from_reports(args.n, args.common.seed, &reports);
    write_line(&mut w, &summary)?;
    w.flush()?;
    Ok(if summary.successes == summary.trials { 0 } else { EXIT_ALGORITHM })
}

fn cmd_verify_reps(out: &OutArgs) -> CmdResult {
    let report = IdentityReport::run();
    let mut w = open_output(out)?;
    write_line(&mut w, &report)?;
    w.flush()?;
    Ok(if report.passed { 0 } else { EXIT_IDENTITIES })
}

fn cmd_cross_check(n: usize, cases: usize, seed: u64, out: &OutArgs) -> CmdResult {
    let labels = match n {
        1 => InvolutionLabel::enumerate(1),
        2 => {
            if cases == 0 {
                return Err(Failure::Validation("--cases must be at least 1".into()));
            }
            let mut rng = trial_rng(seed, 0);
            (0..cases).map(|_| InvolutionLabel::random(2, &mut rng)).collect()
        }
        _ => return Err(Failure::Validation(format!("cross-check needs n in {{1, 2}}, got {n}"))),
    };
    let report = cross_check(n, &labels).map_err(|e| Failure::Validation(e.to_string()))?;
    let mut w = open_output(out)?;
    write_line(&mut w, &report)?;
    w.flush()?;
    Ok(if report.passed { 0 } else { EXIT_CROSS_CHECK })
}

fn cmd_bench(ns: &[usize], common: &CommonArgs) -> CmdResult {
    if ns.is_empty() {
        return Err(Failure::Validation("--ns must list at least one size".into()));
    }
    for &n in ns {
        check_n(n)?;
    }
    let config = common.solver_config()?;
    let mut w = open_output(&common.out)?;
    let mut points = Vec::new();
    let mut all_ok = true;
    for &n in ns {
        let reports = run_trials(n, common, &config, false)?;
        let s = RunSummary::from_reports(n, common.seed, &reports);
        all_ok &= s.successes == s.trials;
        points.push(BenchPoint {
            kind: "bench",
            n,
            trials: s.trials,
            success_rate: s.success_rate,
            mean_queries: s.mean_queries,
        });
    }
    for p in &points {
        write_line(&mut w, p)?;
    }
    if points.len() >= 2 {
        write_line(&mut w, &BenchFit::fit(&points))?;
    }
    w.flush()?;
    Ok(if all_ok { 0 } else { EXIT_ALGORITHM })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Plant { n, seed } => cmd_plant(*n, *seed),
        Command::Run(args) => cmd_run(args),
        Command::VerifyReps { out } => cmd_verify_reps(out),
        Command::CrossCheck { n, cases, seed, out } => cmd_cross_check(*n, *cases, *seed, out),
        Command::Bench { ns, common } => cmd_bench(ns, common),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}
