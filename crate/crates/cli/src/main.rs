use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pareto_tas::learner::LearnerConfig;
use pareto_tas_cli::bench::{grid, parse_pd_grid};
use pareto_tas_cli::output::{create, write_json};
use pareto_tas_cli::simulate::write_records_csv;
use pareto_tas_cli::{
    cmd_bench, cmd_simulate, cmd_solve, cmd_verify, worker_count, BenchConfig, CliError, InstanceSource,
    SimulateConfig,
};

#[derive(Parser)]
#[command(name = "pareto-tas", version, about = "Pareto front identification in multi-objective Gaussian bandits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the characteristic time T* and optimal weights.
    Solve {
        /// Embedded name, gen:<geometry>:<size>:<d>[:<seed>], or JSON file.
        #[arg(long, default_value = "covid")]
        instance: InstanceSource,
        #[arg(long, default_value_t = 2_000_000)]
        iterations: usize,
        /// Relative gap between certified bounds at which to stop.
        #[arg(long, default_value_t = 1e-3)]
        tolerance: f64,
        /// Directory receiving solve.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the learner repeatedly on simulated rewards.
    Simulate {
        #[arg(long, default_value = "covid")]
        instance: InstanceSource,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 200)]
        runs: usize,
        /// Master seed; run i uses seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        gradient_period: u64,
        #[arg(long, default_value_t = 25)]
        stopping_period: u64,
        #[arg(long, default_value_t = 10_000_000)]
        max_steps: u64,
        /// Overridden by PARETO_TAS_THREADS.
        #[arg(long)]
        workers: Option<usize>,
        /// Hedge iterations for the T* reference line; 0 skips it.
        #[arg(long, default_value_t = 200_000)]
        t_star_iterations: usize,
        /// Directory receiving simulate.csv and simulate_summary.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the oracle on random sphere point clouds with K = p + 1.
    Bench {
        /// "p1,d1;p2,d2;…"; defaults to p ∈ {4,8,16,32} × d ∈ {2,3}.
        #[arg(long)]
        pd_grid: Option<String>,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        /// Minimum timing window per instance, in milliseconds.
        #[arg(long, default_value_t = 20.0)]
        min_time_ms: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory receiving bench.csv, bench_ratio.csv and bench_summary.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the fast paths against brute-force oracles on random cases.
    Verify {
        /// Random cases per sweep.
        #[arg(long, default_value_t = 500)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Inject a sign flip in the removal cost (debug builds only).
        #[cfg(debug_assertions)]
        #[arg(long, hide = true)]
        mutate: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Solve { instance, iterations, tolerance, out } => {
            let report = cmd_solve(&instance.load()?, iterations, tolerance)?;
            print!("{}", report.render());
            if let Some(dir) = out {
                write_json(&dir.join("solve.json"), &report)?;
            }
            Ok(if report.converged { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Simulate {
            instance,
            delta,
            runs,
            seed,
            gradient_period,
            stopping_period,
            max_steps,
            workers,
            t_star_iterations,
            out,
        } => {
            let inst = instance.load()?;
            let cfg = SimulateConfig {
                learner: LearnerConfig { delta, gradient_period, stopping_period, max_steps, seed },
                runs,
                workers: worker_count(workers)?,
                t_star_iterations,
            };
            let sim = cmd_simulate(&inst, &cfg)?;
            let s = &sim.summary;
            println!(
                "{} runs: mean tau {:.1} (sd {:.1}, median {:.0}), errors {}/{} ({:.3}), aborted {}",
                s.runs, s.mean_tau, s.std_tau, s.quantiles.q50, s.errors, s.runs, s.error_rate, s.aborted
            );
            if let (Some(t), Some(lb)) = (s.t_star, s.lower_bound_tau) {
                println!("T* = {t:.2}, ln(1/delta) T* = {lb:.1}");
            }
            if let Some(dir) = out {
                let path = dir.join("simulate.csv");
                write_records_csv(&sim.records, inst.num_arms(), create(&path)?)?;
                write_json(&dir.join("simulate_summary.json"), &sim.summary)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { pd_grid, samples, min_time_ms, seed, out } => {
            let grid = match pd_grid {
                Some(s) => parse_pd_grid(&s)?,
                None => grid(&[4, 8, 16, 32], &[2, 3]),
            };
            let report = cmd_bench(&BenchConfig { grid, samples, min_seconds: min_time_ms / 1e3, seed })?;
            println!("{:>4} {:>2} {:>8} {:>12} {:>12}", "p", "d", "strategy", "mean (s)", "std (s)");
            for r in &report.rows {
                println!("{:>4} {:>2} {:>8} {:>12.3e} {:>12.3e}", r.p, r.d, r.strategy, r.mean_seconds, r.std_seconds);
            }
            for r in &report.ratios {
                println!("p={:<4} generic / fast-2d = {:.2}", r.p, r.ratio);
            }
            for (d, s) in &report.slopes {
                println!("d={d}: log-log slope {s:.2}");
            }
            if let Some(dir) = out {
                report.write_csv(create(&dir.join("bench.csv"))?)?;
                report.write_ratio_csv(create(&dir.join("bench_ratio.csv"))?)?;
                write_json(&dir.join("bench_summary.json"), &report)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        #[cfg(debug_assertions)]
        Command::Verify { budget, seed, mutate } => {
            if mutate {
                pareto_tas::remove::fault::flip_removal_sign(true);
            }
            Ok(verify(budget, seed))
        }
        #[cfg(not(debug_assertions))]
        Command::Verify { budget, seed } => Ok(verify(budget, seed)),
    }
}

fn verify(budget: usize, seed: u64) -> ExitCode {
    let report = cmd_verify(budget, seed);
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for c in &report.checks {
        println!("{c}");
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
