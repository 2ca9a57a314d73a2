use std::io::Write;
use std::time::Instant;

use pareto_tas::learner::{run, solve_t_star, LearnerConfig, RunRecord};
use pareto_tas::BanditInstance;
use rayon::prelude::*;
use serde::Serialize;

use crate::output::csv_writer;
use crate::Result;

#[derive(Debug, Clone)]
pub struct SimulateConfig {
    /// `seed` is the master seed: run `i` uses `seed + i`.
    pub learner: LearnerConfig,
    pub runs: usize,
    pub workers: Option<usize>,
    /// Hedge iterations spent on `T*` for the summary; 0 skips it.
    pub t_star_iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Quantiles {
    pub q05: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q95: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub runs: usize,
    pub delta: f64,
    pub master_seed: u64,
    pub gradient_period: u64,
    pub stopping_period: u64,
    pub mean_tau: f64,
    pub std_tau: f64,
    pub min_tau: u64,
    pub max_tau: u64,
    pub quantiles: Quantiles,
    pub errors: usize,
    pub error_rate: f64,
    pub aborted: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_star: Option<f64>,
    /// `ln(1/δ) · T*`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound_tau: Option<f64>,
    pub wall_time: f64,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub records: Vec<RunRecord>,
    pub summary: Summary,
}

pub fn cmd_simulate(instance: &BanditInstance, cfg: &SimulateConfig) -> Result<Simulation> {
    if cfg.runs == 0 {
        return Err(crate::CliError::Usage("need at least one run".into()));
    }
    cfg.learner.validate()?;
    let start = Instant::now();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.workers {
        pool = pool.num_threads(n);
    }
    let records = pool.build()?.install(|| {
        (0..cfg.runs as u64)
            .into_par_iter()
            .map(|i| run(instance, &LearnerConfig { seed: cfg.learner.seed.wrapping_add(i), ..cfg.learner.clone() }))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let t_star = if cfg.t_star_iterations > 0 {
        Some(solve_t_star(instance, cfg.t_star_iterations, 1e-3)?.t_star)
    } else {
        None
    };
    let summary = summarize(&records, cfg, t_star, start.elapsed().as_secs_f64());
    Ok(Simulation { records, summary })
}

fn summarize(records: &[RunRecord], cfg: &SimulateConfig, t_star: Option<f64>, wall_time: f64) -> Summary {
    let n = records.len() as f64;
    let mut taus: Vec<u64> = records.iter().map(|r| r.tau).collect();
    taus.sort_unstable();
    let mean = taus.iter().map(|&t| t as f64).sum::<f64>() / n;
    let var = taus.iter().map(|&t| (t as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let errors = records.iter().filter(|r| !r.correct).count();
    Summary {
        runs: records.len(),
        delta: cfg.learner.delta,
        master_seed: cfg.learner.seed,
        gradient_period: cfg.learner.gradient_period,
        stopping_period: cfg.learner.stopping_period,
        mean_tau: mean,
        std_tau: var.sqrt(),
        min_tau: taus[0],
        max_tau: taus[taus.len() - 1],
        quantiles: Quantiles {
            q05: quantile(&taus, 0.05),
            q25: quantile(&taus, 0.25),
            q50: quantile(&taus, 0.5),
            q75: quantile(&taus, 0.75),
            q95: quantile(&taus, 0.95),
        },
        errors,
        error_rate: errors as f64 / n,
        aborted: records.iter().filter(|r| r.aborted).count(),
        t_star,
        lower_bound_tau: t_star.map(|t| t * (1.0 / cfg.learner.delta).ln()),
        wall_time,
    }
}

/// Linear interpolation between order statistics.
fn quantile(sorted: &[u64], q: f64) -> f64 {
    let h = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    sorted[lo] as f64 + (h - lo as f64) * (sorted[hi] as f64 - sorted[lo] as f64)
}

/// `seed,tau,correct,aborted,answer,n_0,…,n_{K-1}`; the answer lists the
/// recommended arms separated by `;`. Wall times are left out so that the
/// file only depends on the configuration.
pub fn write_records_csv<W: Write>(records: &[RunRecord], num_arms: usize, out: W) -> Result<()> {
    let mut w = csv_writer(out);
    let mut header: Vec<String> = ["seed", "tau", "correct", "aborted", "answer"].map(String::from).to_vec();
    header.extend((0..num_arms).map(|k| format!("n_{k}")));
    w.write_record(&header)?;
    for r in records {
        let answer: Vec<String> = r.answer.indices().iter().map(usize::to_string).collect();
        let mut row = vec![
            r.seed.to_string(),
            r.tau.to_string(),
            r.correct.to_string(),
            r.aborted.to_string(),
            answer.join(";"),
        ];
        row.extend(r.counts.iter().map(u64::to_string));
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
