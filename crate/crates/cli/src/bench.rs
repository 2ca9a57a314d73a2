//! Oracle-only timings on sphere point clouds with `K = p + 1`.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use pareto_tas::datasets::{generate, random_simplex, Geometry};
use pareto_tas::model::rescale_to_unit_variance;
use pareto_tas::oracle::min_alt_cost_unit;
use pareto_tas::Strategy;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::output::csv_writer;
use crate::{CliError, Result};

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub grid: Vec<(usize, usize)>,
    /// Fresh instances per `(p, d)`.
    pub samples: usize,
    /// Each instance is solved repeatedly for at least this long.
    pub min_seconds: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub p: usize,
    pub d: usize,
    pub k: usize,
    /// `generic`, or `fast-2d` for the two-objective paths.
    pub strategy: &'static str,
    pub mean_seconds: f64,
    pub std_seconds: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioRow {
    pub p: usize,
    pub fast_seconds: f64,
    pub generic_seconds: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub ratios: Vec<RatioRow>,
    /// Least-squares slope of log time against log p for the generic
    /// strategy, per `d` with at least two distinct `p`.
    pub slopes: BTreeMap<usize, f64>,
}

/// `"p1,d1;p2,d2;…"`.
pub fn parse_pd_grid(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(';')
        .filter(|x| !x.trim().is_empty())
        .map(|pair| {
            let bad = || CliError::Usage(format!("bad (p,d) pair {pair:?}"));
            let (p, d) = pair.split_once(',').ok_or_else(bad)?;
            let p = p.trim().parse().map_err(|_| bad())?;
            let d: usize = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok((p, d))
        })
        .collect()
}

/// Cross product of `ps` and `ds`.
pub fn grid(ps: &[usize], ds: &[usize]) -> Vec<(usize, usize)> {
    ds.iter().flat_map(|&d| ps.iter().map(move |&p| (p, d))).collect()
}

pub fn cmd_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    for &(p, d) in &cfg.grid {
        let strategies: &[(Strategy, &'static str)] = if d == 2 {
            &[(Strategy::Auto, "fast-2d"), (Strategy::Generic, "generic")]
        } else {
            &[(Strategy::Generic, "generic")]
        };
        let mut times = vec![Vec::with_capacity(cfg.samples); strategies.len()];
        for _ in 0..cfg.samples {
            let inst = generate(Geometry::SphereQuadrantPlusOrigin, p, d, &mut rng)?;
            let (mu, _) = rescale_to_unit_variance(&inst);
            let w = random_simplex(mu.rows(), &mut rng);
            for (slot, &(strategy, _)) in times.iter_mut().zip(strategies) {
                slot.push(time_per_call(cfg.min_seconds, || {
                    min_alt_cost_unit(&mu, &w, strategy).map(|r| r.cost)
                })?);
            }
        }
        for (ts, &(_, name)) in times.iter().zip(strategies) {
            let (mean, std) = mean_std(ts);
            rows.push(BenchRow { p, d, k: p + 1, strategy: name, mean_seconds: mean, std_seconds: std, samples: ts.len() });
        }
        if d == 2 && cfg.samples > 0 {
            let (fast, generic) = (mean_std(&times[0]).0, mean_std(&times[1]).0);
            ratios.push(RatioRow { p, fast_seconds: fast, generic_seconds: generic, ratio: generic / fast });
        }
    }
    let mut slopes = BTreeMap::new();
    let mut by_d: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.strategy == "generic" && r.p > 0 && r.mean_seconds > 0.0) {
        by_d.entry(r.d).or_default().push(((r.p as f64).ln(), r.mean_seconds.ln()));
    }
    for (d, pts) in by_d {
        if let Some(s) = loglog_slope(&pts) {
            slopes.insert(d, s);
        }
    }
    Ok(BenchReport { rows, ratios, slopes })
}

/// Mean wall time of `f` over enough calls to fill `min_seconds`.
fn time_per_call<F>(min_seconds: f64, mut f: F) -> Result<f64>
where
    F: FnMut() -> pareto_tas::Result<f64>,
{
    // warm-up
    std::hint::black_box(f()?);
    let start = Instant::now();
    let mut calls = 0u64;
    loop {
        std::hint::black_box(f()?);
        calls += 1;
        let elapsed = start.elapsed().as_secs_f64();
        if elapsed >= min_seconds {
            return Ok(elapsed / calls as f64);
        }
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}

/// Least-squares slope through `(x, y)` points; `None` if all `x` coincide.
pub fn loglog_slope(pts: &[(f64, f64)]) -> Option<f64> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

impl BenchReport {
    /// `p,d,k,strategy,mean_seconds,std_seconds,samples`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// `p,fast_seconds,generic_seconds,ratio`.
    pub fn write_ratio_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        if self.ratios.is_empty() {
            w.write_record(["p", "fast_seconds", "generic_seconds", "ratio"])?;
        }
        for r in &self.ratios {
            w.serialize(r)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}
