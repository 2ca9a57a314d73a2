//! Track-and-Stop learner and the offline characteristic time.
//!
//! Sampling follows cumulative tracking of the averaged iterates of an
//! online Hedge ascent on `w ↦ inf_{λ ∈ Alt(μ̂)} D_w(μ̂, λ)`, with forced
//! exploration. The run stops when the GLR statistic `t · value(μ̂, N/t)`
//! exceeds `ln(ln(1+t)/δ)` and recommends the empirical Pareto set.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{pareto_set, rescale_to_unit_variance, BanditInstance, Matrix, ParetoSet};
use crate::oracle::{min_alt_cost_unit, Strategy, TransportResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub delta: f64,
    /// Samples between two oracle calls refreshing the Hedge gradient.
    pub gradient_period: u64,
    /// Samples between two evaluations of the stopping rule.
    pub stopping_period: u64,
    pub max_steps: u64,
    pub seed: u64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self { delta: 0.1, gradient_period: 10, stopping_period: 25, max_steps: 10_000_000, seed: 0 }
    }
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Domain(format!("delta must lie in (0,1), got {}", self.delta)));
        }
        if self.gradient_period == 0 || self.stopping_period == 0 {
            return Err(Error::Domain("periods must be at least 1".into()));
        }
        Ok(())
    }
}

/// Everything the sampling rule knows after `t` samples.
#[derive(Debug, Clone)]
pub struct LearnerState {
    t: u64,
    counts: Vec<u64>,
    sums: Matrix,
    log_weights: Vec<f64>,
    hedge_weights: Vec<f64>,
    averaged: Vec<f64>,
    grad_norm_acc: f64,
    last_oracle: Option<TransportResult>,
}

impl LearnerState {
    /// No sample yet, uniform Hedge weights.
    pub fn new(num_arms: usize, dim: usize) -> Self {
        let uniform = vec![1.0 / num_arms as f64; num_arms];
        Self {
            t: 0,
            counts: vec![0; num_arms],
            sums: Matrix::zeros(num_arms, dim),
            log_weights: vec![0.0; num_arms],
            hedge_weights: uniform.clone(),
            averaged: uniform,
            grad_norm_acc: 0.0,
            last_oracle: None,
        }
    }

    /// State with the given pull counts, reward sums and averaged iterate;
    /// `t` is the total count and the Hedge weights are uniform.
    pub fn from_parts(counts: Vec<u64>, sums: Matrix, averaged: Vec<f64>) -> Result<Self> {
        let k = counts.len();
        if sums.rows() != k || averaged.len() != k {
            return Err(Error::Shape(format!("{k} counts, {} sum rows, {} weights", sums.rows(), averaged.len())));
        }
        let mut s = Self::new(k, sums.cols());
        s.t = counts.iter().sum();
        s.counts = counts;
        s.sums = sums;
        s.averaged = averaged;
        Ok(s)
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn sums(&self) -> &Matrix {
        &self.sums
    }

    pub fn hedge_weights(&self) -> &[f64] {
        &self.hedge_weights
    }

    /// Running average of the Hedge iterates played so far.
    pub fn averaged_weights(&self) -> &[f64] {
        &self.averaged
    }

    pub fn grad_norm_acc(&self) -> f64 {
        self.grad_norm_acc
    }

    pub fn last_oracle(&self) -> Option<&TransportResult> {
        self.last_oracle.as_ref()
    }

    pub fn all_sampled(&self) -> bool {
        self.counts.iter().all(|&n| n > 0)
    }

    /// Empirical means; rows of unsampled arms are zero.
    pub fn empirical_means(&self) -> Matrix {
        let mut m = self.sums.clone();
        for (k, &n) in self.counts.iter().enumerate() {
            if n > 0 {
                m.row_mut(k).iter_mut().for_each(|x| *x /= n as f64);
            }
        }
        m
    }

    /// Records one reward vector of `arm` played with the current iterate.
    pub fn observe(&mut self, arm: usize, reward: &[f64]) {
        self.t += 1;
        self.counts[arm] += 1;
        for (s, r) in self.sums.row_mut(arm).iter_mut().zip(reward) {
            *s += r;
        }
        let inv = 1.0 / self.t as f64;
        for (a, w) in self.averaged.iter_mut().zip(&self.hedge_weights) {
            *a += (w - *a) * inv;
        }
    }
}

/// Next arm to pull.
///
/// Forced exploration first: among arms with `N_k < max(√t − K/2, 1)` the
/// least sampled one (lowest index on ties). Otherwise the arm lagging most
/// behind the averaged iterate, `argmax_k t·w̄_k − N_k`.
pub fn choose_arm(state: &LearnerState) -> usize {
    let k = state.counts.len();
    let t = state.t as f64;
    let floor = (t.sqrt() - k as f64 / 2.0).max(1.0);
    let starved = (0..k).filter(|&i| (state.counts[i] as f64) < floor).min_by_key(|&i| state.counts[i]);
    if let Some(i) = starved {
        return i;
    }
    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..k {
        let lag = t * state.averaged[i] - state.counts[i] as f64;
        if lag > best.1 {
            best = (i, lag);
        }
    }
    best.0
}

/// One multiplicative-weights step `w_k ∝ w_k exp(η g_k)` with
/// `η = √(ln K / (1 + Σ_s ‖g_s‖∞²))`, the current gradient included.
pub fn hedge_update(state: &mut LearnerState, gradient: &[f64]) {
    let k = state.log_weights.len();
    assert_eq!(gradient.len(), k);
    debug_assert!(gradient.iter().all(|g| g.is_finite() && *g >= 0.0));
    let sup = gradient.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    state.grad_norm_acc += sup * sup;
    let eta = ((k as f64).ln() / (1.0 + state.grad_norm_acc)).sqrt();
    for (l, g) in state.log_weights.iter_mut().zip(gradient) {
        *l += eta * g;
    }
    normalize_log_weights(&mut state.log_weights, &mut state.hedge_weights);
}

/// Shifts `log_w` so its maximum is 0 and writes the normalized weights.
fn normalize_log_weights(log_w: &mut [f64], w: &mut [f64]) {
    let top = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for (l, x) in log_w.iter_mut().zip(w.iter_mut()) {
        *l -= top;
        // keep every weight strictly positive
        *x = l.exp().max(f64::MIN_POSITIVE);
        total += *x;
    }
    w.iter_mut().for_each(|x| *x /= total);
}

/// `ln(ln(1+t)/δ)`.
pub fn threshold(t: u64, delta: f64) -> f64 {
    ((1.0 + t as f64).ln() / delta).ln()
}

/// `(Z, threshold)` where `Z = t · value(μ̂, N/t)`, computed as the value at
/// the raw counts. `std_devs` are the per-objective noise levels.
pub fn stopping_statistic(state: &LearnerState, std_devs: &[f64], delta: f64) -> Result<(f64, f64)> {
    if !state.all_sampled() {
        return Err(Error::NotReady);
    }
    let mu = unit_means(state, std_devs);
    let n: Vec<f64> = state.counts.iter().map(|&c| c as f64).collect();
    let z = min_alt_cost_unit(&mu, &n, Strategy::Auto)?.cost;
    Ok((z, threshold(state.t, delta)))
}

fn unit_means(state: &LearnerState, std_devs: &[f64]) -> Matrix {
    let mut mu = state.empirical_means();
    for k in 0..mu.rows() {
        for (x, s) in mu.row_mut(k).iter_mut().zip(std_devs) {
            *x /= s;
        }
    }
    mu
}

/// Outcome of one simulated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub tau: u64,
    pub answer: ParetoSet,
    pub correct: bool,
    pub counts: Vec<u64>,
    pub wall_time: f64,
    /// `max_steps` was hit before the stopping rule fired.
    pub aborted: bool,
}

/// Runs the learner against Gaussian arms with the instance's means and
/// per-objective variances. Identical configs give identical records up to
/// `wall_time`.
pub fn run(instance: &BanditInstance, config: &LearnerConfig) -> Result<RunRecord> {
    config.validate()?;
    let (k, d) = (instance.num_arms(), instance.dim());
    if k < 2 {
        return Err(Error::AltEmpty);
    }
    let start = Instant::now();
    let std_devs: Vec<f64> = instance.variances().iter().map(|v| v.sqrt()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = LearnerState::new(k, d);
    let mut reward = vec![0.0; d];
    let mut stopped = false;

    while state.t < config.max_steps {
        let arm = choose_arm(&state);
        for ((r, m), s) in reward.iter_mut().zip(instance.means().row(arm)).zip(&std_devs) {
            *r = m + s * rng.sample::<f64, _>(StandardNormal);
        }
        state.observe(arm, &reward);
        if !state.all_sampled() {
            continue;
        }
        if state.last_oracle.is_none() || state.t.is_multiple_of(config.gradient_period) {
            let mu = unit_means(&state, &std_devs);
            state.last_oracle = Some(min_alt_cost_unit(&mu, &state.hedge_weights, Strategy::Auto)?);
        }
        // one ascent step per sample, on the most recent gradient
        let gradient = state.last_oracle.as_ref().expect("set above").gradient.clone();
        hedge_update(&mut state, &gradient);
        if state.t.is_multiple_of(config.stopping_period) {
            let (z, beta) = stopping_statistic(&state, &std_devs, config.delta)?;
            if z > beta {
                stopped = true;
                break;
            }
        }
    }

    let answer = pareto_set(&state.empirical_means());
    Ok(RunRecord {
        seed: config.seed,
        tau: state.t,
        correct: answer == instance.pareto_set(),
        answer,
        counts: state.counts,
        wall_time: start.elapsed().as_secs_f64(),
        aborted: !stopped,
    })
}

/// Offline solution of `sup_w inf_λ D_w(μ, λ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TStarSolution {
    /// `1 / lower`.
    pub t_star: f64,
    pub weights: Vec<f64>,
    /// Value at `weights`.
    pub lower: f64,
    /// Certified upper bound on the optimal value.
    pub upper: f64,
    pub iterations: usize,
    /// `upper − lower ≤ tolerance · lower` was reached.
    pub converged: bool,
}

/// Iterations between two evaluations of the averaged iterate.
const CHECK_EVERY: usize = 256;

/// Adaptive Hedge ascent on the true means.
///
/// The value is concave, positively homogeneous and equals `⟨g_w, w⟩` for
/// the oracle gradient `g_w`, so `value(w') ≤ ⟨g_w, w'⟩` everywhere. Hence
/// the largest coordinate of any average of gradients bounds the optimum
/// from above, while the value at the averaged iterate bounds it from below;
/// Hedge's regret guarantee drives the two together.
pub fn solve_t_star(instance: &BanditInstance, iterations: usize, tolerance: f64) -> Result<TStarSolution> {
    let k = instance.num_arms();
    if k < 2 {
        return Err(Error::AltEmpty);
    }
    let (mu, _) = rescale_to_unit_variance(instance);
    let value = |w: &[f64]| min_alt_cost_unit(&mu, w, Strategy::Auto);

    let mut log_w = vec![0.0; k];
    let mut w = vec![1.0 / k as f64; k];
    let mut w_sum = vec![0.0; k];
    let mut g_sum = vec![0.0; k];
    let mut acc = 0.0;
    let ln_k = (k as f64).ln();

    let mut best = value(&w)?;
    let mut best_w = w.clone();
    let mut upper = f64::INFINITY;
    let mut done = 0;
    let mut converged = false;

    for it in 1..=iterations {
        let res = value(&w)?;
        upper = upper.min(res.gradient.iter().copied().fold(0.0, f64::max));
        if res.cost > best.cost {
            best_w.clone_from(&w);
            best = res.clone();
        }
        for i in 0..k {
            w_sum[i] += w[i];
            g_sum[i] += res.gradient[i];
        }
        let sup = res.gradient.iter().copied().fold(0.0, f64::max);
        acc += sup * sup;
        let eta = (ln_k / (1.0 + acc)).sqrt();
        for (l, g) in log_w.iter_mut().zip(&res.gradient) {
            *l += eta * g;
        }
        normalize_log_weights(&mut log_w, &mut w);
        done = it;

        if it % CHECK_EVERY == 0 || it == iterations {
            let n = it as f64;
            upper = upper.min(g_sum.iter().fold(0.0f64, |m, g| m.max(g / n)));
            let avg: Vec<f64> = w_sum.iter().map(|x| x / n).collect();
            let at_avg = value(&avg)?;
            if at_avg.cost > best.cost {
                best = at_avg;
                best_w = avg;
            }
            if upper - best.cost <= tolerance * best.cost {
                converged = true;
                break;
            }
        }
    }

    Ok(TStarSolution {
        t_star: 1.0 / best.cost,
        weights: best_w,
        lower: best.cost,
        upper,
        iterations: done,
        converged,
    })
}
