//! Minimal transportation cost to a model with a different Pareto set.
//!
//! The alternative set is covered by two families of pieces: a Pareto arm
//! falling under another one ([`crate::remove`]), or a dominated arm escaping
//! every Pareto arm ([`crate::add`]). The oracle returns the cheapest piece,
//! its minimizer and the per-arm divergences at that minimizer, which form a
//! supergradient of the (concave) value in the weights.

use crate::add::{best_addition, best_addition_2d};
use crate::cells::PhiMap;
use crate::error::{Error, Result};
use crate::model::{pareto_set, rescale_to_unit_variance, sq_dist, BanditInstance, Matrix};
use crate::remove::{best_removal, best_removal_2d};

/// Which algorithm handles two-objective instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Two-objective fast paths when `d = 2`.
    #[default]
    Auto,
    /// Pair scan and cell tree for every `d`.
    Generic,
}

/// The covering piece achieving the minimum.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// Pareto arm `k0` ends weakly dominated by Pareto arm `k1`.
    Remove { k0: usize, k1: usize },
    /// Dominated arm `k0` escapes; `phi` gives the yielding objective of each Pareto arm.
    Add { k0: usize, phi: PhiMap },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportResult {
    pub cost: f64,
    /// Closest alternative model, in the coordinates of the input means.
    pub lambda: Matrix,
    pub witness: Witness,
    /// `½‖μ_k − λ_k‖²` per arm in unit-variance coordinates; `Σ w_k g_k = cost`.
    pub gradient: Vec<f64>,
}

/// Oracle on means that already have unit variance.
pub fn min_alt_cost_unit(mu: &Matrix, w: &[f64], strategy: Strategy) -> Result<TransportResult> {
    if mu.rows() < 2 {
        return Err(Error::AltEmpty);
    }
    if w.len() != mu.rows() {
        return Err(Error::Shape(format!("{} weights for {} arms", w.len(), mu.rows())));
    }
    let pareto = pareto_set(mu);
    let fast = strategy == Strategy::Auto && mu.cols() == 2;

    let removal = if fast { best_removal_2d(mu, w, &pareto) } else { best_removal(mu, w, &pareto) };
    let addition = if fast { best_addition_2d(mu, w, &pareto) } else { best_addition(mu, w, &pareto) };

    let (cost, lambda, witness) = match (removal, addition) {
        (Some(r), Some(a)) if a.cost < r.cost => (a.cost, a.lambda_full, Witness::Add { k0: a.k0, phi: a.phi }),
        (Some(r), _) => (r.cost, r.lambda(mu), Witness::Remove { k0: r.k0, k1: r.k1 }),
        (None, Some(a)) => (a.cost, a.lambda_full, Witness::Add { k0: a.k0, phi: a.phi }),
        (None, None) => unreachable!("K >= 2 always leaves a covering piece"),
    };
    let gradient = (0..mu.rows()).map(|k| 0.5 * sq_dist(mu.row(k), lambda.row(k))).collect();
    Ok(TransportResult { cost, lambda, witness, gradient })
}

/// `inf_{λ ∈ Alt(μ)} Σ_k w_k KL(μ_k, λ_k)` for Gaussian arms with known
/// per-objective variances. The minimizer is reported in original units.
pub fn min_alt_cost(instance: &BanditInstance, w: &[f64]) -> Result<TransportResult> {
    min_alt_cost_with(instance, w, Strategy::Auto)
}

pub fn min_alt_cost_with(instance: &BanditInstance, w: &[f64], strategy: Strategy) -> Result<TransportResult> {
    let (mu, scaling) = rescale_to_unit_variance(instance);
    let mut res = min_alt_cost_unit(&mu, w, strategy)?;
    res.lambda = scaling.to_original(&res.lambda);
    Ok(res)
}

/// Finite-difference step of [`supergradient_check`].
pub const FD_STEP: f64 = 1e-5;

/// `(⟨gradient, direction⟩, central difference of the value along direction)`.
/// Requires `w ± FD_STEP·direction` to stay nonnegative.
pub fn supergradient_check(instance: &BanditInstance, w: &[f64], direction: &[f64]) -> Result<(f64, f64)> {
    assert_eq!(w.len(), direction.len());
    let res = min_alt_cost(instance, w)?;
    let analytic = res.gradient.iter().zip(direction).map(|(g, d)| g * d).sum();
    let shifted = |sign: f64| -> Result<f64> {
        let ws: Vec<f64> = w.iter().zip(direction).map(|(a, d)| a + sign * FD_STEP * d).collect();
        assert!(ws.iter().all(|x| *x >= 0.0), "finite-difference step leaves the orthant");
        Ok(min_alt_cost(instance, &ws)?.cost)
    };
    let numeric = (shifted(1.0)? - shifted(-1.0)?) / (2.0 * FD_STEP);
    Ok((analytic, numeric))
}
