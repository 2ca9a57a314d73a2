//! Slow, independent implementations used as test oracles.
//!
//! Nothing here shares code with the fast paths: maps are enumerated
//! exhaustively, scalar problems are solved by trying every interval, and
//! feasibility is decided with plain Bellman-Ford.

use crate::error::{Error, Result};
use crate::model::{Matrix, ParetoSet};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub cost: f64,
    /// Location of the minimizer (meaning depends on `method`).
    pub argmin: Vec<f64>,
    pub method: &'static str,
}

/// Maximum number of direction maps [`exhaustive_add`] accepts.
pub const MAP_BUDGET: u64 = 1_000_000;
/// Maximum number of lattice points [`grid_minimize_g`] accepts.
pub const GRID_BUDGET: u64 = 100_000_000;

/// Minimizes `w₀/2 (a − x)² + Σ w_i/2 (x_i − x)₊²` by solving the quadratic
/// of every interval between sorted points and keeping the best.
pub fn brute_force_h(points: &[(f64, f64)], anchor: f64, anchor_weight: f64) -> (f64, f64) {
    let eval = |x: f64| {
        0.5 * anchor_weight * (anchor - x).powi(2)
            + points.iter().map(|&(p, w)| 0.5 * w * (p - x).max(0.0).powi(2)).sum::<f64>()
    };
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    let mut best = (anchor, eval(anchor));
    let mut candidates = xs.clone();
    for k in 0..=xs.len() {
        let lo = if k == 0 { f64::NEG_INFINITY } else { xs[k - 1] };
        let hi = xs.get(k).copied().unwrap_or(f64::INFINITY);
        let (mut num, mut den) = (anchor_weight * anchor, anchor_weight);
        for &(p, w) in points {
            if p >= hi {
                num += w * p;
                den += w;
            }
        }
        if den > 0.0 {
            candidates.push((num / den).clamp(lo, hi));
        }
    }
    for x in candidates {
        if x.is_finite() {
            let v = eval(x);
            if v < best.1 {
                best = (x, v);
            }
        }
    }
    best
}

/// Minimum of `g_{k0,φ}` over every map `φ ∈ [d]^p` (valid or not) and
/// every dominated arm.
pub fn exhaustive_add(mu: &Matrix, w: &[f64], pareto: &ParetoSet) -> Result<OracleReport> {
    let (d, p) = (mu.cols(), pareto.len());
    let maps = (d as u64)
        .checked_pow(p as u32)
        .filter(|&n| n <= MAP_BUDGET)
        .ok_or_else(|| Error::Budget(format!("{d}^{p} direction maps")))?;
    let others = pareto.complement(mu.rows());
    if others.is_empty() {
        return Err(Error::Domain("every arm is Pareto optimal".into()));
    }
    let mut best = OracleReport { cost: f64::INFINITY, argmin: vec![], method: "exhaustive-add" };
    let mut phi = vec![0usize; p];
    for code in 0..maps {
        let mut c = code;
        for slot in phi.iter_mut() {
            *slot = (c % d as u64) as usize;
            c /= d as u64;
        }
        for &k0 in &others {
            let mut cost = 0.0;
            let mut at = Vec::with_capacity(d);
            for j in 0..d {
                let group: Vec<(f64, f64)> = pareto
                    .indices()
                    .iter()
                    .zip(&phi)
                    .filter(|(_, &pj)| pj == j)
                    .map(|(&k, _)| (mu.get(k, j), w[k]))
                    .collect();
                let (x, v) = brute_force_h(&group, mu.get(k0, j), w[k0]);
                cost += v;
                at.push(x);
            }
            if cost < best.cost {
                best.cost = cost;
                best.argmin = at;
            }
        }
    }
    Ok(best)
}

/// Cheapest ordered Pareto pair, straight from the closed form.
pub fn exhaustive_remove(mu: &Matrix, w: &[f64], pareto: &ParetoSet) -> Option<OracleReport> {
    let mut best: Option<OracleReport> = None;
    for &a in pareto.indices() {
        for &b in pareto.indices() {
            if a == b {
                continue;
            }
            let gap: f64 = mu.row(a).iter().zip(mu.row(b)).map(|(x, y)| (x - y).max(0.0).powi(2)).sum();
            let harmonic = if w[a] + w[b] > 0.0 { w[a] * w[b] / (w[a] + w[b]) } else { 0.0 };
            let cost = 0.5 * harmonic * gap;
            if best.as_ref().is_none_or(|r| cost < r.cost) {
                best = Some(OracleReport { cost, argmin: vec![a as f64, b as f64], method: "exhaustive-remove" });
            }
        }
    }
    best
}

/// Reference value of the full oracle on unit-variance means.
pub fn exhaustive_min_alt(mu: &Matrix, w: &[f64]) -> Result<f64> {
    let pareto = crate::model::pareto_set(mu);
    let rm = exhaustive_remove(mu, w, &pareto).map_or(f64::INFINITY, |r| r.cost);
    let add = if pareto.len() < mu.rows() { exhaustive_add(mu, w, &pareto)?.cost } else { f64::INFINITY };
    let v = rm.min(add);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::AltEmpty)
    }
}

/// Edge `from → to` of length `weight`, encoding `λ^to − λ^from ≤ weight`.
pub type Edge = (usize, usize, f64);

/// Relaxation slack below which Bellman-Ford ignores an improvement.
const RELAX_TOL: f64 = 1e-12;

/// True iff the difference constraints on `n` variables have a solution.
pub fn bellman_ford_feasible(n: usize, edges: &[Edge]) -> bool {
    // virtual source at distance 0 from everyone
    let mut dist = vec![0.0f64; n];
    for _ in 0..n {
        let mut changed = false;
        for &(a, b, w) in edges {
            if dist[a] + w < dist[b] - RELAX_TOL {
                dist[b] = dist[a] + w;
                changed = true;
            }
        }
        if !changed {
            return true;
        }
    }
    !edges.iter().any(|&(a, b, w)| dist[a] + w < dist[b] - RELAX_TOL)
}

/// All-pairs shortest paths by Bellman-Ford from every node; `None` on a
/// negative cycle. Entry `[x][y]` is `None` when `y` is unreachable from `x`.
pub fn bellman_ford_all_pairs(n: usize, edges: &[Edge]) -> Option<Vec<Vec<Option<f64>>>> {
    if !bellman_ford_feasible(n, edges) {
        return None;
    }
    let rows = (0..n)
        .map(|src| {
            let mut dist: Vec<Option<f64>> = vec![None; n];
            dist[src] = Some(0.0);
            for _ in 0..n {
                for &(a, b, w) in edges {
                    if let Some(da) = dist[a] {
                        if dist[b].is_none_or(|db| da + w < db) {
                            dist[b] = Some(da + w);
                        }
                    }
                }
            }
            dist
        })
        .collect();
    Some(rows)
}

/// Edges contributed by a Pareto arm with means `row` yielding along `j`.
pub fn constraint_edges(row: &[f64], j: usize) -> impl Iterator<Item = Edge> + '_ {
    (0..row.len()).filter(move |&x| x != j).map(move |x| (j, x, row[x] - row[j]))
}

/// `g_{k0}(λ₀)` straight from its `min_j` definition.
pub fn escape_cost_direct(mu: &Matrix, w: &[f64], pareto: &ParetoSet, k0: usize, lambda0: &[f64]) -> f64 {
    let own: f64 = mu.row(k0).iter().zip(lambda0).map(|(a, b)| (a - b).powi(2)).sum();
    let others: f64 = pareto
        .indices()
        .iter()
        .map(|&k| {
            let m = mu.row(k).iter().zip(lambda0).map(|(a, b)| a - b).fold(f64::INFINITY, f64::min);
            0.5 * w[k] * m.max(0.0).powi(2)
        })
        .sum();
    0.5 * w[k0] * own + others
}

/// Lattice search of `g_{k0}` over the box `[lo, hi]^d`.
pub fn grid_minimize_g(
    mu: &Matrix,
    w: &[f64],
    pareto: &ParetoSet,
    k0: usize,
    bounds: (f64, f64),
    step: f64,
) -> Result<OracleReport> {
    let d = mu.cols();
    let per_axis = ((bounds.1 - bounds.0) / step).floor() as u64 + 1;
    let total = per_axis
        .checked_pow(d as u32)
        .filter(|&n| n <= GRID_BUDGET)
        .ok_or_else(|| Error::Budget(format!("{per_axis}^{d} grid points")))?;
    let mut point = vec![0.0; d];
    let mut best = OracleReport { cost: f64::INFINITY, argmin: vec![], method: "grid" };
    for code in 0..total {
        let mut c = code;
        for x in point.iter_mut() {
            *x = bounds.0 + (c % per_axis) as f64 * step;
            c /= per_axis;
        }
        let v = escape_cost_direct(mu, w, pareto, k0, &point);
        if v < best.cost {
            best.cost = v;
            best.argmin.clone_from(&point);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::pareto_set;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn bellman_ford_examples() {
        // λ²−λ¹ ≤ 1 and λ¹−λ² ≤ −1: zero cycle
        assert!(bellman_ford_feasible(2, &[(0, 1, 1.0), (1, 0, -1.0)]));
        assert!(!bellman_ford_feasible(2, &[(0, 1, -1.0), (1, 0, -1.0)]));
        assert!(bellman_ford_feasible(3, &[]));
    }

    #[test]
    fn exhaustive_examples() {
        let mu = m(&[&[1.0, 2.0], &[2.0, 1.0], &[0.0, 0.0]]);
        let ps = pareto_set(&mu);
        let r = exhaustive_add(&mu, &[1.0; 3], &ps).unwrap();
        assert!((r.cost - 0.5).abs() < 1e-15);

        let line = m(&[&[0.0], &[1.0]]);
        let r = exhaustive_add(&line, &[1.0, 1.0], &pareto_set(&line)).unwrap();
        assert!((r.cost - 0.25).abs() < 1e-15);

        // no Pareto arm to displace
        let r = exhaustive_add(&line, &[1.0, 1.0], &ParetoSet::from_indices(vec![])).unwrap();
        assert_eq!(r.cost, 0.0);
    }

    #[test]
    fn budgets_are_enforced() {
        let mu = Matrix::zeros(14, 4);
        let ps = ParetoSet::from_indices((0..12).collect());
        assert!(matches!(exhaustive_add(&mu, &[1.0; 14], &ps), Err(Error::Budget(_))));
        let mu = m(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let ps = pareto_set(&mu);
        assert!(matches!(grid_minimize_g(&mu, &[1.0; 2], &ps, 1, (0.0, 1.0), 1e-5), Err(Error::Budget(_))));
    }

    #[test]
    fn grid_examples() {
        let mu = m(&[&[1.0, 2.0], &[2.0, 1.0], &[0.0, 0.0]]);
        let ps = pareto_set(&mu);
        let r = grid_minimize_g(&mu, &[1.0; 3], &ps, 2, (-1.0, 3.0), 1e-3).unwrap();
        assert!((r.cost - 0.5).abs() < 1e-2);

        // already undominated: nothing to pay at λ₀ = μ₀
        let mu = m(&[&[1.0, 2.0], &[2.0, 1.0], &[0.0, 3.0]]);
        let ps = ParetoSet::from_indices(vec![0, 1]);
        let r = grid_minimize_g(&mu, &[1.0; 3], &ps, 2, (-1.0, 3.0), 0.5).unwrap();
        assert_eq!(r.cost, 0.0);

        // a weightless arm can be sent far away for free
        let mu = m(&[&[1.0, 2.0], &[0.0, 0.0]]);
        let ps = pareto_set(&mu);
        let small = grid_minimize_g(&mu, &[1.0, 0.0], &ps, 1, (-1.0, 1.5), 0.25).unwrap();
        let large = grid_minimize_g(&mu, &[1.0, 0.0], &ps, 1, (-1.0, 3.0), 0.25).unwrap();
        assert!(large.cost <= small.cost && large.cost == 0.0);
    }
}
