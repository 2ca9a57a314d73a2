//! Cheapest way to let a dominated arm escape every Pareto arm.
//!
//! For a dominated arm `k0` sent to `λ₀`, each Pareto arm still dominating
//! `λ₀` steps down along its cheapest objective:
//!
//! ```text
//!   g(λ₀) = w₀/2 ‖μ₀ − λ₀‖² + Σ_{k Pareto} w_k/2 · min_j (μ_k^j − λ₀^j)₊²
//! ```
//!
//! Fixing the yielding objective of every Pareto arm (a direction map `φ`)
//! makes the objective separable, one convex scalar problem per objective.
//! The minimum of `g` is the smallest of these per-map minima over the maps
//! with a non-empty cell, see [`crate::cells`].

use std::f64::consts::FRAC_1_SQRT_2;

use crate::cells::{for_each_cell, PhiMap};
use crate::model::{Matrix, ParetoSet};

/// Arm `k0` moved to `lambda0`, Pareto arms yielding along `phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct AddCandidate {
    pub k0: usize,
    pub cost: f64,
    pub lambda0: Vec<f64>,
    /// Indexed by position in the Pareto set.
    pub phi: PhiMap,
    pub lambda_full: Matrix,
}

/// Pareto means of every objective sorted ascending, tagged with their
/// position in the Pareto set.
#[derive(Debug, Clone)]
pub struct SortedColumns {
    columns: Vec<Vec<(f64, usize)>>,
}

impl SortedColumns {
    pub fn new(pareto_means: &Matrix) -> Self {
        let columns = (0..pareto_means.cols())
            .map(|j| {
                let mut col: Vec<(f64, usize)> =
                    (0..pareto_means.rows()).map(|i| (pareto_means.get(i, j), i)).collect();
                col.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                col
            })
            .collect();
        Self { columns }
    }

    pub fn column(&self, j: usize) -> &[(f64, usize)] {
        &self.columns[j]
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }
}

/// Minimizes `h(λ) = w₀/2 (μ₀ − λ)² + Σ_i w_i/2 (x_i − λ)₊²` over `λ`.
///
/// `group` yields `(x_i, w_i)` sorted by `x_i` ascending. On the interval
/// between consecutive points only the points above are active, so the
/// stationary point there is the weighted average of the anchor and those
/// points. Intervals are visited from the top down, accumulating the active
/// set, until the average lands inside its interval. Returns `(λ*, h(λ*))`.
///
/// With `w₀ = 0` the minimum is zero on a half-line and the smallest point of
/// that half-line at or above `μ₀` is returned.
pub fn minimize_h<I>(group: I, anchor: f64, anchor_weight: f64) -> (f64, f64)
where
    I: DoubleEndedIterator<Item = (f64, f64)> + Clone,
{
    if anchor_weight <= 0.0 {
        let top = group.clone().rev().find(|&(_, w)| w > 0.0).map(|(x, _)| x);
        return (top.map_or(anchor, |x| x.max(anchor)), 0.0);
    }
    let mut num = anchor_weight * anchor;
    let mut den = anchor_weight;
    let mut lambda = anchor;
    for (x, w) in group.clone().rev() {
        lambda = num / den;
        if lambda >= x {
            break;
        }
        num += w * x;
        den += w;
        lambda = num / den;
    }
    let d0 = anchor - lambda;
    let mut value = 0.5 * anchor_weight * d0 * d0;
    for (x, w) in group.rev() {
        if x <= lambda {
            break;
        }
        value += 0.5 * w * (x - lambda) * (x - lambda);
    }
    (lambda, value)
}

/// Per-objective groups `φ⁻¹(j)` of a cell, each sorted ascending. Entries
/// are `(μ_k^j, position in the Pareto set)`.
#[derive(Debug, Clone, Default)]
pub struct CellGroups {
    groups: Vec<Vec<(f64, usize)>>,
}

impl CellGroups {
    pub fn new(d: usize) -> Self {
        Self { groups: vec![Vec::new(); d] }
    }

    /// Filters the presorted columns down to the arms assigned to each objective.
    pub fn fill(&mut self, columns: &SortedColumns, phi: &[usize]) {
        self.groups.resize(columns.dim(), Vec::new());
        for (j, group) in self.groups.iter_mut().enumerate() {
            group.clear();
            group.extend(columns.column(j).iter().filter(|&&(_, i)| phi[i] == j).copied());
        }
    }

    pub fn group(&self, j: usize) -> &[(f64, usize)] {
        &self.groups[j]
    }
}

/// Unconstrained minimum of `g_{k0,φ}` given the filtered groups of `φ`.
/// Writes the minimizer to `lambda0` and returns the cost.
fn solve_in_groups(
    groups: &CellGroups,
    mu: &Matrix,
    w: &[f64],
    pareto: &[usize],
    k0: usize,
    lambda0: &mut [f64],
) -> f64 {
    let mut cost = 0.0;
    for (j, slot) in lambda0.iter_mut().enumerate() {
        let group = groups.group(j).iter().map(|&(x, i)| (x, w[pareto[i]]));
        let (l, v) = minimize_h(group, mu.get(k0, j), w[k0]);
        *slot = l;
        cost += v;
    }
    cost
}

/// Cheapest escape of `k0` restricted to the direction map of one cell.
pub fn minimize_in_cell(
    mu: &Matrix,
    w: &[f64],
    pareto: &ParetoSet,
    columns: &SortedColumns,
    phi: &PhiMap,
    k0: usize,
) -> AddCandidate {
    let mut groups = CellGroups::new(mu.cols());
    groups.fill(columns, phi.as_slice());
    let mut lambda0 = vec![0.0; mu.cols()];
    let cost = solve_in_groups(&groups, mu, w, pareto.indices(), k0, &mut lambda0);
    let lambda_full = assemble_lambda(mu, pareto, k0, &lambda0, phi.as_slice());
    AddCandidate { k0, cost, lambda0, phi: phi.clone(), lambda_full }
}

/// Minimizer in the full space: `k0` at `λ₀`, every Pareto arm still above
/// `λ₀` on its assigned objective lowered onto it.
pub fn assemble_lambda(mu: &Matrix, pareto: &ParetoSet, k0: usize, lambda0: &[f64], phi: &[usize]) -> Matrix {
    let mut lam = mu.clone();
    lam.row_mut(k0).copy_from_slice(lambda0);
    for (i, &k) in pareto.indices().iter().enumerate() {
        let j = phi[i];
        if mu.get(k, j) > lambda0[j] {
            lam.set(k, j, lambda0[j]);
        }
    }
    lam
}

/// Minimum of `g_{k0}` over every dominated arm, through the non-empty cells.
/// `None` when every arm is Pareto optimal.
pub fn best_addition(mu: &Matrix, w: &[f64], pareto: &ParetoSet) -> Option<AddCandidate> {
    let others = pareto.complement(mu.rows());
    if others.is_empty() {
        return None;
    }
    let d = mu.cols();
    let idx = pareto.indices();
    let pareto_means = mu.select_rows(idx);
    let columns = SortedColumns::new(&pareto_means);
    let mut groups = CellGroups::new(d);
    let mut scratch = vec![0.0; d];

    let mut best_cost = f64::INFINITY;
    let mut best: Option<(usize, Vec<f64>, Vec<usize>)> = None;
    for_each_cell(&pareto_means, |phi, _| {
        groups.fill(&columns, phi);
        for &k0 in &others {
            let cost = solve_in_groups(&groups, mu, w, idx, k0, &mut scratch);
            if cost < best_cost {
                best_cost = cost;
                match &mut best {
                    Some((k, l, f)) => {
                        *k = k0;
                        l.copy_from_slice(&scratch);
                        f.copy_from_slice(phi);
                    }
                    None => best = Some((k0, scratch.clone(), phi.to_vec())),
                }
            }
        }
    });
    let (k0, lambda0, phi) = best.expect("at least one cell exists");
    let lambda_full = assemble_lambda(mu, pareto, k0, &lambda0, &phi);
    Some(AddCandidate { k0, cost: best_cost, lambda0, phi: PhiMap::new(phi), lambda_full })
}

/// `g_{k0}(λ₀)` from its definition, with the pointwise cheapest objective
/// of every Pareto arm written to `phi`.
pub fn escape_cost(mu: &Matrix, w: &[f64], pareto: &ParetoSet, k0: usize, lambda0: &[f64], phi: &mut [usize]) -> f64 {
    let mut cost = 0.5 * w[k0] * crate::model::sq_dist(mu.row(k0), lambda0);
    for (i, &k) in pareto.indices().iter().enumerate() {
        let (j, gap) = mu
            .row(k)
            .iter()
            .zip(lambda0)
            .map(|(m, l)| m - l)
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (j, g)| if g < acc.1 { (j, g) } else { acc });
        phi[i] = j;
        if gap > 0.0 {
            cost += 0.5 * w[k] * gap * gap;
        }
    }
    cost
}

/// Two-objective variant following the optimal offset curve.
///
/// Writing `λ₀ = (s/√2 + t, −s/√2 + t)`, each Pareto arm contributes
/// `(t_k(s) − t)₊²` with the tent `t_k(s) = t_k − |s − s_k|/√2`. For fixed `s`
/// the best offset `t*(s)` is the weighted average of `t₀` (weight `2w₀`) and
/// of the tents lying above it, so it is piecewise linear in `s` and only
/// changes slope when a tent starts or stops being above it, or when an
/// active tent passes its peak. Sweeping `s` across these events, the cost
/// along `t*` is a convex quadratic on every piece and is minimized in closed
/// form.
pub fn best_addition_2d(mu: &Matrix, w: &[f64], pareto: &ParetoSet) -> Option<AddCandidate> {
    assert_eq!(mu.cols(), 2, "best_addition_2d needs two objectives");
    let others = pareto.complement(mu.rows());
    if others.is_empty() {
        return None;
    }
    let idx = pareto.indices();
    let columns = SortedColumns::new(&mu.select_rows(idx));

    // Pareto arms along the staircase: ascending s_k.
    let mut order: Vec<usize> = (0..idx.len()).collect();
    let s_of = |k: usize| (mu.get(k, 0) - mu.get(k, 1)) * FRAC_1_SQRT_2;
    order.sort_by(|&a, &b| s_of(idx[a]).total_cmp(&s_of(idx[b])).then(a.cmp(&b)));
    let stairs: Vec<Stair> = order
        .iter()
        .map(|&i| {
            let k = idx[i];
            Stair { s: s_of(k), rise: mu.get(k, 1), fall: mu.get(k, 0), w: w[k] }
        })
        .collect();

    let mut tracker = Tracker::new(stairs.len());
    let mut groups = CellGroups::new(2);
    let mut phi = vec![0usize; idx.len()];
    let mut polished = [0.0; 2];
    let mut best: Option<(f64, usize, [f64; 2], Vec<usize>)> = None;
    for &k0 in &others {
        let mu0 = [mu.get(k0, 0), mu.get(k0, 1)];
        let lambda0 = if w[k0] > 0.0 {
            let (s, t) = tracker.track(&stairs, mu0, w[k0]);
            [s * FRAC_1_SQRT_2 + t, -s * FRAC_1_SQRT_2 + t]
        } else {
            // free relocation above every Pareto arm
            let top = |j: usize| idx.iter().map(|&k| mu.get(k, j)).fold(mu0[j], f64::max);
            [top(0), top(1)]
        };
        let mut cost = escape_cost(mu, w, pareto, k0, &lambda0, &mut phi);
        let mut lambda0 = lambda0;
        // Exact minimum of the map active at the tracked point.
        groups.fill(&columns, &phi);
        let exact = solve_in_groups(&groups, mu, w, idx, k0, &mut polished);
        if exact <= cost {
            cost = exact;
            lambda0 = polished;
        }
        if best.as_ref().is_none_or(|b| cost < b.0) {
            best = Some((cost, k0, lambda0, phi.clone()));
        }
    }
    let (cost, k0, lambda0, phi) = best.expect("some dominated arm");
    let lambda_full = assemble_lambda(mu, pareto, k0, &lambda0, &phi);
    Some(AddCandidate { k0, cost, lambda0: lambda0.to_vec(), phi: PhiMap::new(phi), lambda_full })
}

/// One Pareto arm in reparametrized coordinates. Its tent rises as
/// `rise + s/√2` up to `s`, then falls as `fall − s/√2`.
#[derive(Debug, Clone, Copy)]
struct Stair {
    s: f64,
    rise: f64,
    fall: f64,
    w: f64,
}

/// Weighted sums over the tents currently above `t*`.
#[derive(Debug, Default, Clone, Copy)]
struct ActiveSums {
    w: f64,
    wc: f64,
    wcc: f64,
    ws: f64,
    wsc: f64,
}

impl ActiveSums {
    /// Adds (`sign = 1`) or removes (`sign = -1`) the line `c + σ s/√2`.
    fn update(&mut self, weight: f64, c: f64, slope_sign: f64, sign: f64) {
        let w = sign * weight;
        self.w += w;
        self.wc += w * c;
        self.wcc += w * c * c;
        self.ws += w * slope_sign;
        self.wsc += w * slope_sign * c;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Event {
    Enter,
    Peak,
    Leave,
}

struct Tracker {
    falling: Vec<usize>,
}

impl Tracker {
    fn new(p: usize) -> Self {
        Self { falling: Vec::with_capacity(p) }
    }

    /// Minimizer `(s, t)` of the escape cost of an arm at `mu0` with weight `w0 > 0`.
    fn track(&mut self, stairs: &[Stair], mu0: [f64; 2], w0: f64) -> (f64, f64) {
        let p = stairs.len();
        let s0 = (mu0[0] - mu0[1]) * FRAC_1_SQRT_2;
        let t0 = 0.5 * (mu0[0] + mu0[1]);

        let mut sums = ActiveSums::default();
        // stairs[next_peak..next_enter] are active and rising, stairs[next_enter..] not yet met
        let mut next_peak = 0usize;
        let mut next_enter = 0usize;
        self.falling.clear();
        let mut falling_head = 0usize;

        let mut s_lo = f64::NEG_INFINITY;
        let mut best = (f64::INFINITY, s0, t0);
        loop {
            let big_w = 2.0 * w0 + sums.w;
            let alpha = (2.0 * w0 * t0 + sums.wc) / big_w;
            let beta = sums.ws * FRAC_1_SQRT_2 / big_w;
            debug_assert!(beta.abs() < FRAC_1_SQRT_2 + 1e-12, "t* slope {beta} out of range");

            let mut next: Option<(f64, Event)> = None;
            let mut consider = |s: f64, e: Event| {
                if next.is_none_or(|(b, _)| s < b) {
                    next = Some((s, e));
                }
            };
            if next_enter < p {
                let st = stairs[next_enter];
                let s_meet = (alpha - st.rise) / (FRAC_1_SQRT_2 - beta);
                if s_meet <= st.s {
                    consider(s_meet, Event::Enter);
                }
            }
            if next_peak < p {
                consider(stairs[next_peak].s, Event::Peak);
            }
            if falling_head < self.falling.len() {
                let st = stairs[self.falling[falling_head]];
                consider((st.fall - alpha) / (FRAC_1_SQRT_2 + beta), Event::Leave);
            }
            let s_hi = next.map_or(f64::INFINITY, |(s, _)| s.max(s_lo));

            // Cost along t*(s) = alpha + beta s on [s_lo, s_hi]:
            // w0/2 (s − s0)² + half the weighted spread of {t0 (2w0)} ∪ active lines.
            let p0 = 2.0 * w0 * t0 + sums.wc;
            let p1 = sums.ws * FRAC_1_SQRT_2;
            let a2 = 0.5 * w0 + 0.5 * (0.5 * sums.w - p1 * p1 / big_w);
            let a1 = -w0 * s0 + 0.5 * (std::f64::consts::SQRT_2 * sums.wsc - 2.0 * p0 * p1 / big_w);
            let a0 = 0.5 * w0 * s0 * s0 + 0.5 * (2.0 * w0 * t0 * t0 + sums.wcc - p0 * p0 / big_w);
            let s_star = (-a1 / (2.0 * a2)).clamp(s_lo, s_hi);
            let value = (a2 * s_star + a1) * s_star + a0;
            if value < best.0 {
                best = (value, s_star, alpha + beta * s_star);
            }

            let Some((_, event)) = next else { break };
            match event {
                Event::Enter => {
                    let st = stairs[next_enter];
                    sums.update(st.w, st.rise, 1.0, 1.0);
                    next_enter += 1;
                }
                Event::Peak => {
                    let st = stairs[next_peak];
                    if next_peak < next_enter {
                        sums.update(st.w, st.rise, 1.0, -1.0);
                        sums.update(st.w, st.fall, -1.0, 1.0);
                        self.falling.push(next_peak);
                    } else {
                        // passed its peak below t*: never active
                        next_enter += 1;
                    }
                    next_peak += 1;
                }
                Event::Leave => {
                    let st = stairs[self.falling[falling_head]];
                    sums.update(st.w, st.fall, -1.0, -1.0);
                    falling_head += 1;
                }
            }
            s_lo = s_hi;
        }
        (best.1, best.2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::enumerate_cells;
    use crate::model::{pareto_set, transport_cost};

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    fn h(group: &[(f64, f64)], anchor: f64, w0: f64) -> (f64, f64) {
        minimize_h(group.iter().copied(), anchor, w0)
    }

    #[test]
    fn scalar_examples() {
        assert_eq!(h(&[(1.0, 1.0)], 0.0, 1.0), (0.5, 0.25));
        assert_eq!(h(&[(1.0, 1.0)], 2.0, 1.0), (2.0, 0.0));
        let (l, v) = h(&[(1.0, 1.0), (2.0, 1.0)], 0.0, 1.0);
        assert!((l - 1.0).abs() < 1e-15 && (v - 1.0).abs() < 1e-15);
        assert_eq!(h(&[], 3.0, 2.0), (3.0, 0.0));
    }

    #[test]
    fn scalar_matches_dense_grid() {
        let group = [(-1.0, 0.5), (0.3, 2.0), (0.4, 0.1), (2.0, 1.0)];
        let (anchor, w0) = (-0.7, 0.8);
        let (l, v) = h(&group, anchor, w0);
        let eval = |x: f64| {
            0.5 * w0 * (anchor - x).powi(2)
                + group.iter().map(|&(g, w)| 0.5 * w * (g - x).max(0.0).powi(2)).sum::<f64>()
        };
        let grid_min = (0..=40_000).map(|i| eval(-2.0 + i as f64 * 1e-4)).fold(f64::INFINITY, f64::min);
        assert!((v - eval(l)).abs() < 1e-14);
        assert!(v <= grid_min + 1e-12 && grid_min - v < 1e-6);
    }

    #[test]
    fn zero_weights() {
        assert_eq!(h(&[(1.0, 0.0), (2.0, 0.0)], 0.5, 0.0), (0.5, 0.0));
        assert_eq!(h(&[(1.0, 3.0), (2.0, 0.0)], 0.5, 0.0), (1.0, 0.0));
        // zero-weight points never pull the minimizer
        assert_eq!(h(&[(1.0, 1.0), (5.0, 0.0)], 0.0, 1.0), (0.5, 0.25));
    }

    fn example() -> (Matrix, ParetoSet) {
        let mu = m(&[&[1.0, 2.0], &[2.0, 1.0], &[0.0, 0.0]]);
        let ps = pareto_set(&mu);
        (mu, ps)
    }

    #[test]
    fn per_cell_examples() {
        let (mu, ps) = example();
        let cols = SortedColumns::new(&mu.select_rows(ps.indices()));
        let w = [1.0; 3];
        let c = minimize_in_cell(&mu, &w, &ps, &cols, &PhiMap::new(vec![0, 0]), 2);
        assert!((c.cost - 1.0).abs() < 1e-15);
        assert_eq!(c.lambda0, vec![1.0, 0.0]);
        let c = minimize_in_cell(&mu, &w, &ps, &cols, &PhiMap::new(vec![1, 0]), 2);
        assert!((c.cost - 2.0).abs() < 1e-15);
        assert!((transport_cost(&mu, &c.lambda_full, &w) - c.cost).abs() < 1e-14);
    }

    #[test]
    fn heavy_anchor_stays_put() {
        let (mu, ps) = example();
        let cols = SortedColumns::new(&mu.select_rows(ps.indices()));
        let w = [1.0, 1.0, 1e6];
        let c = minimize_in_cell(&mu, &w, &ps, &cols, &PhiMap::new(vec![0, 1]), 2);
        // one-sided costs at λ₀ = μ₀: arm (1,2) yields 1 on objective 0, (2,1) yields 1 on objective 1
        assert!((c.cost - 1.0).abs() < 1e-5);
        assert!(c.lambda0.iter().all(|x| x.abs() < 1e-5));
    }

    #[test]
    fn best_addition_examples() {
        let (mu, ps) = example();
        let w = [1.0; 3];
        // the mixed cell wins: λ₀ = (½, ½), each Pareto arm yields ½ on its own side
        let c = best_addition(&mu, &w, &ps).unwrap();
        assert!((c.cost - 0.5).abs() < 1e-15);
        assert_eq!(c.phi.as_slice(), &[0, 1]);
        assert_eq!(c.lambda0, vec![0.5, 0.5]);
        let fast = best_addition_2d(&mu, &w, &ps).unwrap();
        assert!((fast.cost - 0.5).abs() < 1e-12);

        let all = m(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(best_addition(&all, &[1.0, 1.0], &pareto_set(&all)).is_none());

        let line = m(&[&[0.0], &[1.0]]);
        let c = best_addition(&line, &[1.0, 1.0], &pareto_set(&line)).unwrap();
        assert_eq!(c.k0, 0);
        assert!((c.cost - 0.25).abs() < 1e-15);
    }

    #[test]
    fn single_pareto_arm_2d() {
        let mu = m(&[&[3.0, 1.0], &[0.0, 0.5], &[2.0, -1.0]]);
        let ps = pareto_set(&mu);
        let w = [0.5, 1.5, 0.7];
        let a = best_addition(&mu, &w, &ps).unwrap();
        let b = best_addition_2d(&mu, &w, &ps).unwrap();
        assert!((a.cost - b.cost).abs() <= 1e-12 * a.cost);
    }

    #[test]
    fn envelope_matches_cell_minimum() {
        let mu = m(&[&[1.0, 3.0, 0.5], &[2.0, 1.0, 2.0], &[3.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        let ps = pareto_set(&mu);
        let w = [0.3, 0.9, 0.4, 1.1];
        let pm = mu.select_rows(ps.indices());
        let cells = enumerate_cells(&pm);
        let mut phi = vec![0; ps.len()];
        for i in 0..200 {
            let x = i as f64 * 0.037;
            let l0 = [x.sin() * 3.0, (1.3 * x).cos() * 2.0 + 1.0, x - 3.0];
            let direct = escape_cost(&mu, &w, &ps, 3, &l0, &mut phi);
            let env = cells
                .iter()
                .map(|c| {
                    let lam = assemble_lambda(&mu, &ps, 3, &l0, c.phi.as_slice());
                    transport_cost(&mu, &lam, &w)
                })
                .fold(f64::INFINITY, f64::min);
            assert!((direct - env).abs() < 1e-12, "{direct} vs {env}");
        }
    }
}
