//! Enumeration of the non-empty cells `S(φ)`.
//!
//! A direction map `φ` assigns to every Pareto arm the objective along which
//! it yields. Its cell is the set of locations `λ₀` for which that objective
//! is the cheapest one for every arm:
//!
//! ```text
//!   μ_k^{φ(k)} − λ₀^{φ(k)} ≤ μ_k^x − λ₀^x      for every Pareto arm k and objective x
//! ```
//!
//! Each inequality bounds a difference of two coordinates of `λ₀`, so a
//! partial map is feasible iff the graph with one node per objective and an
//! edge `φ(k) → x` of length `μ_k^x − μ_k^{φ(k)}` has no negative cycle.
//! Assigning arms one at a time gives a `d`-ary tree whose infeasible nodes
//! are pruned with their whole subtree; all-pairs distances are carried down
//! the tree and updated in `O(d²)` per child.

use crate::error::{Error, Result};
use crate::model::Matrix;

/// Cycles shorter than `-FEASIBILITY_TOL` are negative; anything in
/// `[-FEASIBILITY_TOL, 0)` counts as a zero cycle and the cell is kept.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// All-pairs shortest path lengths of a difference-constraint graph with no
/// negative cycle. `reach[x*d+y]` is false when `y` cannot be reached from `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintGraph {
    d: usize,
    dist: Vec<f64>,
    reach: Vec<bool>,
}

impl ConstraintGraph {
    /// Graph with no edges: the whole space is feasible.
    pub fn empty(d: usize) -> Self {
        let mut reach = vec![false; d * d];
        for x in 0..d {
            reach[x * d + x] = true;
        }
        Self { d, dist: vec![0.0; d * d], reach }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Shortest path length from `x` to `y`, `None` when unreachable.
    pub fn dist(&self, x: usize, y: usize) -> Option<f64> {
        let i = x * self.d + y;
        self.reach[i].then_some(self.dist[i])
    }

    /// Adds the constraints of an arm with means `row` yielding along
    /// objective `j`. Returns `None` when they close a negative cycle.
    pub fn extend(&self, row: &[f64], j: usize) -> Option<ConstraintGraph> {
        let mut out = self.clone();
        self.extend_into(row, j, &mut out).then_some(out)
    }

    /// Allocation-free form of [`extend`](Self::extend): writes the updated
    /// distances into `out` and reports feasibility. `out` is unspecified
    /// when this returns false.
    pub fn extend_into(&self, row: &[f64], j: usize, out: &mut ConstraintGraph) -> bool {
        let d = self.d;
        debug_assert_eq!(row.len(), d);
        debug_assert!(j < d);
        let u = |x: usize| row[x] - row[j];

        // A new negative cycle has to use one of the new edges j -> x.
        for x in 0..d {
            if x != j && self.reach[x * d + j] && u(x) + self.dist[x * d + j] < -FEASIBILITY_TOL {
                return false;
            }
        }

        out.d = d;
        out.dist.clone_from(&self.dist);
        out.reach.clone_from(&self.reach);

        // Paths leaving j: either the old ones or a new edge followed by an old path.
        for x in 0..d {
            if x == j {
                continue;
            }
            let (mut best, mut seen) = (self.dist[j * d + x], self.reach[j * d + x]);
            for y in 0..d {
                if y != j && self.reach[y * d + x] {
                    let cand = u(y) + self.dist[y * d + x];
                    if !seen || cand < best {
                        best = cand;
                        seen = true;
                    }
                }
            }
            out.dist[j * d + x] = best;
            out.reach[j * d + x] = seen;
        }

        // Everything else: the old path or a detour through j. Paths into j
        // are unchanged since no new edge enters j.
        for x in 0..d {
            if x == j || !self.reach[x * d + j] {
                continue;
            }
            let to_j = self.dist[x * d + j];
            for y in 0..d {
                if y == x || y == j || !out.reach[j * d + y] {
                    continue;
                }
                let cand = to_j + out.dist[j * d + y];
                let i = x * d + y;
                if !out.reach[i] || cand < out.dist[i] {
                    out.dist[i] = cand;
                    out.reach[i] = true;
                }
            }
        }
        true
    }

    /// A point of the cell: shortest distances from a virtual source joined
    /// to every node by a zero-length edge.
    pub fn witness_point(&self) -> Vec<f64> {
        let d = self.d;
        (0..d)
            .map(|x| {
                (0..d)
                    .filter(|&y| self.reach[y * d + x])
                    .map(|y| self.dist[y * d + x])
                    .fold(0.0, f64::min)
            })
            .collect()
    }
}

/// Objective assigned to each of the first `depth()` Pareto arms, in the
/// fixed Pareto ordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhiMap(Vec<usize>);

impl PhiMap {
    pub fn new(assignment: Vec<usize>) -> Self {
        Self(assignment)
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn objective(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

/// A complete direction map with a non-empty cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub phi: PhiMap,
    pub graph: ConstraintGraph,
    pub witness_point: Vec<f64>,
}

/// Depth-first walk over the valid complete maps. `visit` receives the map
/// (indexed by Pareto position, i.e. row of `pareto_means`) and the graph
/// certifying its cell. Children are tried in objective order.
pub fn for_each_cell<F>(pareto_means: &Matrix, mut visit: F)
where
    F: FnMut(&[usize], &ConstraintGraph),
{
    let (p, d) = (pareto_means.rows(), pareto_means.cols());
    if p == 0 {
        visit(&[], &ConstraintGraph::empty(d));
        return;
    }
    // graphs[r] certifies the first r assignments
    let mut graphs = vec![ConstraintGraph::empty(d); p + 1];
    let mut phi = vec![0usize; p];
    // next objective to try at each depth
    let mut next = vec![0usize; p];
    let mut depth = 0usize;
    loop {
        if next[depth] == d {
            if depth == 0 {
                break;
            }
            next[depth] = 0;
            depth -= 1;
            continue;
        }
        let j = next[depth];
        next[depth] += 1;
        let (head, tail) = graphs.split_at_mut(depth + 1);
        if !head[depth].extend_into(pareto_means.row(depth), j, &mut tail[0]) {
            continue;
        }
        phi[depth] = j;
        if depth + 1 == p {
            visit(&phi, &tail[0]);
        } else {
            depth += 1;
        }
    }
}

/// All non-empty cells in depth-first order.
pub fn enumerate_cells(pareto_means: &Matrix) -> Vec<Cell> {
    let mut cells = Vec::new();
    for_each_cell(pareto_means, |phi, graph| {
        cells.push(Cell {
            phi: PhiMap::new(phi.to_vec()),
            graph: graph.clone(),
            witness_point: graph.witness_point(),
        });
    });
    cells
}

/// Upper bound on the number of non-empty cells: `C(p+d−1, d−1)`.
pub fn cell_count_bound(p: u64, d: u64) -> Result<u64> {
    assert!(d >= 1, "at least one objective");
    binomial(p + d - 1, d - 1)
}

fn binomial(n: u64, k: u64) -> Result<u64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc * (n-k+i) / i stays an integer at every step
        acc = acc
            .checked_mul(u128::from(n - k + i))
            .ok_or(Error::Overflow { n, k })?
            / u128::from(i);
        if acc > u128::from(u64::MAX) {
            return Err(Error::Overflow { n, k });
        }
    }
    Ok(acc as u64)
}
