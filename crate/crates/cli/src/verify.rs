//! Randomized equivalence sweeps against the brute-force reference oracles.

use std::fmt;
use std::time::Instant;

use pareto_tas::cells::{cell_count_bound, enumerate_cells, ConstraintGraph};
use pareto_tas::datasets::{generate, random_simplex, Geometry};
use pareto_tas::model::transport_cost;
use pareto_tas::oracle::{min_alt_cost_unit, supergradient_check, FD_STEP};
use pareto_tas::reference::{bellman_ford_all_pairs, bellman_ford_feasible, constraint_edges, exhaustive_min_alt, Edge};
use pareto_tas::{add, min_alt_cost, pareto_set, remove, BanditInstance, Matrix, Strategy, Witness};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
    pub seconds: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {:<22} {} cases, {} failures ({:.2}s)", self.name, self.cases, self.failures, self.seconds)?;
        if let Some(msg) = &self.first_failure {
            write!(f, "\n     first failure: {msg}")?;
        }
        Ok(())
    }
}

struct Tally {
    name: &'static str,
    cases: usize,
    failures: usize,
    first: Option<String>,
    start: Instant,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self { name, cases: 0, failures: 0, first: None, start: Instant::now() }
    }

    fn case(&mut self) {
        self.cases += 1;
    }

    fn expect(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(msg());
            }
        }
    }

    fn finish(self) -> CheckReport {
        CheckReport {
            name: self.name.to_string(),
            cases: self.cases,
            failures: self.failures,
            first_failure: self.first,
            seconds: self.start.elapsed().as_secs_f64(),
        }
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()) || (a - b).abs() < 1e-300
}

/// Means uniform in `[0,10]^d` with `K ≤ 8`, `d ≤ 3` and at most five
/// Pareto arms.
pub fn small_instance<R: Rng>(rng: &mut R) -> Matrix {
    loop {
        let k = rng.random_range(2..=8);
        let d = rng.random_range(1..=3);
        let inst = generate(Geometry::UniformBox, k, d, rng).expect("valid shape");
        if inst.pareto_set().len() <= 5 {
            return inst.means().clone();
        }
    }
}

/// `min_alt_cost` (both strategies) against all ordered pairs plus all
/// `d^p` maps; also checks that the minimizer sits on the boundary of the
/// alternative set.
pub fn oracle_equivalence(n: usize, seed: u64, tol: f64) -> CheckReport {
    let mut t = Tally::new("oracle-equivalence");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n {
        t.case();
        let mu = small_instance(&mut rng);
        let w = random_simplex(mu.rows(), &mut rng);
        let want = match exhaustive_min_alt(&mu, &w) {
            Ok(v) => v,
            Err(e) => {
                t.expect(false, || format!("case {i}: reference refused: {e}"));
                continue;
            }
        };
        for s in [Strategy::Auto, Strategy::Generic] {
            let r = match min_alt_cost_unit(&mu, &w, s) {
                Ok(r) => r,
                Err(e) => {
                    t.expect(false, || format!("case {i}: {e}"));
                    continue;
                }
            };
            t.expect(rel_close(r.cost, want, tol), || format!("case {i} {s:?}: cost {} vs reference {want}", r.cost));
            t.expect(rel_close(transport_cost(&mu, &r.lambda, &w), r.cost, 1e-10), || {
                format!("case {i} {s:?}: cost does not match its minimizer")
            });
            t.expect(on_boundary(&mu, &r.lambda, &r.witness), || {
                format!("case {i} {s:?}: minimizer violates its witness {:?}", r.witness)
            });
        }
    }
    t.finish()
}

/// The witness inequalities hold at `lambda`, and pushing the moved arm
/// by `1e-6` past them changes the Pareto set.
fn on_boundary(mu: &Matrix, lambda: &Matrix, witness: &Witness) -> bool {
    let front = pareto_set(mu);
    let mut pushed = lambda.clone();
    let holds = match witness {
        Witness::Remove { k0, k1 } => {
            pushed.row_mut(*k0).iter_mut().for_each(|x| *x -= 1e-6);
            lambda.row(*k0).iter().zip(lambda.row(*k1)).all(|(a, b)| *a <= b + 1e-9)
        }
        Witness::Add { k0, .. } => {
            pushed.row_mut(*k0).iter_mut().for_each(|x| *x += 1e-6);
            front
                .indices()
                .iter()
                .all(|&k| lambda.row(k).iter().zip(lambda.row(*k0)).any(|(a, b)| *a <= b + 1e-9))
        }
    };
    holds && pareto_set(&pushed) != front
}

/// Incremental constraint-graph updates against Bellman-Ford on the full
/// edge list, for every prefix of random assignment sequences (`d ≤ 5`).
pub fn incremental_graph(n: usize, seed: u64) -> CheckReport {
    let mut t = Tally::new("incremental-graph");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n {
        t.case();
        let d = rng.random_range(1..=5);
        let len = rng.random_range(1..=12);
        let mut g = ConstraintGraph::empty(d);
        let mut edges: Vec<Edge> = Vec::new();
        for step in 0..len {
            let row: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..10.0)).collect();
            let j = rng.random_range(0..d);
            edges.extend(constraint_edges(&row, j));
            let verdict = g.extend(&row, j);
            let truth = bellman_ford_feasible(d, &edges);
            t.expect(verdict.is_some() == truth, || format!("sequence {i} step {step}: verdict differs"));
            let Some(next) = verdict else { break };
            if let Some(full) = bellman_ford_all_pairs(d, &edges) {
                let same = (0..d).all(|x| {
                    (0..d).all(|y| match (next.dist(x, y), full[x][y]) {
                        (Some(a), Some(b)) => (a - b).abs() <= 1e-12,
                        (None, None) => true,
                        _ => false,
                    })
                });
                t.expect(same, || format!("sequence {i} step {step}: distance matrix differs"));
            }
            g = next;
        }
    }
    t.finish()
}

/// Number of non-empty cells of `p` generic points on the positive unit sphere.
pub fn sphere_cell_count<R: Rng>(p: usize, d: usize, rng: &mut R) -> usize {
    let inst = generate(Geometry::SphereQuadrantPlusOrigin, p, d, rng).expect("valid shape");
    enumerate_cells(&inst.means().select_rows(inst.pareto_set().indices())).len()
}

/// `p + 1` cells for `d = 2`, `C(p+2, 2)` for `d = 3`, and the binomial
/// bound for `p, d ≤ 7`.
pub fn cell_counts(seed: u64) -> CheckReport {
    let mut t = Tally::new("cell-counts");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for p in 1..=64 {
        t.case();
        let n = sphere_cell_count(p, 2, &mut rng);
        t.expect(n == p + 1, || format!("d=2 p={p}: {n} cells"));
    }
    for p in 1..=15 {
        t.case();
        let n = sphere_cell_count(p, 3, &mut rng);
        t.expect(n == (p + 1) * (p + 2) / 2, || format!("d=3 p={p}: {n} cells"));
    }
    for p in 1..=7 {
        for d in 1..=7 {
            t.case();
            let n = sphere_cell_count(p, d, &mut rng) as u64;
            let bound = cell_count_bound(p as u64, d as u64).expect("small");
            t.expect(n <= bound, || format!("p={p} d={d}: {n} cells above bound {bound}"));
        }
    }
    t.finish()
}

/// Two-objective removal and addition paths against the generic ones, on
/// fronts of up to 64 arms with a few dominated arms.
pub fn fast_2d(n: usize, seed: u64, tol: f64) -> CheckReport {
    let mut t = Tally::new("fast-2d");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n {
        t.case();
        let p = rng.random_range(1..=64);
        let geometry = if i % 2 == 0 { Geometry::Staircase2d } else { Geometry::SphereQuadrantPlusOrigin };
        let base = generate(geometry, p, 2, &mut rng).expect("valid shape");
        let scale = if geometry == Geometry::Staircase2d { 10.0 } else { 1.0 };
        let mut rows = base.means().to_rows();
        for _ in 0..rng.random_range(0..4) {
            rows.push(vec![rng.random_range(-0.2..0.6) * scale, rng.random_range(-0.2..0.6) * scale]);
        }
        let mu = Matrix::from_rows(&rows).expect("rectangular");
        let front = pareto_set(&mu);
        let w = random_simplex(mu.rows(), &mut rng);
        let (a, b) = (remove::best_removal(&mu, &w, &front), remove::best_removal_2d(&mu, &w, &front));
        let ok = match (&a, &b) {
            (Some(a), Some(b)) => rel_close(a.cost, b.cost, tol),
            (None, None) => true,
            _ => false,
        };
        t.expect(ok, || format!("case {i} p={p}: removal {:?} vs {:?}", a.map(|x| x.cost), b.map(|x| x.cost)));
        let (a, b) = (add::best_addition(&mu, &w, &front), add::best_addition_2d(&mu, &w, &front));
        let ok = match (&a, &b) {
            (Some(a), Some(b)) => rel_close(a.cost, b.cost, tol),
            (None, None) => true,
            _ => false,
        };
        t.expect(ok, || format!("case {i} p={p}: addition {:?} vs {:?}", a.map(|x| x.cost), b.map(|x| x.cost)));
    }
    t.finish()
}

fn random_instance<R: Rng>(rng: &mut R) -> BanditInstance {
    let mu = small_instance(rng);
    let variances = (0..mu.cols()).map(|_| rng.random_range(0.3..2.0)).collect();
    BanditInstance::new(mu, variances, None).expect("valid instance")
}

/// Danskin gradient against central differences.
pub fn supergradient(n: usize, seed: u64, tol: f64) -> CheckReport {
    let mut t = Tally::new("supergradient");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n {
        t.case();
        let inst = random_instance(&mut rng);
        let w: Vec<f64> = random_simplex(inst.num_arms(), &mut rng).iter().map(|x| x + 0.01).collect();
        let dir: Vec<f64> = (0..w.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        match supergradient_check(&inst, &w, &dir) {
            Ok((a, b)) if (a - b).abs() <= tol => {}
            Ok((a, b)) => {
                let kink = straddles_kink(&inst, &w, &dir, a, tol);
                t.expect(kink, || format!("case {i}: analytic {a} vs numeric {b}"));
            }
            Err(e) => t.expect(false, || format!("case {i}: {e}")),
        }
    }
    t.finish()
}

/// The central difference may straddle a point where the minimizing
/// witness changes. Then the value is only one-sided differentiable: accept
/// when the witness does change within the step and the one-sided
/// difference on the side sharing the witness of `w` matches `analytic`.
fn straddles_kink(inst: &BanditInstance, w: &[f64], dir: &[f64], analytic: f64, tol: f64) -> bool {
    let at = |sign: f64| {
        let ws: Vec<f64> = w.iter().zip(dir).map(|(a, d)| a + sign * FD_STEP * d).collect();
        min_alt_cost(inst, &ws)
    };
    let (Ok(mid), Ok(up), Ok(down)) = (at(0.0), at(1.0), at(-1.0)) else { return false };
    let forward = (up.cost - mid.cost) / FD_STEP;
    let backward = (mid.cost - down.cost) / FD_STEP;
    (up.witness != mid.witness && down.witness == mid.witness && (backward - analytic).abs() <= tol)
        || (down.witness != mid.witness && up.witness == mid.witness && (forward - analytic).abs() <= tol)
}

/// Midpoint concavity in `w`.
pub fn concavity(n: usize, seed: u64, tol: f64) -> CheckReport {
    let mut t = Tally::new("concavity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n {
        t.case();
        let inst = random_instance(&mut rng);
        let k = inst.num_arms();
        let (w1, w2) = (random_simplex(k, &mut rng), random_simplex(k, &mut rng));
        let mid: Vec<f64> = w1.iter().zip(&w2).map(|(a, b)| 0.5 * (a + b)).collect();
        let v = |w: &[f64]| min_alt_cost(&inst, w).map(|r| r.cost).unwrap_or(f64::NAN);
        let (m, a, b) = (v(&mid), v(&w1), v(&w2));
        t.expect(m >= 0.5 * (a + b) - tol, || format!("case {i}: value({m}) below chord {}", 0.5 * (a + b)));
    }
    t.finish()
}

/// `value(c·w) = c·value(w)` for `c ∈ {0.5, 2, 10}`.
pub fn homogeneity(n: usize, seed: u64, tol: f64) -> CheckReport {
    let mut t = Tally::new("homogeneity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n {
        t.case();
        let inst = random_instance(&mut rng);
        let w = random_simplex(inst.num_arms(), &mut rng);
        let v = |w: &[f64]| min_alt_cost(&inst, w).map(|r| r.cost).unwrap_or(f64::NAN);
        let base = v(&w);
        for c in [0.5, 2.0, 10.0] {
            let scaled: Vec<f64> = w.iter().map(|x| c * x).collect();
            let got = v(&scaled);
            t.expect(rel_close(got, c * base, tol), || format!("case {i} c={c}: {got} vs {}", c * base));
        }
    }
    t.finish()
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckReport>,
    pub warnings: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckReport::passed)
    }
}

/// Runs every sweep with `budget` random cases each.
pub fn cmd_verify(budget: usize, seed: u64) -> VerifyReport {
    if budget == 0 {
        return VerifyReport { checks: vec![], warnings: vec!["budget is 0: nothing was checked".into()] };
    }
    let checks = vec![
        oracle_equivalence(budget, seed, 1e-9),
        incremental_graph(budget, seed.wrapping_add(1)),
        cell_counts(seed.wrapping_add(2)),
        fast_2d(budget, seed.wrapping_add(3), 1e-9),
        supergradient(budget, seed.wrapping_add(4), 1e-3),
        concavity(budget, seed.wrapping_add(5), 1e-10),
        homogeneity(budget, seed.wrapping_add(6), 1e-12),
    ];
    VerifyReport { checks, warnings: vec![] }
}
