use std::fmt::Write as _;

use pareto_tas::learner::solve_t_star;
use pareto_tas::BanditInstance;
use serde::Serialize;

use crate::Result;

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub t_star: f64,
    pub weights: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub pareto_set: Vec<usize>,
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn cmd_solve(instance: &BanditInstance, iterations: usize, tolerance: f64) -> Result<SolveReport> {
    let s = solve_t_star(instance, iterations, tolerance)?;
    Ok(SolveReport {
        t_star: s.t_star,
        weights: s.weights,
        labels: instance.labels().map(<[String]>::to_vec),
        pareto_set: instance.pareto_set().indices().to_vec(),
        lower: s.lower,
        upper: s.upper,
        iterations: s.iterations,
        converged: s.converged,
    })
}

impl SolveReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "T* = {:.2}  (certified range [{:.2}, {:.2}])", self.t_star, 1.0 / self.upper, self.t_star);
        let _ = writeln!(
            out,
            "{} after {} iterations",
            if self.converged { "converged" } else { "NOT converged" },
            self.iterations
        );
        for (k, w) in self.weights.iter().enumerate() {
            let name = self.labels.as_ref().map_or_else(|| format!("arm {k}"), |l| l[k].clone());
            let mark = if self.pareto_set.contains(&k) { "*" } else { " " };
            let _ = writeln!(out, "{mark} {name:<24} {w:.4}");
        }
        out
    }
}
