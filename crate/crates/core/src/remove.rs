//! Cheapest way to make one Pareto arm weakly dominated by another.

use crate::model::{Matrix, ParetoSet};

/// Arm `k0` moved under arm `k1`; every other arm stays put.
#[derive(Debug, Clone, PartialEq)]
pub struct RemoveCandidate {
    pub k0: usize,
    pub k1: usize,
    pub cost: f64,
    pub lambda_k0: Vec<f64>,
    pub lambda_k1: Vec<f64>,
}

impl RemoveCandidate {
    /// Full `K×d` minimizer.
    pub fn lambda(&self, mu: &Matrix) -> Matrix {
        let mut lam = mu.clone();
        lam.row_mut(self.k0).copy_from_slice(&self.lambda_k0);
        lam.row_mut(self.k1).copy_from_slice(&self.lambda_k1);
        lam
    }
}

/// Closed-form cost of `k0 ≼_λ k1`: on every objective where `k0` is above
/// `k1`, both meet at their weighted average.
pub fn remove_cost(mu: &Matrix, w: &[f64], k0: usize, k1: usize) -> RemoveCandidate {
    assert_ne!(k0, k1, "an arm cannot shadow itself");
    let (w0, w1) = (w[k0], w[k1]);
    let total = w0 + w1;
    let harmonic = if total > 0.0 { w0 * w1 / total } else { 0.0 };

    let mut lambda_k0 = mu.row(k0).to_vec();
    let mut lambda_k1 = mu.row(k1).to_vec();
    let mut gap_sq = 0.0;
    for (j, (a, b)) in mu.row(k0).iter().zip(mu.row(k1)).enumerate() {
        let gap = if fault::removal_sign_flipped() { b - a } else { a - b };
        if gap > 0.0 {
            gap_sq += gap * gap;
            let meet = if total > 0.0 { (w0 * a + w1 * b) / total } else { 0.5 * (a + b) };
            lambda_k0[j] = meet;
            lambda_k1[j] = meet;
        }
    }
    RemoveCandidate { k0, k1, cost: 0.5 * harmonic * gap_sq, lambda_k0, lambda_k1 }
}

/// Deliberate fault injection for mutation testing of the verification
/// sweeps. Only available in debug builds.
pub mod fault {
    #[cfg(debug_assertions)]
    static FLIP: std::sync::atomic::AtomicBool = std::sync::atomic::AtomicBool::new(false);

    /// Flips the sign of the objective gap in [`super::remove_cost`] for the
    /// whole process.
    #[cfg(debug_assertions)]
    pub fn flip_removal_sign(on: bool) {
        FLIP.store(on, std::sync::atomic::Ordering::Relaxed);
    }

    #[inline]
    pub(crate) fn removal_sign_flipped() -> bool {
        #[cfg(debug_assertions)]
        return FLIP.load(std::sync::atomic::Ordering::Relaxed);
        #[cfg(not(debug_assertions))]
        false
    }
}

/// Minimum of [`remove_cost`] over all ordered pairs of distinct Pareto arms.
pub fn best_removal(mu: &Matrix, w: &[f64], pareto: &ParetoSet) -> Option<RemoveCandidate> {
    let idx = pareto.indices();
    let mut best: Option<RemoveCandidate> = None;
    for &a in idx {
        for &b in idx {
            if a != b {
                keep_min(&mut best, remove_cost(mu, w, a, b));
            }
        }
    }
    best
}

/// Two-objective variant scanning only neighbours of the Pareto staircase.
/// Falls back to [`best_removal`] when two Pareto arms share their first
/// objective.
pub fn best_removal_2d(mu: &Matrix, w: &[f64], pareto: &ParetoSet) -> Option<RemoveCandidate> {
    assert_eq!(mu.cols(), 2, "best_removal_2d needs two objectives");
    let mut order = pareto.indices().to_vec();
    order.sort_by(|&a, &b| mu.get(a, 0).total_cmp(&mu.get(b, 0)).then(a.cmp(&b)));
    if order.windows(2).any(|p| mu.get(p[0], 0) == mu.get(p[1], 0)) {
        return best_removal(mu, w, pareto);
    }
    let mut best = None;
    for pair in order.windows(2) {
        let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
        keep_min(&mut best, remove_cost(mu, w, a, b));
        keep_min(&mut best, remove_cost(mu, w, b, a));
    }
    best
}

fn keep_min(best: &mut Option<RemoveCandidate>, cand: RemoveCandidate) {
    if best.as_ref().is_none_or(|b| cand.cost < b.cost) {
        *best = Some(cand);
    }
}
