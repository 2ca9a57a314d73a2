//! Bandit instances, the domination order and the Gaussian transportation cost.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major matrix. Row `k` holds the `d` objectives of arm `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (k, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::Shape(format!(
                    "row {k} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} values cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, k: usize) -> &[f64] {
        &self.data[k * self.cols..(k + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.data[k * self.cols..(k + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.data[k * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, k: usize, j: usize, v: f64) {
        self.data[k * self.cols + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter_rows().map(<[f64]>::to_vec).collect()
    }

    /// Copy of the sub-matrix made of the given rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &k in idx {
            data.extend_from_slice(self.row(k));
        }
        Matrix { rows: idx.len(), cols: self.cols, data }
    }
}

/// Nonnegative per-arm allocation: a simplex point or raw pull counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weights(Vec<f64>);

impl Weights {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if let Some(k) = w.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::Domain(format!("weight {k} is {}", w[k])));
        }
        Ok(Self(w))
    }

    pub fn uniform(k: usize) -> Self {
        Self(vec![1.0 / k as f64; k])
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Rescaled copy summing to one. Panics on an all-zero vector.
    pub fn normalized(&self) -> Self {
        let s = self.total();
        assert!(s > 0.0, "cannot normalize all-zero weights");
        Self(self.0.iter().map(|x| x / s).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Weights {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Indices of the Pareto optimal arms, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParetoSet(Vec<usize>);

impl ParetoSet {
    pub fn from_indices(mut idx: Vec<usize>) -> Self {
        idx.sort_unstable();
        idx.dedup();
        Self(idx)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.0.binary_search(&k).is_ok()
    }

    /// Arms of `0..num_arms` that are not in the set.
    pub fn complement(&self, num_arms: usize) -> Vec<usize> {
        (0..num_arms).filter(|&k| !self.contains(k)).collect()
    }
}

/// A Gaussian multi-objective bandit with known per-objective variances.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditInstance {
    means: Matrix,
    variances: Vec<f64>,
    labels: Option<Vec<String>>,
}

/// On-disk representation of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl BanditInstance {
    pub fn new(means: Matrix, variances: Vec<f64>, labels: Option<Vec<String>>) -> Result<Self> {
        let (k, d) = (means.rows(), means.cols());
        if k == 0 || d == 0 {
            return Err(Error::Shape(format!("instance needs K >= 1 and d >= 1, got {k}x{d}")));
        }
        if variances.len() != d {
            return Err(Error::Shape(format!(
                "{} variances for {d} objectives",
                variances.len()
            )));
        }
        if means.as_slice().iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite mean".into()));
        }
        if let Some(j) = variances.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Domain(format!("variance {j} is {}", variances[j])));
        }
        if let Some(l) = &labels {
            if l.len() != k {
                return Err(Error::Shape(format!("{} labels for {k} arms", l.len())));
            }
        }
        Ok(Self { means, variances, labels })
    }

    /// Instance with unit variances on every objective.
    pub fn unit_variance(means: Matrix) -> Result<Self> {
        let d = means.cols();
        Self::new(means, vec![1.0; d], None)
    }

    pub fn from_file(file: InstanceFile) -> Result<Self> {
        Self::new(Matrix::from_rows(&file.means)?, file.variances, file.labels)
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            means: self.means.to_rows(),
            variances: self.variances.clone(),
            labels: self.labels.clone(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance serializes")
    }

    pub fn means(&self) -> &Matrix {
        &self.means
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn num_arms(&self) -> usize {
        self.means.rows()
    }

    pub fn dim(&self) -> usize {
        self.means.cols()
    }

    pub fn pareto_set(&self) -> ParetoSet {
        pareto_set(&self.means)
    }
}

/// `a ≼ b`: every objective of `a` is at most the one of `b`.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    assert_eq!(a.len(), b.len(), "dominance between vectors of different lengths");
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Arms that are not strictly dominated. Arms sharing an identical mean vector
/// are all kept.
pub fn pareto_set(means: &Matrix) -> ParetoSet {
    let k = means.rows();
    let idx = (0..k)
        .filter(|&a| {
            let ma = means.row(a);
            !(0..k).any(|b| {
                let mb = means.row(b);
                b != a && dominates(ma, mb) && ma != mb
            })
        })
        .collect();
    ParetoSet(idx)
}

/// Maps points between original coordinates and unit-variance coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceScaling {
    std_devs: Vec<f64>,
}

impl VarianceScaling {
    pub fn new(variances: &[f64]) -> Result<Self> {
        if let Some(j) = variances.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Domain(format!("variance {j} is {}", variances[j])));
        }
        Ok(Self { std_devs: variances.iter().map(|v| v.sqrt()).collect() })
    }

    pub fn to_unit(&self, m: &Matrix) -> Matrix {
        self.map(m, |x, s| x / s)
    }

    pub fn to_original(&self, m: &Matrix) -> Matrix {
        self.map(m, |x, s| x * s)
    }

    fn map(&self, m: &Matrix, f: impl Fn(f64, f64) -> f64) -> Matrix {
        assert_eq!(m.cols(), self.std_devs.len());
        let mut out = m.clone();
        for k in 0..m.rows() {
            for (x, s) in out.row_mut(k).iter_mut().zip(&self.std_devs) {
                *x = f(*x, *s);
            }
        }
        out
    }
}

/// Means divided column-wise by the standard deviations, with the inverse map.
pub fn rescale_to_unit_variance(instance: &BanditInstance) -> (Matrix, VarianceScaling) {
    let scaling = VarianceScaling::new(&instance.variances).expect("validated on construction");
    (scaling.to_unit(&instance.means), scaling)
}

/// `D_w(μ, λ) = Σ_k w_k/2 ‖μ_k − λ_k‖²` in unit-variance coordinates.
pub fn transport_cost(mu: &Matrix, lambda: &Matrix, w: &[f64]) -> f64 {
    assert_eq!((mu.rows(), mu.cols()), (lambda.rows(), lambda.cols()));
    assert_eq!(mu.rows(), w.len());
    (0..mu.rows())
        .filter(|&k| w[k] != 0.0)
        .map(|k| 0.5 * w[k] * sq_dist(mu.row(k), lambda.row(k)))
        .sum()
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn dominates_examples() {
        assert!(dominates(&[1.0, 2.0], &[2.0, 3.0]));
        assert!(!dominates(&[1.0, 2.0], &[2.0, 1.0]));
        assert!(dominates(&[1.0, 1.0], &[1.0, 1.0]));
    }

    #[test]
    #[should_panic]
    fn dominates_length_mismatch() {
        dominates(&[1.0], &[1.0, 2.0]);
    }

    #[test]
    fn pareto_examples() {
        let mu = m(&[&[1.0, 2.0], &[2.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(pareto_set(&mu).indices(), &[0, 1]);
        assert_eq!(pareto_set(&m(&[&[3.0, -1.0]])).indices(), &[0]);
    }

    #[test]
    fn identical_arms_are_all_kept() {
        let mu = m(&[&[1.0, 1.0], &[1.0, 1.0], &[0.0, 1.0]]);
        assert_eq!(pareto_set(&mu).indices(), &[0, 1]);
    }

    #[test]
    fn rescaling() {
        let inst = BanditInstance::new(m(&[&[6.0]]), vec![4.0], None).unwrap();
        let (r, _) = rescale_to_unit_variance(&inst);
        assert_eq!(r.get(0, 0), 3.0);

        let inst = BanditInstance::unit_variance(m(&[&[1.5, -2.0, 7.0]])).unwrap();
        assert_eq!(rescale_to_unit_variance(&inst).0, *inst.means());
    }

    #[test]
    fn rescaled_cost_matches_weighted_original_cost() {
        let inst = BanditInstance::new(
            m(&[&[1.0, 2.0], &[0.5, -1.0]]),
            vec![0.7, 1.54],
            None,
        )
        .unwrap();
        let lambda = m(&[&[0.0, 2.5], &[1.0, -1.0]]);
        let w = [0.3, 2.0];
        let (mu_u, sc) = rescale_to_unit_variance(&inst);
        let got = transport_cost(&mu_u, &sc.to_unit(&lambda), &w);
        let mut want = 0.0;
        for k in 0..2 {
            for j in 0..2 {
                let diff = inst.means().get(k, j) - lambda.get(k, j);
                want += w[k] * diff * diff / (2.0 * inst.variances()[j]);
            }
        }
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn transport_cost_examples() {
        let mu = m(&[&[0.0]]);
        assert_eq!(transport_cost(&mu, &mu, &[1.0]), 0.0);
        assert_eq!(transport_cost(&mu, &m(&[&[3.0]]), &[2.0]), 9.0);
        let mu = m(&[&[0.0, 1.0], &[2.0, 3.0]]);
        let lam = m(&[&[0.0, 1.0], &[5.0, -3.0]]);
        assert_eq!(transport_cost(&mu, &lam, &[1.0, 0.0]), 0.0);
    }

    #[test]
    fn invalid_instances() {
        assert!(matches!(
            BanditInstance::new(m(&[&[1.0]]), vec![0.0], None),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            BanditInstance::new(m(&[&[1.0]]), vec![1.0, 1.0], None),
            Err(Error::Shape(_))
        ));
        assert!(Matrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(Weights::new(vec![1.0, -0.1]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let json = r#"{"means": [[1.0, 2.0], [0.5, 0.25]], "variances": [1.0, 2.0]}"#;
        let inst = BanditInstance::from_json(json).unwrap();
        assert_eq!(inst.labels(), None);
        assert_eq!(BanditInstance::from_json(&inst.to_json()).unwrap(), inst);
    }

    fn arb_means() -> impl Strategy<Value = Matrix> {
        (1usize..7, 1usize..4).prop_flat_map(|(k, d)| {
            prop::collection::vec(-5i32..5, k * d)
                .prop_map(move |v| {
                    Matrix::from_flat(k, d, v.into_iter().map(f64::from).collect()).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn antisymmetry(a in prop::collection::vec(-3i32..3, 3), b in prop::collection::vec(-3i32..3, 3)) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            prop_assert_eq!(dominates(&a, &b) && dominates(&b, &a), a == b);
        }

        #[test]
        fn every_excluded_arm_has_a_strict_dominator_in_the_set(mu in arb_means()) {
            let ps = pareto_set(&mu);
            prop_assert!(!ps.is_empty());
            for k in ps.complement(mu.rows()) {
                let covered = ps
                    .indices()
                    .iter()
                    .any(|&p| dominates(mu.row(k), mu.row(p)) && mu.row(k) != mu.row(p));
                prop_assert!(covered);
            }
        }

        #[test]
        fn pareto_set_translation_and_permutation(mu in arb_means(), shift in -3i32..3, rot in 0usize..7) {
            let (k, d) = (mu.rows(), mu.cols());
            let base = pareto_set(&mu);

            let mut shifted = mu.clone();
            for a in 0..k {
                for (j, x) in shifted.row_mut(a).iter_mut().enumerate() {
                    *x += f64::from(shift) * (j as f64 + 1.0);
                }
            }
            prop_assert_eq!(&pareto_set(&shifted), &base);

            let perm: Vec<usize> = (0..k).map(|i| (i + rot) % k).collect();
            let permuted = mu.select_rows(&perm);
            let mapped = ParetoSet::from_indices(
                pareto_set(&permuted).indices().iter().map(|&i| perm[i]).collect(),
            );
            prop_assert_eq!(&mapped, &base);

            let mut swapped = Matrix::zeros(k, d);
            for a in 0..k {
                for j in 0..d {
                    swapped.set(a, j, mu.get(a, d - 1 - j));
                }
            }
            prop_assert_eq!(&pareto_set(&swapped), &base);
        }

        #[test]
        fn cost_is_linear_in_weights(c in 0.0f64..10.0, w in prop::collection::vec(0.0f64..3.0, 3)) {
            let mu = Matrix::from_rows(&[[0.0, 1.0], [2.0, -1.0], [0.5, 0.5]]).unwrap();
            let lam = Matrix::from_rows(&[[1.0, 1.0], [2.0, 0.0], [-0.5, 0.5]]).unwrap();
            let scaled: Vec<f64> = w.iter().map(|x| c * x).collect();
            let a = transport_cost(&mu, &lam, &scaled);
            let b = c * transport_cost(&mu, &lam, &w);
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }
}
