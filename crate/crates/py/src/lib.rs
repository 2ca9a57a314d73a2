//! Python bindings: `import pareto_tas`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use pareto_tas::learner::{self, LearnerConfig};
use pareto_tas::{datasets, oracle, Matrix, Strategy, Witness};

fn to_py(e: pareto_tas::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix(rows: &[Vec<f64>]) -> PyResult<Matrix> {
    Matrix::from_rows(rows).map_err(to_py)
}

fn strategy(name: &str) -> PyResult<Strategy> {
    match name {
        "auto" => Ok(Strategy::Auto),
        "generic" => Ok(Strategy::Generic),
        _ => Err(PyValueError::new_err(format!("strategy must be 'auto' or 'generic', got {name:?}"))),
    }
}

/// Gaussian bandit: K×d means and one known variance per objective.
#[pyclass(name = "BanditInstance", module = "pareto_tas", frozen)]
pub struct PyBanditInstance {
    inner: pareto_tas::BanditInstance,
}

#[pymethods]
impl PyBanditInstance {
    #[new]
    #[pyo3(signature = (means, variances = None, labels = None))]
    fn new(means: Vec<Vec<f64>>, variances: Option<Vec<f64>>, labels: Option<Vec<String>>) -> PyResult<Self> {
        let m = matrix(&means)?;
        let variances = variances.unwrap_or_else(|| vec![1.0; m.cols()]);
        let inner = pareto_tas::BanditInstance::new(m, variances, labels).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// The embedded booster-vaccine instance (20 arms, 3 objectives).
    #[staticmethod]
    fn covid() -> Self {
        Self { inner: datasets::covid() }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: pareto_tas::BanditInstance::from_json(text).map_err(to_py)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn means(&self) -> Vec<Vec<f64>> {
        self.inner.means().to_rows()
    }

    #[getter]
    fn variances(&self) -> Vec<f64> {
        self.inner.variances().to_vec()
    }

    #[getter]
    fn labels(&self) -> Option<Vec<String>> {
        self.inner.labels().map(<[String]>::to_vec)
    }

    #[getter]
    fn num_arms(&self) -> usize {
        self.inner.num_arms()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn pareto_set(&self) -> Vec<usize> {
        self.inner.pareto_set().indices().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("BanditInstance(K={}, d={})", self.inner.num_arms(), self.inner.dim())
    }
}

/// Closest alternative model and the supergradient of the value in `w`.
#[pyclass(name = "TransportResult", module = "pareto_tas", frozen, get_all)]
pub struct PyTransportResult {
    cost: f64,
    /// Minimizer in the instance's original units.
    lambda_: Vec<Vec<f64>>,
    /// `"remove"` or `"add"`.
    kind: &'static str,
    k0: usize,
    /// Dominating arm for `"remove"`, `None` for `"add"`.
    k1: Option<usize>,
    /// Yielding objective of each Pareto arm for `"add"`.
    phi: Option<Vec<usize>>,
    gradient: Vec<f64>,
}

#[pymethods]
impl PyTransportResult {
    fn __repr__(&self) -> String {
        format!("TransportResult(cost={}, kind={:?}, k0={})", self.cost, self.kind, self.k0)
    }
}

/// Offline characteristic time and optimal weights.
#[pyclass(name = "TStarSolution", module = "pareto_tas", frozen, get_all)]
pub struct PyTStarSolution {
    t_star: f64,
    weights: Vec<f64>,
    lower: f64,
    upper: f64,
    iterations: usize,
    converged: bool,
}

/// Outcome of one simulated learner run.
#[pyclass(name = "RunRecord", module = "pareto_tas", frozen, get_all)]
pub struct PyRunRecord {
    seed: u64,
    tau: u64,
    answer: Vec<usize>,
    correct: bool,
    counts: Vec<u64>,
    wall_time: f64,
    aborted: bool,
}

#[pymethods]
impl PyRunRecord {
    fn __repr__(&self) -> String {
        format!("RunRecord(tau={}, correct={}, aborted={})", self.tau, self.correct, self.aborted)
    }
}

/// Indices of the arms no other arm weakly dominates (maximization).
#[pyfunction]
fn pareto_set(means: Vec<Vec<f64>>) -> PyResult<Vec<usize>> {
    Ok(pareto_tas::pareto_set(&matrix(&means)?).indices().to_vec())
}

/// `inf over Alt(μ) of Σ_k w_k KL(μ_k, λ_k)`.
#[pyfunction]
#[pyo3(signature = (instance, weights, strategy = "auto"))]
fn min_alt_cost(instance: &PyBanditInstance, weights: Vec<f64>, strategy: &str) -> PyResult<PyTransportResult> {
    let r = oracle::min_alt_cost_with(&instance.inner, &weights, self::strategy(strategy)?).map_err(to_py)?;
    let (kind, k0, k1, phi) = match r.witness {
        Witness::Remove { k0, k1 } => ("remove", k0, Some(k1), None),
        Witness::Add { k0, phi } => ("add", k0, None, Some(phi.as_slice().to_vec())),
    };
    Ok(PyTransportResult { cost: r.cost, lambda_: r.lambda.to_rows(), kind, k0, k1, phi, gradient: r.gradient })
}

#[pyfunction]
#[pyo3(signature = (instance, iterations = 1_000_000, tolerance = 1e-3))]
fn solve_t_star(py: Python<'_>, instance: &PyBanditInstance, iterations: usize, tolerance: f64) -> PyResult<PyTStarSolution> {
    let inst = instance.inner.clone();
    let s = py.detach(move || learner::solve_t_star(&inst, iterations, tolerance)).map_err(to_py)?;
    Ok(PyTStarSolution {
        t_star: s.t_star,
        weights: s.weights,
        lower: s.lower,
        upper: s.upper,
        iterations: s.iterations,
        converged: s.converged,
    })
}

/// One Track-and-Stop run on simulated Gaussian rewards.
#[pyfunction]
#[pyo3(signature = (instance, delta = 0.1, seed = 0, gradient_period = 10, stopping_period = 25, max_steps = 10_000_000))]
fn run(
    py: Python<'_>,
    instance: &PyBanditInstance,
    delta: f64,
    seed: u64,
    gradient_period: u64,
    stopping_period: u64,
    max_steps: u64,
) -> PyResult<PyRunRecord> {
    let inst = instance.inner.clone();
    let cfg = LearnerConfig { delta, gradient_period, stopping_period, max_steps, seed };
    let r = py.detach(move || learner::run(&inst, &cfg)).map_err(to_py)?;
    Ok(PyRunRecord {
        seed: r.seed,
        tau: r.tau,
        answer: r.answer.indices().to_vec(),
        correct: r.correct,
        counts: r.counts,
        wall_time: r.wall_time,
        aborted: r.aborted,
    })
}

#[pymodule(name = "pareto_tas")]
fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBanditInstance>()?;
    m.add_class::<PyTransportResult>()?;
    m.add_class::<PyTStarSolution>()?;
    m.add_class::<PyRunRecord>()?;
    m.add_function(wrap_pyfunction!(pareto_set, m)?)?;
    m.add_function(wrap_pyfunction!(min_alt_cost, m)?)?;
    m.add_function(wrap_pyfunction!(solve_t_star, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
