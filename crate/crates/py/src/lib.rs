//! Python bindings: states, partition combinatorics, closed-form values,
//! finite-copy functional reports, and axiom verification.
//!
//! Part labels on the Python side are 1-based, matching the CLI's
//! "1|23" notation.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use entmon::functionals as func;
use entmon::gmean::{self, GMeanMode, PsdMatrix};
use entmon::multilinear::{Bipartition, MultipartiteState, SpaceSpec};
use entmon::observables::{self, AxiomConfig, FamilySpec};
use entmon::partitions::{self, CycleType, Partition, ProbVector};

fn err(e: entmon::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn partition(parts: Vec<u32>) -> PyResult<Partition> {
    Partition::new(parts).map_err(err)
}

fn cut_from_side(side: Vec<usize>, parts: usize) -> PyResult<Bipartition> {
    let zero_based: Vec<usize> = side
        .iter()
        .map(|&j| {
            j.checked_sub(1)
                .ok_or_else(|| PyValueError::new_err("part labels are 1-based"))
        })
        .collect::<PyResult<_>>()?;
    Bipartition::new(zero_based, parts).map_err(err)
}

fn theta_pairs(
    sides: Vec<Vec<usize>>,
    weights: Vec<f64>,
    parts: usize,
) -> PyResult<Vec<(Bipartition, f64)>> {
    if sides.len() != weights.len() {
        return Err(PyValueError::new_err("one weight per bipartition required"));
    }
    sides
        .into_iter()
        .zip(weights)
        .map(|(side, w)| Ok((cut_from_side(side, parts)?, w)))
        .collect()
}

fn family_from_theta(
    sides: Vec<Vec<usize>>,
    weights: Vec<f64>,
    parts: usize,
    alpha: f64,
) -> PyResult<FamilySpec> {
    let pairs = theta_pairs(sides, weights, parts)?;
    if pairs.len() == 1 {
        return Ok(FamilySpec::bipartite(pairs.into_iter().next().unwrap().0));
    }
    let tree = gmean::GMeanTree::balanced(
        &pairs.iter().map(|(_, w)| *w).collect::<Vec<_>>(),
    )
    .map_err(err)?;
    let children = pairs
        .into_iter()
        .map(|(cut, _)| FamilySpec::bipartite(cut))
        .collect();
    FamilySpec::gmean(children, tree, alpha).map_err(err)
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => pyo3::types::PyBool::new(py, *b).to_owned().into_any().unbind(),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any().unbind()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any().unbind()
            }
        }
        serde_json::Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any().unbind()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, val) in map {
                dict.set_item(k, json_to_py(py, val)?)?;
            }
            dict.into_any().unbind()
        }
    })
}

/// A vector in a k-partite tensor-product space.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct State {
    inner: MultipartiteState,
}

#[pymethods]
impl State {
    /// Unit tensor Σᵢ eᵢ⊗…⊗eᵢ on k parts of dimension r (unnormalized).
    #[staticmethod]
    fn unit(r: usize, k: usize) -> PyResult<Self> {
        Ok(State {
            inner: MultipartiteState::unit_tensor(r, k).map_err(err)?,
        })
    }

    /// Normalized unit tensor (GHZ state).
    #[staticmethod]
    fn ghz(level: usize, k: usize) -> PyResult<Self> {
        Ok(State {
            inner: MultipartiteState::ghz(level, k).map_err(err)?,
        })
    }

    /// The k-qubit W state.
    #[staticmethod]
    fn w(k: usize) -> PyResult<Self> {
        Ok(State {
            inner: MultipartiteState::w_state(k).map_err(err)?,
        })
    }

    /// Deterministic complex-Gaussian state for the given seed.
    #[staticmethod]
    fn random(dims: Vec<usize>, seed: u64) -> PyResult<Self> {
        Ok(State {
            inner: MultipartiteState::random(&dims, seed).map_err(err)?,
        })
    }

    /// State from explicit amplitudes in row-major mixed-radix order.
    #[staticmethod]
    fn from_amplitudes(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        let space = SpaceSpec::new(dims).map_err(err)?;
        Ok(State {
            inner: MultipartiteState::new(space, amplitudes).map_err(err)?,
        })
    }

    fn dims(&self) -> Vec<usize> {
        self.inner.space().dims().to_vec()
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    fn normalized(&self) -> PyResult<Self> {
        Ok(State {
            inner: self.inner.normalized().map_err(err)?,
        })
    }

    fn tensor(&self, other: &State) -> PyResult<Self> {
        Ok(State {
            inner: entmon::multilinear::tensor_product(&self.inner, &other.inner).map_err(err)?,
        })
    }

    fn direct_sum(&self, other: &State) -> PyResult<Self> {
        Ok(State {
            inner: entmon::multilinear::direct_sum(&self.inner, &other.inner).map_err(err)?,
        })
    }

    /// Normalized Schmidt spectrum across the bipartition whose first side
    /// is `side` (1-based part labels), in decreasing order.
    fn schmidt_spectrum(&self, side: Vec<usize>) -> PyResult<Vec<f64>> {
        let cut = cut_from_side(side, self.inner.space().parts())?;
        Ok(entmon::multilinear::schmidt_spectrum(&self.inner, &cut)
            .map_err(err)?
            .weights()
            .to_vec())
    }

    fn digest(&self) -> String {
        func::state_digest(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("State(dims={:?}, norm={:.6})", self.dims(), self.norm())
    }
}

/// All partitions of n (ascending lexicographic), optionally length-capped.
#[pyfunction]
#[pyo3(signature = (n, max_len=None))]
fn enumerate_partitions(n: u32, max_len: Option<usize>) -> Vec<Vec<u32>> {
    partitions::enumerate_partitions(n, max_len)
        .into_iter()
        .map(|p| p.parts().to_vec())
        .collect()
}

/// Shannon entropy in bits of a normalized weight vector.
#[pyfunction]
fn shannon_entropy(weights: Vec<f64>) -> PyResult<f64> {
    partitions::shannon_entropy(&ProbVector::new(weights).map_err(err)?).map_err(err)
}

/// Rényi entropy of order alpha in bits (alpha = inf gives the min-entropy).
#[pyfunction]
fn renyi_entropy(weights: Vec<f64>, alpha: f64) -> PyResult<f64> {
    partitions::renyi_entropy(&ProbVector::new(weights).map_err(err)?, alpha).map_err(err)
}

#[pyfunction]
fn binary_entropy(q: f64) -> PyResult<f64> {
    partitions::binary_entropy(q).map_err(err)
}

/// Character χ_λ on the conjugacy class with the given cycle type (exact).
#[pyfunction]
fn mn_character(lam: Vec<u32>, cycle_type: Vec<u32>) -> PyResult<i64> {
    partitions::mn_character(&partition(lam)?, &CycleType(partition(cycle_type)?)).map_err(err)
}

/// Kronecker coefficient g_{λμν} (exact).
#[pyfunction]
fn kronecker(lam: Vec<u32>, mu: Vec<u32>, nu: Vec<u32>) -> PyResult<u64> {
    partitions::kronecker(&partition(lam)?, &partition(mu)?, &partition(nu)?).map_err(err)
}

/// Littlewood–Richardson coefficient c^λ_{μν} (exact).
#[pyfunction]
fn littlewood_richardson(lam: Vec<u32>, mu: Vec<u32>, nu: Vec<u32>) -> PyResult<u64> {
    partitions::littlewood_richardson(&partition(lam)?, &partition(mu)?, &partition(nu)?)
        .map_err(err)
}

/// dim 𝕊_λ(C^d) by the hook-content formula.
#[pyfunction]
fn weyl_dim(lam: Vec<u32>, d: usize) -> PyResult<u64> {
    Ok(partitions::weyl_dim(&partition(lam)?, d))
}

/// Closed-form bipartite value Tr (Tr_S |ψ⟩⟨ψ|)^α.
#[pyfunction]
fn bipartite_closed_form(state: &State, side: Vec<usize>, alpha: f64) -> PyResult<f64> {
    let cut = cut_from_side(side, state.inner.space().parts())?;
    func::bipartite_closed_form(&state.inner, &cut, alpha).map_err(err)
}

/// Closed upper bound on E for weighted bipartitions (1-based sides).
#[pyfunction]
fn closed_upper_bound(
    state: &State,
    sides: Vec<Vec<usize>>,
    weights: Vec<f64>,
    alpha: f64,
) -> PyResult<f64> {
    let theta = theta_pairs(sides, weights, state.inner.space().parts())?;
    func::closed_upper_bound(&state.inner, &theta, alpha).map_err(err)
}

/// Closed lower bound on E for α in [1/2, 1).
#[pyfunction]
fn closed_lower_bound(
    state: &State,
    sides: Vec<Vec<usize>>,
    weights: Vec<f64>,
    alpha: f64,
) -> PyResult<f64> {
    let theta = theta_pairs(sides, weights, state.inner.space().parts())?;
    func::closed_lower_bound(&state.inner, &theta, alpha).map_err(err)
}

/// Per-copy value e_n of the (balanced-tree) family over the given weighted
/// bipartitions.
#[pyfunction]
fn finite_n_log_value(
    state: &State,
    sides: Vec<Vec<usize>>,
    weights: Vec<f64>,
    alpha: f64,
    n: usize,
) -> PyResult<f64> {
    let spec = family_from_theta(sides, weights, state.inner.space().parts(), alpha)?;
    func::finite_n_log_value(&state.inner, &spec, alpha, n).map_err(err)
}

/// Full functional report (sequence, intervals, closed bounds) as a dict.
#[pyfunction]
fn functional_report(
    py: Python<'_>,
    state: &State,
    sides: Vec<Vec<usize>>,
    weights: Vec<f64>,
    alpha: f64,
    n_max: usize,
) -> PyResult<Py<PyAny>> {
    let spec = family_from_theta(sides, weights, state.inner.space().parts(), alpha)?;
    let report = func::estimate_upper(&state.inner, &spec, alpha, n_max).map_err(err)?;
    let value = serde_json::to_value(&report)
        .map_err(|e| PyValueError::new_err(format!("serialization failed: {e}")))?;
    json_to_py(py, &value)
}

/// Verifies the family axioms for the bipartite family on the given local
/// dimensions; returns the structured report as a dict.
#[pyfunction]
fn verify_bipartite_axioms(
    py: Python<'_>,
    dims: Vec<usize>,
    alpha: f64,
    m: usize,
    n: usize,
) -> PyResult<Py<PyAny>> {
    let space = SpaceSpec::new(dims).map_err(err)?;
    let spec = FamilySpec::bipartite(Bipartition::elementary(0, space.parts()).map_err(err)?);
    let cfg = AxiomConfig {
        m,
        n,
        alpha,
        ..AxiomConfig::default()
    };
    let report = observables::verify_axioms(&spec, &space, None, &cfg).map_err(err)?;
    let value = serde_json::to_value(&report)
        .map_err(|e| PyValueError::new_err(format!("serialization failed: {e}")))?;
    json_to_py(py, &value)
}

/// Verifies the axioms for the geometric mean of the k elementary
/// bipartition families on k qubits.
#[pyfunction]
fn verify_elementary_gmean_axioms(
    py: Python<'_>,
    k: usize,
    alpha: f64,
    m: usize,
    n: usize,
) -> PyResult<Py<PyAny>> {
    let space = SpaceSpec::new(vec![2; k]).map_err(err)?;
    let spec = FamilySpec::elementary_gmean(k, alpha, None).map_err(err)?;
    let cfg = AxiomConfig {
        m,
        n,
        alpha,
        ..AxiomConfig::default()
    };
    let report = observables::verify_axioms(&spec, &space, None, &cfg).map_err(err)?;
    let value = serde_json::to_value(&report)
        .map_err(|e| PyValueError::new_err(format!("serialization failed: {e}")))?;
    json_to_py(py, &value)
}

/// Weighted two-variable geometric mean A #_t B on dense complex matrices
/// given as nested lists (t is the weight of A).
#[pyfunction]
fn gmean_pair(
    a: Vec<Vec<Complex64>>,
    b: Vec<Vec<Complex64>>,
    t: f64,
) -> PyResult<Vec<Vec<Complex64>>> {
    let to_matrix = |rows: &Vec<Vec<Complex64>>| -> PyResult<PsdMatrix> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("matrix must be square"));
        }
        let m = entmon::CMat::from_fn(n, n, |i, j| rows[i][j]);
        PsdMatrix::new(m).map_err(err)
    };
    let g = gmean::gmean_pair(&to_matrix(&a)?, &to_matrix(&b)?, t, GMeanMode::Auto).map_err(err)?;
    let m = g.matrix();
    Ok((0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect())
}

#[pymodule]
fn pyentmon(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<State>()?;
    m.add_function(wrap_pyfunction!(enumerate_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(shannon_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(renyi_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(binary_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(mn_character, m)?)?;
    m.add_function(wrap_pyfunction!(kronecker, m)?)?;
    m.add_function(wrap_pyfunction!(littlewood_richardson, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_dim, m)?)?;
    m.add_function(wrap_pyfunction!(bipartite_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(closed_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(closed_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(finite_n_log_value, m)?)?;
    m.add_function(wrap_pyfunction!(functional_report, m)?)?;
    m.add_function(wrap_pyfunction!(verify_bipartite_axioms, m)?)?;
    m.add_function(wrap_pyfunction!(verify_elementary_gmean_axioms, m)?)?;
    m.add_function(wrap_pyfunction!(gmean_pair, m)?)?;
    Ok(())
}
