//! Python bindings. Exact values cross the boundary as `fractions.Fraction`;
//! rational inputs may be `Fraction`, `int` or a string such as `"3/8"`.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use onedep::catalog::{build, ProcessName};
use onedep::connectivity;
use onedep::exact::rational::{self, Rational};
use onedep::exact::RationalMatrix;
use onedep::groupcarries::{builtin_setup, carries_a_sequence, carries_spec, multiply_column, CentralExtensionSetup};
use onedep::onedep::{
    correlation, distribution, kernel_stationary, particle_hole, pattern_probability, validate_spec, OneDepSpec,
    Pattern, SpecFile,
};
use onedep::oracle::{oracle_distribution, OracleModel, DEFAULT_BUDGET};
use onedep::stats;

fn err(e: onedep::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((rational::format(r),))
}

fn fractions<'py>(py: Python<'py>, rs: &[Rational]) -> PyResult<Vec<Bound<'py, PyAny>>> {
    rs.iter().map(|r| fraction(py, r)).collect()
}

fn matrix<'py>(py: Python<'py>, m: &RationalMatrix) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| fraction(py, &m[(i, j)])).collect())
        .collect()
}

fn parse_rational(v: &Bound<'_, PyAny>) -> PyResult<Rational> {
    rational::parse(&v.str()?.to_string()).map_err(err)
}

fn pattern_arg(n: usize, v: &Bound<'_, PyAny>) -> PyResult<Pattern> {
    if let Ok(s) = v.extract::<String>() {
        let p = Pattern::parse(&s).map_err(err)?;
        if p.horizon() != n {
            return Err(PyValueError::new_err(format!("pattern has horizon {}, process has {n}", p.horizon())));
        }
        return Ok(p);
    }
    let ones: Vec<usize> = v.extract()?;
    Pattern::from_ones(n, &ones).map_err(err)
}

fn model_source(model: &str) -> PyResult<Option<CentralExtensionSetup>> {
    match model.strip_prefix("group:") {
        Some(name) => builtin_setup(name).map(Some).map_err(err),
        None => Ok(None),
    }
}

/// A one-dependent determinantal process on a fixed horizon.
#[pyclass(name = "Process", module = "pyonedep", skip_from_py_object)]
#[derive(Clone)]
struct PyProcess {
    spec: OneDepSpec,
    label: String,
}

#[pymethods]
impl PyProcess {
    /// `model` is a catalog name such as `carries:b=10` or
    /// `descents:mallows:q=1/2`, or `group:<builtin>` such as `group:q8`.
    #[new]
    fn new(model: &str, n: usize) -> PyResult<Self> {
        let spec = match model_source(model)? {
            Some(setup) => carries_spec(&setup, n),
            None => {
                let name: ProcessName = model.parse().map_err(err)?;
                build(&name, n)
            }
        }
        .map_err(err)?;
        Ok(Self { spec, label: model.to_string() })
    }

    /// Stationary process from `a_1, a_2, ..` where `a_i` is the probability
    /// of `i - 1` consecutive zeros.
    #[staticmethod]
    #[pyo3(signature = (a, n, tail_zero = false))]
    fn from_a(a: Vec<Bound<'_, PyAny>>, n: usize, tail_zero: bool) -> PyResult<Self> {
        let a = a.iter().map(parse_rational).collect::<PyResult<Vec<_>>>()?;
        let spec = OneDepSpec::stationary_a(a, tail_zero, n).map_err(err)?;
        Ok(Self { spec, label: "a-sequence".into() })
    }

    /// Stationary process from a raw `e(0), e(1), ..` sequence.
    #[staticmethod]
    fn from_e(e: Vec<Bound<'_, PyAny>>, n: usize) -> PyResult<Self> {
        let e = e.iter().map(parse_rational).collect::<PyResult<Vec<_>>>()?;
        let spec = OneDepSpec::stationary_e(e, n).map_err(err)?;
        Ok(Self { spec, label: "e-sequence".into() })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let spec = SpecFile::from_json(text).and_then(SpecFile::into_spec).map_err(err)?;
        Ok(Self { spec, label: "spec-file".into() })
    }

    fn to_json(&self) -> String {
        SpecFile::from_spec(&self.spec).to_json()
    }

    #[getter]
    fn horizon(&self) -> usize {
        self.spec.horizon()
    }

    #[getter]
    fn label(&self) -> &str {
        &self.label
    }

    fn with_horizon(&self, n: usize) -> PyResult<Self> {
        let spec = self.spec.with_horizon(n).map_err(err)?;
        Ok(Self { spec, label: self.label.clone() })
    }

    /// Probability of a full pattern, given as a 0/1 string of length
    /// `n - 1` or as the list of sites that are ones.
    fn probability<'py>(&self, py: Python<'py>, pattern: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        let p = pattern_arg(self.spec.horizon(), pattern)?;
        fraction(py, &pattern_probability(&self.spec, &p).map_err(err)?)
    }

    /// Probability that every listed site is a one.
    fn correlation<'py>(&self, py: Python<'py>, sites: Vec<usize>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &correlation(&self.spec, &sites).map_err(err)?)
    }

    fn distribution<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let out = PyDict::new(py);
        for (p, v) in distribution(&self.spec).map_err(err)? {
            out.set_item(p.to_string(), fraction(py, &v)?)?;
        }
        Ok(out)
    }

    /// Kernel on sites `1..n-1`, as a list of rows.
    fn kernel<'py>(&self, py: Python<'py>) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        matrix(py, &stats::site_kernel(&self.spec).map_err(err)?)
    }

    /// `k(m)` for `lo <= m <= hi` of the stationary kernel.
    fn kernel_values<'py>(&self, py: Python<'py>, lo: i64, hi: i64) -> PyResult<Vec<Bound<'py, PyAny>>> {
        let k = kernel_stationary(&self.spec, hi.max(0)).map_err(err)?;
        let values = (lo..=hi).map(|m| k.k(m)).collect::<onedep::Result<Vec<_>>>().map_err(err)?;
        fractions(py, &values)
    }

    /// Coefficients of the generating polynomial of the number of ones.
    fn count_polynomial<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        let k = stats::site_kernel(&self.spec).map_err(err)?;
        fractions(py, stats::count_polynomial(&k).map_err(err)?.coefficients())
    }

    /// Exact mean and variance of the number of ones.
    fn moments<'py>(&self, py: Python<'py>) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
        let k = stats::site_kernel(&self.spec).map_err(err)?;
        let (mean, var) = stats::count_moments(&k).map_err(err)?;
        Ok((fraction(py, &mean)?, fraction(py, &var)?))
    }

    fn particle_hole(&self) -> PyResult<Self> {
        let spec = particle_hole(&self.spec).map_err(err)?;
        Ok(Self { spec, label: format!("particle-hole({})", self.label) })
    }

    /// True when every pattern up to horizon `max_n` has a nonnegative
    /// determinant and each horizon sums to one.
    #[pyo3(signature = (max_n = 8))]
    fn is_valid(&self, max_n: usize) -> PyResult<bool> {
        let spec = if self.spec.horizon() >= max_n {
            self.spec.clone()
        } else {
            self.spec.with_horizon(max_n).map_err(err)?
        };
        Ok(validate_spec(&spec, max_n).map_err(err)?.is_valid())
    }

    fn __repr__(&self) -> String {
        format!("Process('{}', n={})", self.label, self.spec.horizon())
    }
}

/// Brute-force law of a named model on horizon `n`, keyed by pattern.
#[pyfunction]
#[pyo3(signature = (model, n, budget = DEFAULT_BUDGET))]
fn oracle<'py>(py: Python<'py>, model: &str, n: usize, budget: u128) -> PyResult<Bound<'py, PyDict>> {
    let m = match (model, model_source(model)?) {
        ("connectivity", _) => OracleModel::Connectivity,
        (_, Some(setup)) => OracleModel::Group(setup),
        (_, None) => OracleModel::Process(model.parse().map_err(err)?),
    };
    let out = PyDict::new(py);
    for (p, v) in oracle_distribution(&m, n, budget).map_err(err)? {
        out.set_item(p.to_string(), fraction(py, &v)?)?;
    }
    Ok(out)
}

/// Seeded simulation summary: per-site one counts, the count histogram
/// and pattern counts.
#[pyfunction]
fn simulate<'py>(py: Python<'py>, model: &str, n: usize, reps: u64, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let report = match model_source(model)? {
        Some(setup) => stats::simulate_group_carries(&setup, model, n, reps, seed),
        None => stats::simulate_process(&model.parse().map_err(err)?, n, reps, seed),
    }
    .map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("reps", report.reps)?;
    out.set_item("site_ones", report.site_ones.clone())?;
    out.set_item("count_histogram", report.count_histogram.clone())?;
    let patterns: BTreeMap<String, u64> = report
        .pattern_counts
        .iter()
        .map(|(&code, &c)| (Pattern::from_code(n, code).to_string(), c))
        .collect();
    out.set_item("pattern_counts", patterns)?;
    Ok(out)
}

/// Probabilities `a_1, a_2, ..` of runs without carries for a builtin
/// group setup.
#[pyfunction]
fn group_a_sequence<'py>(py: Python<'py>, group: &str, len: usize) -> PyResult<Vec<Bound<'py, PyAny>>> {
    let setup = builtin_setup(group).map_err(err)?;
    fractions(py, &carries_a_sequence(&setup, len))
}

/// Carries, as group element names, when multiplying a column of coset
/// representatives given by name.
#[pyfunction]
fn group_carries(group: &str, column: Vec<String>) -> PyResult<Vec<String>> {
    let setup = builtin_setup(group).map_err(err)?;
    let g = setup.group();
    let labels = column
        .iter()
        .map(|name| {
            g.index_of(name)
                .and_then(|x| setup.reps().iter().position(|&rep| rep == x))
                .ok_or_else(|| PyValueError::new_err(format!("{name} is not a representative")))
        })
        .collect::<PyResult<Vec<_>>>()?;
    let trace = multiply_column(&setup, &labels).map_err(err)?;
    Ok(trace.carries.iter().map(|&c| g.name(c).to_string()).collect())
}

/// Connectivity set of a permutation of `1..=n` in one-line notation.
#[pyfunction]
fn connectivity_set(perm: Vec<usize>) -> PyResult<Vec<usize>> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &v in &perm {
        if v == 0 || v > n || std::mem::replace(&mut seen[v - 1], true) {
            return Err(PyValueError::new_err("not a permutation of 1..n"));
        }
    }
    let zero_based: Vec<usize> = perm.iter().map(|v| v - 1).collect();
    Ok(connectivity::connectivity_set(&zero_based))
}

/// Kernel of the connectivity set on `0..=n`.
#[pyfunction]
fn connectivity_kernel<'py>(py: Python<'py>, n: usize) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
    matrix(py, &connectivity::connectivity_kernel(n).map_err(err)?)
}

/// Standard normal distribution function.
#[pyfunction]
fn phi(x: f64) -> f64 {
    stats::phi(x)
}

#[pymodule]
fn pyonedep(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}

/// Adds the classes and functions to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProcess>()?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(group_a_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(group_carries, m)?)?;
    m.add_function(wrap_pyfunction!(connectivity_set, m)?)?;
    m.add_function(wrap_pyfunction!(connectivity_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
