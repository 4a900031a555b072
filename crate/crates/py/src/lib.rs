//! Python module `indexfiber`.
//!
//! Indices may be Python ints or rational strings such as `"-3/2"` (exact),
//! or floats and complex numbers (inexact). A tuple `(re, im)` of exact parts
//! gives an exact Gaussian rational.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyDict, PyFloat, PyInt, PyString, PyTuple};
use serde_json::{json, Value};

use indexfiber_core::fiber::{self, FiberReport};
use indexfiber_core::index::{build_map, spectrum_of, IndexSpectrum, MultiplicityProfile};
use indexfiber_core::problem::{parse_index, IndexValue};
use indexfiber_core::psi;
use indexfiber_core::report::{report_exit_code, report_json, to_canonical_string};
use indexfiber_core::selftest::{run_selftest, SelftestOptions};
use indexfiber_core::solver::{Backend, Classification, SolverConfig};
use indexfiber_core::Error;

create_exception!(indexfiber, IndexFiberError, PyException, "Numerical or verification failure.");

fn to_py_err(err: Error) -> PyErr {
    match err {
        Error::Argument(_) | Error::Parse(_) => PyValueError::new_err(err.to_string()),
        other => IndexFiberError::new_err(other.to_string()),
    }
}

fn profile_of(parts: Vec<usize>) -> PyResult<MultiplicityProfile> {
    MultiplicityProfile::new(parts).map_err(to_py_err)
}

fn exact_part(obj: &Bound<'_, PyAny>) -> PyResult<Value> {
    if obj.is_instance_of::<PyInt>() {
        let v: i64 = obj.extract()?;
        Ok(json!(v))
    } else if obj.is_instance_of::<PyString>() {
        let s: String = obj.extract()?;
        Ok(json!(s))
    } else if obj.is_instance_of::<PyFloat>() {
        let v: f64 = obj.extract()?;
        Ok(json!(v))
    } else {
        Err(PyValueError::new_err("index parts must be int, float or rational string"))
    }
}

fn index_value(obj: &Bound<'_, PyAny>) -> PyResult<IndexValue> {
    let value = if obj.is_instance_of::<PyComplex>() {
        let z: Complex64 = obj.extract()?;
        return Ok(IndexValue::Float(z));
    } else if obj.is_instance_of::<PyTuple>() {
        let t = obj.cast::<PyTuple>()?;
        if t.len() != 2 {
            return Err(PyValueError::new_err("complex index tuples need exactly (re, im)"));
        }
        json!({"re": exact_part(&t.get_item(0)?)?, "im": exact_part(&t.get_item(1)?)?})
    } else {
        exact_part(obj)?
    };
    parse_index(&value).map_err(to_py_err)
}

fn spectrum(profile: &MultiplicityProfile, indices: &Bound<'_, PyAny>) -> PyResult<IndexSpectrum> {
    let mut values = Vec::new();
    for item in indices.try_iter()? {
        values.push(index_value(&item?)?);
    }
    if values.iter().all(|v| matches!(v, IndexValue::Exact(_))) {
        let exact = values
            .into_iter()
            .map(|v| match v {
                IndexValue::Exact(g) => g,
                IndexValue::Float(_) => unreachable!(),
            })
            .collect();
        IndexSpectrum::exact(profile.clone(), exact).map_err(to_py_err)
    } else {
        IndexSpectrum::approximate(profile.clone(), values.iter().map(IndexValue::to_c64).collect()).map_err(to_py_err)
    }
}

fn solver_config(
    seed: Option<u64>,
    backend: &str,
    tol_dedup: f64,
    tol_coincide: f64,
    threads: Option<usize>,
) -> PyResult<SolverConfig> {
    let defaults = SolverConfig::default();
    Ok(SolverConfig {
        seed: seed.unwrap_or(defaults.seed),
        tol_dedup,
        tol_coincide,
        backend: backend.parse::<Backend>().map_err(to_py_err)?,
        threads,
        retries: defaults.retries,
    })
}

/// Result of counting one fiber.
#[pyclass(frozen, module = "indexfiber")]
struct Fiber {
    report: FiberReport,
    config: SolverConfig,
}

#[pymethods]
impl Fiber {
    #[getter]
    fn mp_count(&self) -> u64 {
        self.report.mp_count
    }

    #[getter]
    fn mc_count(&self) -> u64 {
        self.report.mc_count
    }

    #[getter]
    fn expected_mp(&self) -> u64 {
        self.report.expected_mp
    }

    #[getter]
    fn expected_mc(&self) -> u64 {
        self.report.expected_mc
    }

    #[getter]
    fn s_count(&self) -> usize {
        self.report.s_count
    }

    #[getter]
    fn b_count(&self) -> usize {
        self.report.b_count
    }

    #[getter]
    fn is_generic(&self) -> bool {
        self.report.is_generic()
    }

    #[getter]
    fn stabilizer_order(&self) -> u64 {
        self.report.genericity.stabilizer_order
    }

    #[getter]
    fn notes(&self) -> Vec<String> {
        self.report.notes.clone()
    }

    #[getter]
    fn exit_code(&self) -> i32 {
        report_exit_code(&self.report)
    }

    /// Coefficient lists (lowest degree first) of the monic centered maps.
    #[getter]
    fn representatives(&self) -> Vec<Vec<Complex64>> {
        self.report.representatives.iter().map(|r| r.map.coeffs().to_vec()).collect()
    }

    #[getter]
    fn max_oracle_distance(&self) -> f64 {
        self.report.max_oracle_distance()
    }

    /// Projective solutions as dicts with coordinates, class and coincidence pattern.
    fn solutions<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.report
            .solutions
            .iter()
            .map(|s| {
                let d = PyDict::new(py);
                d.set_item("coords", s.coords.clone())?;
                d.set_item("residual", s.residual)?;
                d.set_item("jacobian_det", s.jacobian_det)?;
                d.set_item(
                    "classification",
                    match s.classification {
                        Classification::S => "S",
                        Classification::B => "B",
                    },
                )?;
                d.set_item("coincidence_pattern", s.coincidence_pattern.clone())?;
                d.set_item("multiplicity", s.multiplicity)?;
                Ok(d)
            })
            .collect()
    }

    /// The canonical JSON report.
    #[pyo3(signature = (with_representatives = true))]
    fn to_json(&self, with_representatives: bool) -> String {
        to_canonical_string(&report_json("enumerate", &self.report, &self.config, with_representatives))
    }

    fn __repr__(&self) -> String {
        format!(
            "Fiber(profile={}, mp_count={}, mc_count={}, generic={})",
            self.report.spectrum.profile(),
            self.report.mp_count,
            self.report.mc_count,
            self.report.is_generic()
        )
    }
}

/// Counts the fiber over `indices` and enumerates its monic centered maps.
#[pyfunction]
#[pyo3(signature = (profile, indices, *, seed = None, backend = "auto", tol_dedup = 1e-8, tol_coincide = 1e-7, threads = None))]
#[allow(clippy::too_many_arguments)]
fn count(
    py: Python<'_>,
    profile: Vec<usize>,
    indices: &Bound<'_, PyAny>,
    seed: Option<u64>,
    backend: &str,
    tol_dedup: f64,
    tol_coincide: f64,
    threads: Option<usize>,
) -> PyResult<Fiber> {
    let profile = profile_of(profile)?;
    let spectrum = spectrum(&profile, indices)?;
    let config = solver_config(seed, backend, tol_dedup, tol_coincide, threads)?;
    let report = py
        .detach(|| fiber::count_fiber(&spectrum, &config))
        .map_err(to_py_err)?;
    Ok(Fiber { report, config })
}

/// `((d-2)!/(d-l)!, (d-1)!/(d-l)!)`.
#[pyfunction]
fn expected_counts(d: usize, ell: usize) -> PyResult<(u64, u64)> {
    fiber::expected_counts(d, ell).map_err(to_py_err)
}

/// Holomorphic indices of `z + rho * prod (z - zeta_i)^{d_i}` at each `zeta_i`.
#[pyfunction]
fn holomorphic_indices(profile: Vec<usize>, zetas: Vec<Complex64>, rho: Complex64) -> PyResult<Vec<Complex64>> {
    let profile = profile_of(profile)?;
    let map = build_map(&profile, zetas, rho).map_err(to_py_err)?;
    Ok(spectrum_of(&map).map_err(to_py_err)?.values().to_vec())
}

/// The psi system as a list of `{exponent tuple: coefficient}` dicts.
#[pyfunction]
fn psi_system<'py>(py: Python<'py>, profile: Vec<usize>, indices: &Bound<'py, PyAny>) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let profile = profile_of(profile)?;
    let spectrum = spectrum(&profile, indices)?;
    let system = psi::assemble_psi(&profile, &spectrum).map_err(to_py_err)?;
    system
        .polys()
        .iter()
        .map(|p| {
            let d = PyDict::new(py);
            for (e, c) in p.terms() {
                d.set_item(PyTuple::new(py, e)?, *c)?;
            }
            Ok(d)
        })
        .collect()
}

/// `(rho, residues)` determined by the fixed points `zetas` and the indices.
#[pyfunction]
fn recover_aux(
    profile: Vec<usize>,
    indices: &Bound<'_, PyAny>,
    zetas: Vec<Complex64>,
) -> PyResult<(Complex64, Vec<Vec<Complex64>>)> {
    let profile = profile_of(profile)?;
    let spectrum = spectrum(&profile, indices)?;
    let aux = psi::recover_aux(&profile, &spectrum, &zetas).map_err(to_py_err)?;
    Ok((aux.rho, aux.residues))
}

/// Rebuilds a random map from its own spectrum; true when it is recovered.
#[pyfunction]
#[pyo3(signature = (profile, seed = 0))]
fn roundtrip(py: Python<'_>, profile: Vec<usize>, seed: u64) -> PyResult<bool> {
    let profile = profile_of(profile)?;
    let outcome = py
        .detach(|| fiber::roundtrip(&profile, seed, &SolverConfig::default()))
        .map_err(to_py_err)?;
    Ok(outcome.success)
}

/// `(check name, passed)` for each built-in check.
#[pyfunction]
#[pyo3(signature = (seed = 1))]
fn selftest(py: Python<'_>, seed: u64) -> Vec<(String, bool)> {
    let options = SelftestOptions { seed, ..Default::default() };
    py.detach(|| run_selftest(&options))
        .into_iter()
        .map(|r| (r.check.name().to_string(), r.passed()))
        .collect()
}

#[pymodule]
pub fn indexfiber(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("IndexFiberError", m.py().get_type::<IndexFiberError>())?;
    m.add_class::<Fiber>()?;
    m.add_function(wrap_pyfunction!(count, m)?)?;
    m.add_function(wrap_pyfunction!(expected_counts, m)?)?;
    m.add_function(wrap_pyfunction!(holomorphic_indices, m)?)?;
    m.add_function(wrap_pyfunction!(psi_system, m)?)?;
    m.add_function(wrap_pyfunction!(recover_aux, m)?)?;
    m.add_function(wrap_pyfunction!(roundtrip, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
