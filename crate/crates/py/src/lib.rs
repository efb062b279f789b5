//! Python bindings. Field elements are ints, tuples are "c0:c1:c2:c3" hex
//! strings, and structured results come back as dicts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use quadbct_core::family::{self, Coeffs};
use quadbct_core::machinery::{self, BetaMode};
use quadbct_core::sbox::{self, BctMethod, SboxTable};
use quadbct_core::search::{self as campaign, BaselineFamily, BetaPolicy, SearchConfig};
use quadbct_core::suites::{self, Suite, SuiteOptions};
use quadbct_core::{Elem, Error};

fn err(e: Error) -> PyErr {
    match e {
        Error::Consistency(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn parse_tuple(field: &quadbct_core::Field, c: &str) -> PyResult<Coeffs> {
    let c: Coeffs = c.parse().map_err(err)?;
    if !c.in_field(field) {
        return Err(PyValueError::new_err(format!("tuple {c} is not over GF(2^{})", field.n())));
    }
    Ok(c)
}

fn parse_method(method: &str) -> PyResult<BctMethod> {
    match method {
        "lqsl" => Ok(BctMethod::Lqsl),
        "definitional" => Ok(BctMethod::Definitional),
        _ => Err(PyValueError::new_err(format!("unknown BCT method {method:?}"))),
    }
}

fn sbox_from(values: Vec<u32>) -> PyResult<SboxTable> {
    let n = values.len().trailing_zeros();
    if values.len() != 1 << n {
        return Err(PyValueError::new_err("table length must be a power of two"));
    }
    SboxTable::new(n, values).map_err(err)
}

/// GF(2^(2m)) with Frobenius exponent k.
#[pyclass(frozen)]
struct Field {
    inner: quadbct_core::Field,
}

impl Field {
    fn elem(&self, x: u32) -> PyResult<Elem> {
        let e = Elem(x);
        if self.inner.contains(e) {
            Ok(e)
        } else {
            Err(PyValueError::new_err(format!("{x} is not an element of GF(2^{})", self.inner.n())))
        }
    }
}

#[pymethods]
impl Field {
    #[new]
    fn new(m: u32, k: u32) -> PyResult<Self> {
        Ok(Field {
            inner: quadbct_core::Field::new(m, k).map_err(err)?,
        })
    }

    #[getter]
    fn m(&self) -> u32 {
        self.inner.m()
    }

    #[getter]
    fn k(&self) -> u32 {
        self.inner.k_input()
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }

    #[getter]
    fn modulus(&self) -> u64 {
        self.inner.modulus()
    }

    fn info<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.info())
    }

    fn mul(&self, x: u32, y: u32) -> PyResult<u32> {
        Ok(self.inner.mul(self.elem(x)?, self.elem(y)?).0)
    }

    fn inv(&self, x: u32) -> PyResult<u32> {
        Ok(self.inner.inv(self.elem(x)?).map_err(err)?.0)
    }

    fn pow(&self, x: u32, e: u64) -> PyResult<u32> {
        Ok(self.inner.pow(self.elem(x)?, e).0)
    }

    fn conj(&self, x: u32) -> PyResult<u32> {
        Ok(self.inner.conj(self.elem(x)?).0)
    }

    fn frob(&self, x: u32, j: u32) -> PyResult<u32> {
        Ok(self.inner.frob(self.elem(x)?, j).0)
    }

    fn abs_trace(&self, x: u32) -> PyResult<u8> {
        Ok(self.inner.abs_trace(self.elem(x)?))
    }

    /// Roots of `x^(2^k) + x = a`, sorted.
    fn solve_artin_schreier(&self, a: u32) -> PyResult<Vec<u32>> {
        let roots = self.inner.solve_artin_schreier(self.elem(a)?, self.inner.k()).map_err(err)?;
        Ok(roots.into_iter().map(|r| r.0).collect())
    }

    /// `f_c(x)` for the tuple `c`.
    fn eval(&self, c: &str, x: u32) -> PyResult<u32> {
        Ok(family::eval_f(&self.inner, &parse_tuple(&self.inner, c)?, self.elem(x)?).0)
    }

    fn __repr__(&self) -> String {
        format!(
            "Field(m={}, k={}, modulus=0x{:x})",
            self.inner.m(),
            self.inner.k_input(),
            self.inner.modulus()
        )
    }
}

/// `{"verdict": ..., "reasons": [...]}` for a tuple.
#[pyfunction]
fn classify<'py>(py: Python<'py>, field: &Field, c: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &family::classify(&field.inner, &parse_tuple(&field.inner, c)?))
}

/// `(t1, t2, t3, t4)` for a tuple.
#[pyfunction]
fn thetas(field: &Field, c: &str) -> PyResult<(u32, u32, u32, u32)> {
    let t = family::Thetas::compute(&field.inner, &parse_tuple(&field.inner, c)?);
    Ok((t.t1.0, t.t2.0, t.t3.0, t.t4.0))
}

/// Full verdict for a tuple; `beta=False` skips the BCT and structural checks.
#[pyfunction]
#[pyo3(signature = (field, c, beta = true))]
fn analyze<'py>(py: Python<'py>, field: &Field, c: &str, beta: bool) -> PyResult<Bound<'py, PyAny>> {
    let c = parse_tuple(&field.inner, c)?;
    let mode = if beta { BetaMode::Full } else { BetaMode::Skip };
    let v = py.detach(|| machinery::verify_theorem(&field.inner, &c, mode));
    to_py(py, &v)
}

#[pyfunction]
fn sbox_table(field: &Field, c: &str) -> PyResult<Vec<u32>> {
    let t = sbox::build_table(&field.inner, &parse_tuple(&field.inner, c)?);
    Ok(t.table().to_vec())
}

#[pyfunction]
fn is_permutation(table: Vec<u32>) -> bool {
    sbox::is_permutation(&table)
}

#[pyfunction]
fn differential_uniformity(py: Python<'_>, table: Vec<u32>) -> PyResult<u32> {
    let t = sbox_from(table)?;
    Ok(py.detach(|| sbox::differential_uniformity(t.table())))
}

/// Full DDT, `ddt[a][b]`.
#[pyfunction]
fn ddt(py: Python<'_>, table: Vec<u32>) -> PyResult<Vec<Vec<u32>>> {
    let t = sbox_from(table)?;
    let d = py.detach(|| sbox::ddt(&t, true)).map_err(err)?;
    d.full_table.ok_or_else(|| PyValueError::new_err("table too large for a full DDT"))
}

/// Full BCT, `bct[a][b]`, by the "lqsl" (pair counting) or "definitional" method.
#[pyfunction]
#[pyo3(signature = (table, method = "lqsl"))]
fn bct(py: Python<'_>, table: Vec<u32>, method: &str) -> PyResult<Vec<Vec<u32>>> {
    let t = sbox_from(table)?;
    let method = parse_method(method)?;
    py.detach(|| sbox::bct_rows(&t, method)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (table, method = "lqsl"))]
fn boomerang_uniformity(py: Python<'_>, table: Vec<u32>, method: &str) -> PyResult<u32> {
    let t = sbox_from(table)?;
    let method = parse_method(method)?;
    Ok(py.detach(|| sbox::bct(&t, method, false)).map_err(err)?.uniformity)
}

/// Solution count of `x^(2^k) + tau xb + (tau + 1) x + nu = 0` from the
/// closed-form criteria.
#[pyfunction]
fn lemma_core<'py>(py: Python<'py>, field: &Field, tau: u32, nu: u32) -> PyResult<Bound<'py, PyAny>> {
    let v = machinery::lemma_core_criteria(&field.inner, field.elem(tau)?, field.elem(nu)?).map_err(err)?;
    to_py(py, &v)
}

/// The same count by exhaustive evaluation.
#[pyfunction]
fn lemma_core_brute<'py>(py: Python<'py>, field: &Field, tau: u32, nu: u32) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &machinery::lemma_core_oracle(&field.inner, field.elem(tau)?, field.elem(nu)?))
}

/// Gold (`family="gold"`, needs `t`) or inverse baseline over GF(2^(2m)).
#[pyfunction]
#[pyo3(signature = (family, m, t = None))]
fn baseline<'py>(py: Python<'py>, family: &str, m: u32, t: Option<u32>) -> PyResult<Bound<'py, PyAny>> {
    let fam = match family {
        "gold" => BaselineFamily::Gold,
        "inverse" => BaselineFamily::Inverse,
        _ => return Err(PyValueError::new_err(format!("unknown family {family:?}"))),
    };
    let r = py.detach(|| campaign::baseline(fam, m, t)).map_err(err)?;
    to_py(py, &r)
}

/// Runs a self-check suite ("field", "lemma-core", "identities", "vi", "theorem").
#[pyfunction]
#[pyo3(signature = (suite, field, seed = 0, samples = None))]
fn run_suite<'py>(
    py: Python<'py>,
    suite: &str,
    field: &Field,
    seed: u64,
    samples: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let suite: Suite = suite.parse().map_err(err)?;
    let opts = SuiteOptions {
        seed,
        samples: samples.unwrap_or(suite.default_samples()),
    };
    let r = py.detach(|| suites::run_suite(suite, &field.inner, &opts)).map_err(err)?;
    to_py(py, &r)
}

/// Campaign summary. `mode` is "exhaustive", "sample" or "gamma_sample";
/// `beta_policy` is "all", "first_n" or "skip".
#[pyfunction]
#[pyo3(signature = (m, k, mode = "sample", samples = 1000, seed = 0, beta_policy = "first_n", first_n = 1000, out = None))]
#[allow(clippy::too_many_arguments)]
fn search<'py>(
    py: Python<'py>,
    m: u32,
    k: u32,
    mode: &str,
    samples: u64,
    seed: u64,
    beta_policy: &str,
    first_n: usize,
    out: Option<std::path::PathBuf>,
) -> PyResult<Bound<'py, PyAny>> {
    let mut cfg = match mode {
        "exhaustive" => SearchConfig::exhaustive(m, k),
        "sample" => SearchConfig::sample(m, k, samples, seed),
        "gamma_sample" => SearchConfig::gamma_sample(m, k, samples, seed),
        _ => return Err(PyValueError::new_err(format!("unknown mode {mode:?}"))),
    };
    cfg.seed = seed;
    cfg.first_n = first_n;
    cfg.output_path = out;
    cfg.beta_policy = match beta_policy {
        "all" => BetaPolicy::All,
        "first_n" => BetaPolicy::FirstN,
        "skip" => BetaPolicy::Skip,
        _ => return Err(PyValueError::new_err(format!("unknown beta policy {beta_policy:?}"))),
    };
    let s = py.detach(|| campaign::run_campaign(&cfg)).map_err(err)?;
    to_py(py, &s)
}

#[pymodule]
fn quadbct(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Field>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(thetas, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(sbox_table, m)?)?;
    m.add_function(wrap_pyfunction!(is_permutation, m)?)?;
    m.add_function(wrap_pyfunction!(differential_uniformity, m)?)?;
    m.add_function(wrap_pyfunction!(ddt, m)?)?;
    m.add_function(wrap_pyfunction!(bct, m)?)?;
    m.add_function(wrap_pyfunction!(boomerang_uniformity, m)?)?;
    m.add_function(wrap_pyfunction!(lemma_core, m)?)?;
    m.add_function(wrap_pyfunction!(lemma_core_brute, m)?)?;
    m.add_function(wrap_pyfunction!(baseline, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    Ok(())
}
