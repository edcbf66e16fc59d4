//! Python bindings. Classes carry their model, so `x + y` and `x * y` work
//! directly on parsed values.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use deligne_core::checker;
use deligne_core::cv_map;
use deligne_core::expr::{format_class, parse_class};
use deligne_core::lfactor;
use deligne_core::weil_model::ModelConfig;
use deligne_core::{DeligneClass, Error, WeilModel};

create_exception!(deligne, DeligneError, PyValueError, "Domain error; `args[0]` is the error code.");

fn err(e: Error) -> PyErr {
    DeligneError::new_err((e.code(), e.to_string()))
}

#[pyclass(name = "Model", module = "deligne", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyModel {
    inner: Arc<WeilModel>,
}

#[pymethods]
impl PyModel {
    /// One of "m0", "m1", "m2".
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        WeilModel::builtin(&name.to_ascii_lowercase())
            .map(|m| PyModel { inner: Arc::new(m) })
            .ok_or_else(|| err(Error::InvalidArgument(format!("no built-in model {name:?}"))))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let m = ModelConfig::from_json(text).and_then(|c| c.build()).map_err(err)?;
        Ok(PyModel { inner: Arc::new(m) })
    }

    #[staticmethod]
    #[pyo3(signature = (ell, q, tame_orders = Vec::new(), field_degree = 1))]
    fn character(ell: u64, q: i64, tame_orders: Vec<u32>, field_degree: u32) -> PyResult<Self> {
        let m = WeilModel::character(ell, q, &tame_orders, field_degree).map_err(err)?;
        Ok(PyModel { inner: Arc::new(m) })
    }

    #[getter]
    fn ell(&self) -> u64 {
        self.inner.ell()
    }

    #[getter]
    fn e(&self) -> u32 {
        self.inner.e()
    }

    fn atoms(&self) -> Vec<String> {
        self.inner.atom_ids().map(|a| self.inner.name(a).to_string()).collect()
    }

    fn lines(&self) -> Vec<Vec<String>> {
        self.inner
            .lines()
            .into_iter()
            .map(|l| l.members.iter().map(|&a| self.inner.name(a).to_string()).collect())
            .collect()
    }

    /// Violated invariants; empty when the model is consistent.
    fn validate(&self) -> Vec<String> {
        let report = self.inner.validate();
        if report.is_ok() {
            Vec::new()
        } else {
            report.to_string().lines().map(str::to_string).collect()
        }
    }

    fn config_json(&self) -> String {
        serde_json::to_string(self.inner.config()).expect("config serializes")
    }

    fn parse(&self, expr: &str) -> PyResult<PyClass> {
        let x = parse_class(&self.inner, expr).map_err(err)?;
        Ok(PyClass { model: self.inner.clone(), x })
    }

    fn zero(&self) -> PyClass {
        PyClass { model: self.inner.clone(), x: DeligneClass::zero() }
    }

    fn __repr__(&self) -> String {
        format!("Model({})", self.config_json())
    }
}

#[pyclass(name = "DeligneClass", module = "deligne", frozen)]
struct PyClass {
    model: Arc<WeilModel>,
    x: DeligneClass,
}

impl PyClass {
    fn wrap(&self, x: DeligneClass) -> PyClass {
        PyClass { model: self.model.clone(), x }
    }

    fn same_model(&self, other: &PyClass) -> PyResult<()> {
        if Arc::ptr_eq(&self.model, &other.model) || self.model.config() == other.model.config() {
            Ok(())
        } else {
            Err(err(Error::InvalidArgument("classes belong to different models".into())))
        }
    }
}

#[pymethods]
impl PyClass {
    fn __str__(&self) -> String {
        format_class(&self.model, &self.x)
    }

    fn __repr__(&self) -> String {
        format!("DeligneClass({:?})", self.__str__())
    }

    fn __eq__(&self, other: &PyClass) -> bool {
        self.same_model(other).is_ok() && self.x == other.x
    }

    fn __hash__(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.x.hash(&mut h);
        h.finish()
    }

    /// Direct sum.
    fn __add__(&self, other: &PyClass) -> PyResult<PyClass> {
        self.same_model(other)?;
        Ok(self.wrap(self.x.direct_sum(&other.x)))
    }

    /// Semisimple tensor product.
    fn __mul__(&self, other: &PyClass) -> PyResult<PyClass> {
        self.same_model(other)?;
        Ok(self.wrap(self.x.tensor(&other.x, &self.model).map_err(err)?))
    }

    #[getter]
    fn dim(&self) -> u64 {
        self.x.dim(&self.model)
    }

    fn is_nilpotent(&self) -> bool {
        self.x.is_nilpotent()
    }

    fn is_c_parameter(&self) -> bool {
        cv_map::is_c_parameter(&self.model, &self.x)
    }

    fn dual(&self) -> PyClass {
        self.wrap(self.x.dual(&self.model))
    }

    fn cv(&self) -> PyResult<PyClass> {
        Ok(self.wrap(cv_map::cv(&self.model, &self.x).map_err(err)?))
    }

    fn cv_inverse(&self) -> PyResult<PyClass> {
        Ok(self.wrap(cv_map::cv_inverse(&self.model, &self.x).map_err(err)?))
    }

    /// Euler factor as text, e.g. "1/(1 - X)".
    fn lfactor(&self) -> String {
        lfactor::l_class(&self.model, &self.x).to_string()
    }

    fn lpair(&self, other: &PyClass) -> PyResult<String> {
        self.same_model(other)?;
        Ok(lfactor::l_pair(&self.model, &self.x, &other.x).map_err(err)?.to_string())
    }

    /// `(summand, multiplicity)` pairs in canonical order.
    fn parts(&self) -> Vec<(String, u64)> {
        self.x
            .parts()
            .map(|(i, n)| (format_class(&self.model, &DeligneClass::single(*i)), n))
            .collect()
    }
}

/// Certificates of one suite as JSON strings.
#[pyfunction]
#[pyo3(signature = (model, suite = "all", seed = 0, max_len = 3, max_parts = 3))]
fn check(model: &PyModel, suite: &str, seed: u64, max_len: u32, max_parts: u64) -> PyResult<Vec<String>> {
    let m = &model.inner;
    let all = suite == "all";
    let known = ["all", "prop_observation_1", "forced_cv", "semiring_corollary", "image_exclusion"];
    if !known.contains(&suite) {
        return Err(err(Error::InvalidArgument(format!("unknown suite {suite:?}"))));
    }
    let mut out = Vec::new();
    if all || suite == "prop_observation_1" {
        for line in m.lines() {
            out.push(checker::check_prop_observation1(m, line.anchor()).map_err(err)?);
        }
    }
    if all || suite == "forced_cv" {
        out.push(checker::derive_forced_cv(m, max_len, max_parts).map_err(err)?.certificate);
    }
    if all || suite == "semiring_corollary" {
        out.push(checker::check_semiring_corollary(m, 1000, seed).map_err(err)?);
    }
    if all || suite == "image_exclusion" {
        out.push(checker::check_image_exclusion(m, 3).map_err(err)?);
    }
    Ok(out.iter().map(|c| c.to_json_line()).collect())
}

#[pymodule]
fn deligne(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyClass>()?;
    m.add("DeligneError", m.py().get_type::<DeligneError>())?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    Ok(())
}
