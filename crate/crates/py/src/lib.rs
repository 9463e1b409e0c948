//! Python bindings: a thin wrapper over the core crate exposing complexes,
//! surgery homology, d-invariants, and cobordism maps. Rational gradings are
//! passed as reduced fraction strings, exactly as in the CLI reports.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use floercone::cone::{cobordism_map, surgery_homology, SurgeryResult};
use floercone::knotcx::{
    builtin_borromean, builtin_staircase, builtin_t34, builtin_unknot, parse_complex,
    serialize_complex,
};
use floercone::report::rational_string;

fn err(e: floercone::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A finite presentation of a knot Floer complex.
#[pyclass(name = "KnotComplex", frozen)]
struct PyKnotComplex {
    inner: floercone::KnotComplex,
}

/// HF⁺ of one surgery in one Spin^c class.
#[pyclass(name = "Surgery", frozen)]
struct PySurgery {
    #[pyo3(get)]
    n: i64,
    #[pyo3(get)]
    i: i64,
    /// tower bottom gradings, as fraction strings
    #[pyo3(get)]
    towers: Vec<String>,
    /// (bottom grading, length) of each finite cyclic piece
    #[pyo3(get)]
    reduced: Vec<(String, u32)>,
    #[pyo3(get)]
    delta: u32,
    #[pyo3(get)]
    width: i64,
}

impl PySurgery {
    fn from_result(res: &SurgeryResult) -> PySurgery {
        PySurgery {
            n: res.n,
            i: res.i,
            towers: res.module.towers().into_iter().map(rational_string).collect(),
            reduced: res
                .module
                .reduced()
                .into_iter()
                .map(|(b, l)| (rational_string(b), l))
                .collect(),
            delta: res.delta_used,
            width: res.width,
        }
    }
}

#[pymethods]
impl PySurgery {
    fn __repr__(&self) -> String {
        format!(
            "Surgery(n={}, i={}, towers={:?}, reduced={:?})",
            self.n, self.i, self.towers, self.reduced
        )
    }
}

/// The two-handle cobordism map H(B_s) → H(X_i(n)) in homology bases.
#[pyclass(name = "Cobordism", frozen)]
struct PyCobordism {
    #[pyo3(get)]
    n: i64,
    #[pyo3(get)]
    s: i64,
    #[pyo3(get)]
    i: i64,
    #[pyo3(get)]
    delta: u32,
    #[pyo3(get)]
    width: i64,
    /// matrix[k] lists the target classes hit by source class k
    #[pyo3(get)]
    matrix: Vec<Vec<usize>>,
    #[pyo3(get)]
    source_gradings: Vec<i64>,
    #[pyo3(get)]
    target_gradings: Vec<i64>,
}

#[pymethods]
impl PyKnotComplex {
    /// Parse a complex from its JSON document.
    #[staticmethod]
    fn from_json(document: &str) -> PyResult<PyKnotComplex> {
        Ok(PyKnotComplex { inner: parse_complex(document).map_err(err)? })
    }

    fn to_json(&self) -> String {
        serialize_complex(&self.inner)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn generator_count(&self) -> usize {
        self.inner.generator_count()
    }

    /// All violated invariants; an empty list means the complex is valid.
    fn validate(&self) -> Vec<String> {
        self.inner.validate().violations
    }

    /// HF⁺ of n-surgery. With `spinc=None` and n ≠ 0, computes every Spin^c
    /// class; n = 0 requires an explicit class.
    #[pyo3(signature = (n, spinc=None, delta=None, width=None))]
    fn surgery(
        &self,
        n: i64,
        spinc: Option<i64>,
        delta: Option<u32>,
        width: Option<i64>,
    ) -> PyResult<Vec<PySurgery>> {
        let classes: Vec<i64> = match spinc {
            Some(i) => vec![i],
            None if n != 0 => (0..n.abs()).collect(),
            None => {
                return Err(PyValueError::new_err(
                    "n = 0 has infinitely many Spin^c classes; give spinc",
                ))
            }
        };
        classes
            .into_iter()
            .map(|i| {
                surgery_homology(&self.inner, n, i, delta, width)
                    .map(|res| PySurgery::from_result(&res))
                    .map_err(err)
            })
            .collect()
    }

    /// d-invariants of n-surgery (n ≠ 0), as {spinc: [fraction strings]}.
    fn d_invariants(&self, n: i64) -> PyResult<BTreeMap<i64, Vec<String>>> {
        Ok(floercone::gradings::d_invariants(&self.inner, n)
            .map_err(err)?
            .into_iter()
            .map(|(i, ts)| (i, ts.into_iter().map(rational_string).collect()))
            .collect())
    }

    /// The two-handle cobordism map labelled by s (must lie in the B-window).
    #[pyo3(signature = (n, s, delta=None, width=None))]
    fn cobordism(
        &self,
        n: i64,
        s: i64,
        delta: Option<u32>,
        width: Option<i64>,
    ) -> PyResult<PyCobordism> {
        let map = cobordism_map(&self.inner, n, s, delta, width).map_err(err)?;
        Ok(PyCobordism {
            n: map.n,
            s: map.s,
            i: map.i,
            delta: map.delta,
            width: map.width,
            matrix: map.matrix,
            source_gradings: map.source_gradings,
            target_gradings: map.target_gradings,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "KnotComplex(name={:?}, generators={})",
            self.inner.name,
            self.inner.generator_count()
        )
    }
}

/// Built-in complexes: "unknot", "t34", "staircase:1,2,2,1", "borromean:G".
#[pyfunction]
fn builtin(name: &str) -> PyResult<PyKnotComplex> {
    let inner = match name.split_once(':') {
        None => match name {
            "unknot" => builtin_unknot(),
            "t34" => builtin_t34(),
            _ => return Err(PyValueError::new_err(format!("unknown builtin '{name}'"))),
        },
        Some(("staircase", steps)) => {
            let steps: Vec<u64> = steps
                .split(',')
                .map(|t| t.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| PyValueError::new_err("staircase steps must be positive integers"))?;
            builtin_staircase(&steps).map_err(err)?
        }
        Some(("borromean", g)) => {
            let g: u32 = g
                .parse()
                .ok()
                .filter(|&g| (1..=8).contains(&g))
                .ok_or_else(|| PyValueError::new_err("borromean genus must be between 1 and 8"))?;
            builtin_borromean(g)
        }
        Some(_) => return Err(PyValueError::new_err(format!("unknown builtin '{name}'"))),
    };
    Ok(PyKnotComplex { inner })
}

#[pymodule]
fn floercone_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyKnotComplex>()?;
    m.add_class::<PySurgery>()?;
    m.add_class::<PyCobordism>()?;
    m.add_function(wrap_pyfunction!(builtin, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
