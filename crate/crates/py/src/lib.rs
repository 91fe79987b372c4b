//! Python bindings: table access, basis reconstruction, reflectivity
//! testing, lifting, and classification, with rationals rendered as
//! `num/den` strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use lorkm3::dataset::{self, Dataset};
use lorkm3::jacobi::{JacobiFourier, JacobiRing};
use lorkm3::lattice::LatticeVector;
use lorkm3::{classify, lift, reflective};

fn err(e: lorkm3::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// One two-variable Fourier expansion with exact coefficients.
#[pyclass]
#[derive(Clone)]
struct JacobiForm {
    inner: JacobiFourier,
}

#[pymethods]
impl JacobiForm {
    #[getter]
    fn weight2(&self) -> i64 {
        self.inner.weight2
    }

    #[getter]
    fn index2(&self) -> i64 {
        self.inner.index2
    }

    #[getter]
    fn q_trunc24(&self) -> i64 {
        self.inner.q_trunc24()
    }

    /// Coefficient at integer exponents (n, l) as a `num/den` string.
    fn coeff(&self, n: i64, l: i64) -> PyResult<String> {
        Ok(self.inner.coeff_int(n, l).map_err(err)?.to_string())
    }

    /// Serialized record form (header plus sorted coefficient rows).
    fn to_records(&self) -> String {
        self.inner.to_records()
    }

    #[staticmethod]
    fn from_records(text: &str) -> PyResult<JacobiForm> {
        Ok(JacobiForm { inner: JacobiFourier::from_records(text).map_err(err)? })
    }

    /// Reflectivity report: (is_reflective, violations as (n, l, norm)).
    fn is_reflective(&self) -> PyResult<(bool, Vec<(i64, i64, i64)>)> {
        let rep = reflective::is_reflective(&self.inner).map_err(err)?;
        Ok((rep.reflective, rep.violations.iter().map(|v| (v.n, v.l, v.d)).collect()))
    }

    fn __repr__(&self) -> String {
        format!(
            "JacobiForm(weight2={}, index2={}, terms={})",
            self.inner.weight2,
            self.inner.index2,
            self.inner.terms().len()
        )
    }
}

/// The bundled coefficient tables and everything derived from them.
#[pyclass]
struct Tables {
    ds: Dataset,
}

#[pymethods]
impl Tables {
    #[new]
    #[pyo3(signature = (path=None))]
    fn new(path: Option<String>) -> PyResult<Self> {
        let ds = match path {
            Some(p) => dataset::load_path(std::path::Path::new(&p)).map_err(err)?,
            None => dataset::load_default().map_err(err)?,
        };
        Ok(Tables { ds })
    }

    /// Supported lattice indices t.
    fn supported_t(&self) -> Vec<i64> {
        self.ds.supported_t()
    }

    /// Reconstruct the reflective basis for one index.
    #[pyo3(signature = (t, q_order=None))]
    fn basis(&self, t: i64, q_order: Option<u32>) -> PyResult<Vec<JacobiForm>> {
        let idx = self.ds.index(t).map_err(err)?;
        let ring = JacobiRing::new(q_order.unwrap_or(idx.q_order)).map_err(err)?;
        let forms = reflective::build_basis(idx, &ring).map_err(err)?;
        Ok(forms.into_iter().map(|inner| JacobiForm { inner }).collect())
    }

    /// Lift header for a combination: stable key=value text.
    #[pyo3(signature = (t, combination, q_order=None))]
    fn lift_header(&self, t: i64, combination: Vec<i64>, q_order: Option<u32>) -> PyResult<String> {
        let idx = self.ds.index(t).map_err(err)?;
        let ring = JacobiRing::new(q_order.unwrap_or(idx.q_order)).map_err(err)?;
        let forms = reflective::build_basis(idx, &ring).map_err(err)?;
        let combined = reflective::combine(&forms, &combination).map_err(err)?;
        let lifted = lift::lift(&combined, &classify::class_reps(idx), None).map_err(err)?;
        Ok(lifted.header_text())
    }

    /// Truncated product expansion as sorted exponent/coefficient records.
    #[pyo3(signature = (t, combination, box_n, box_m, q_order=None))]
    fn expand(
        &self,
        t: i64,
        combination: Vec<i64>,
        box_n: i64,
        box_m: i64,
        q_order: Option<u32>,
    ) -> PyResult<String> {
        let idx = self.ds.index(t).map_err(err)?;
        let needed = ((box_n * box_m + 1).max(idx.q_order as i64)) as u32;
        let ring = JacobiRing::new(q_order.unwrap_or(needed)).map_err(err)?;
        let forms = reflective::build_basis(idx, &ring).map_err(err)?;
        let combined = reflective::combine(&forms, &combination).map_err(err)?;
        Ok(lift::expand_product(&combined, box_n, box_m).map_err(err)?.to_records())
    }

    /// Enumerate denominator forms and return per-record summaries:
    /// (combination, name, weight as string, parity, chamber size).
    #[pyo3(signature = (t, lo=0, hi=1, q_order=None))]
    fn classify(
        &self,
        t: i64,
        lo: i64,
        hi: i64,
        q_order: Option<u32>,
    ) -> PyResult<Vec<(Vec<i64>, String, String, i64, usize)>> {
        let idx = self.ds.index(t).map_err(err)?;
        let ring = JacobiRing::new(q_order.unwrap_or(idx.q_order)).map_err(err)?;
        let forms = reflective::build_basis(idx, &ring).map_err(err)?;
        let combos = classify::enumerate_denominator_forms(idx, &forms, lo, hi).map_err(err)?;
        let mut out = Vec::new();
        for c in combos {
            let r = classify::assemble_record(&self.ds, idx, &forms, &c).map_err(err)?;
            out.push((
                r.combination.clone(),
                r.name.clone(),
                r.lift.weight.to_string(),
                r.lift.parity_d.rem_euclid(2),
                r.pm.len(),
            ));
        }
        Ok(out)
    }
}

/// Discriminant -4tnm + l^2 of an integral vector.
#[pyfunction]
fn discriminant(t: i64, n: i64, l: i64, m: i64) -> i64 {
    lorkm3::lattice::discriminant(t, &LatticeVector::from_ints(n, l, m))
}

/// Root test in the index-t lattice.
#[pyfunction]
fn is_root(t: i64, n: i64, l: i64, m: i64) -> bool {
    lorkm3::lattice::is_root(t, &LatticeVector::from_ints(n, l, m))
}

#[pymodule]
fn lorkm3_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<JacobiForm>()?;
    m.add_class::<Tables>()?;
    m.add_function(wrap_pyfunction!(discriminant, m)?)?;
    m.add_function(wrap_pyfunction!(is_root, m)?)?;
    Ok(())
}
