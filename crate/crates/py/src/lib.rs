//! Python bindings: computads and their free algebras, presentations,
//! collections, slices and the topos gate.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use polygraph::computads::Computad as CoreComputad;
use polygraph::freecat::{Bounds, Verdict};
use polygraph::limitlab::computad_topos_gate;
use polygraph::operads::{
    self, eval_analytic, eval_strongly_analytic, known_slice_oracle, slice_of_strict,
    NonSymCollection as CoreNonSym, Presentation as CorePresentation, SymCollection as CoreSym,
};
use polygraph::pasting::enumerate_trees;
use polygraph::report::{free_report, Report};

fn err(e: polygraph::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn bounds(bound: usize, rounds: usize) -> Bounds {
    Bounds { size: bound, max_rounds: rounds, ..Bounds::default() }
}

/// A computad with its saturated free algebra.
#[pyclass(frozen)]
pub struct Computad {
    inner: CoreComputad,
}

#[pymethods]
impl Computad {
    /// Parses the `dim n` / `gen r f : s -> t` text format.
    #[staticmethod]
    #[pyo3(signature = (text, bound = 3, rounds = 32))]
    pub fn parse(text: &str, bound: usize, rounds: usize) -> PyResult<Self> {
        Ok(Computad { inner: CoreComputad::parse(text, bounds(bound, rounds)).map_err(err)? })
    }

    #[getter]
    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn generator_counts(&self) -> Vec<usize> {
        self.inner.generator_counts()
    }

    /// Number of cell classes in each dimension.
    pub fn class_counts(&self) -> Vec<usize> {
        let e = self.inner.free_algebra();
        (0..=self.inner.dim()).map(|d| e.class_count(d)).collect()
    }

    /// Canonical representatives of the classes in one dimension.
    pub fn representatives(&self, dim: usize) -> Vec<String> {
        self.inner.free_algebra().cells(dim).into_iter().map(|c| c.representative.serialize()).collect()
    }

    /// Class of a term, or None when it lies beyond the bound.
    pub fn eval(&self, term: &str) -> PyResult<Option<u32>> {
        let e = self.inner.free_algebra();
        e.eval(&e.parse_term(term).map_err(err)?).map_err(err)
    }

    /// `("equal", steps)`, `("distinct", None)` or `("unknown", None)`.
    /// Equal verdicts are replayed before they are returned.
    pub fn equal_cells(&self, a: &str, b: &str) -> PyResult<(String, Option<usize>)> {
        let e = self.inner.free_algebra();
        let (a, b) = (e.parse_term(a).map_err(err)?, e.parse_term(b).map_err(err)?);
        let v = e.equal_cells(&a, &b).map_err(err)?;
        let label = v.label().to_string();
        match v {
            Verdict::Equal(cert) => {
                cert.replay(e).map_err(PyValueError::new_err)?;
                Ok((label, Some(cert.len())))
            }
            _ => Ok((label, None)),
        }
    }

    pub fn to_text(&self) -> String {
        self.inner.to_text()
    }

    /// The structured report of the `free` command.
    #[pyo3(signature = (cells = 20))]
    pub fn report_json(&self, cells: usize) -> String {
        Report::new("free", self.inner.bounds(), 0, free_report(&self.inner, cells)).to_json()
    }

    fn __repr__(&self) -> String {
        format!("Computad(dim={}, generators={:?})", self.inner.dim(), self.inner.generator_counts())
    }
}

#[pyclass(frozen)]
pub struct Presentation {
    inner: CorePresentation,
}

#[pymethods]
impl Presentation {
    #[staticmethod]
    pub fn parse(text: &str) -> PyResult<Self> {
        Ok(Presentation { inner: CorePresentation::parse(text).map_err(err)? })
    }

    /// `(regular, violation kind, offending equation)`.
    pub fn is_strongly_regular(&self) -> (bool, Option<String>, Option<String>) {
        let v = self.inner.is_strongly_regular();
        match v.witness {
            Some(w) => (false, Some(format!("{:?}", w.kind).to_lowercase()), Some(w.text)),
            None => (true, None, None),
        }
    }

    pub fn to_text(&self) -> String {
        self.inner.to_text()
    }
}

/// Arity-graded sets with symmetric group actions.
#[pyclass(frozen)]
pub struct SymCollection {
    inner: CoreSym,
}

#[pymethods]
impl SymCollection {
    #[staticmethod]
    pub fn parse(text: &str) -> PyResult<Self> {
        Ok(SymCollection { inner: CoreSym::parse(text).map_err(err)? })
    }

    #[staticmethod]
    pub fn commutative(max_arity: usize) -> Self {
        SymCollection { inner: CoreSym::commutative(max_arity) }
    }

    #[staticmethod]
    pub fn regular(max_arity: usize) -> Self {
        SymCollection { inner: CoreSym::regular(max_arity) }
    }

    /// Orbit representatives `(arity, operation, arguments)` over a set of size `x`.
    pub fn eval_analytic(&self, x: usize, arity_bound: usize) -> Vec<(usize, u32, Vec<u32>)> {
        eval_analytic(&self.inner, x, arity_bound).into_iter().map(|m| (m.arity, m.op, m.args)).collect()
    }
}

#[pyclass(frozen)]
pub struct NonSymCollection {
    inner: CoreNonSym,
}

#[pymethods]
impl NonSymCollection {
    #[new]
    pub fn new(counts: Vec<usize>) -> Self {
        NonSymCollection { inner: CoreNonSym::constant(&counts) }
    }

    pub fn eval_strongly_analytic(&self, x: usize, arity_bound: usize) -> Vec<(usize, u32, Vec<u32>)> {
        eval_strongly_analytic(&self.inner, x, arity_bound).into_iter().map(|m| (m.arity, m.op, m.args)).collect()
    }

    /// Whether the free symmetric collection on this one evaluates bijectively.
    pub fn free_symmetric_bijection(&self, x: usize, arity_bound: usize) -> bool {
        operads::free_symmetric_bijection(&self.inner, x, arity_bound).bijective
    }
}

/// Class counts by size of the k-th slice on `generators` generators,
/// with the oracle counts and whether they match.
#[pyfunction]
#[pyo3(signature = (k, generators, bound = 3))]
pub fn slice_counts(k: usize, generators: usize, bound: usize) -> PyResult<(Vec<usize>, Vec<usize>, bool)> {
    let r = slice_of_strict(k, generators, Bounds::with_size(bound)).map_err(err)?;
    Ok((r.counts_by_size, r.oracle, r.matches_oracle))
}

/// Operation counts by arity of a catalog entry.
#[pyfunction]
#[pyo3(signature = (name, max_arity = 4))]
pub fn catalog_arity_counts(name: &str, max_arity: usize) -> PyResult<Vec<usize>> {
    Ok(known_slice_oracle(name, max_arity).map_err(err)?.arity_counts)
}

/// The topos-gate report as JSON.
#[pyfunction]
#[pyo3(signature = (n, bound = 3, seed = 0))]
pub fn topos_gate(n: usize, bound: usize, seed: u64) -> PyResult<String> {
    let b = Bounds::with_size(bound);
    let r = computad_topos_gate(n, b, seed).map_err(err)?;
    Ok(Report::new("gate", b, seed, r).to_json())
}

#[pyfunction]
pub fn trees(max_height: usize, max_width: usize) -> Vec<String> {
    enumerate_trees(max_height, max_width).iter().map(|t| t.serialize()).collect()
}

#[pymodule(name = "polygraph")]
fn polygraph_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Computad>()?;
    m.add_class::<Presentation>()?;
    m.add_class::<SymCollection>()?;
    m.add_class::<NonSymCollection>()?;
    m.add_function(wrap_pyfunction!(slice_counts, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_arity_counts, m)?)?;
    m.add_function(wrap_pyfunction!(topos_gate, m)?)?;
    m.add_function(wrap_pyfunction!(trees, m)?)?;
    Ok(())
}
