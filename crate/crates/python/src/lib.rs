use std::collections::HashMap;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use sparql2cypher::catalog::{derive_catalog_with, MixedPolicy, SchemaCatalog};
use sparql2cypher::cypher::{render_with, RenderStyle};
use sparql2cypher::oracle::{check_equivalence_with, CheckOptions, EquivalenceReport};
use sparql2cypher::rdf::{parse_ntriples_with, PrefixMap, RdfGraph};
use sparql2cypher::sparql::{parse_sparql_with, SparqlQuery};
use sparql2cypher::synthetic::{generate, SyntheticConfig};
use sparql2cypher::translate::{translate_with, TranslateOptions};
use sparql2cypher::Error;

create_exception!(sparql2cypher_py, TranslationError, PyException);

fn err(e: Error) -> PyErr {
    TranslationError::new_err(e.to_string())
}

fn prefix_map(extra: Option<HashMap<String, String>>) -> PrefixMap {
    let mut p = PrefixMap::with_defaults();
    for (prefix, ns) in extra.unwrap_or_default() {
        p.insert(prefix, ns);
    }
    p
}

fn policy(name: &str) -> PyResult<MixedPolicy> {
    match name {
        "error" => Ok(MixedPolicy::Error),
        "edge" => Ok(MixedPolicy::Edge),
        "property" => Ok(MixedPolicy::Property),
        other => Err(pyo3::exceptions::PyValueError::new_err(format!(
            "mixed must be 'error', 'edge' or 'property', not {other:?}"
        ))),
    }
}

/// Relationship types and property keys of a dataset.
#[pyclass(name = "Catalog", module = "sparql2cypher_py", frozen)]
struct PyCatalog {
    inner: SchemaCatalog,
}

#[pymethods]
impl PyCatalog {
    #[new]
    fn new(relationship_types: Vec<String>, property_keys: Vec<String>) -> PyResult<Self> {
        let inner = SchemaCatalog::new(relationship_types, property_keys).map_err(err)?;
        Ok(PyCatalog { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyCatalog {
            inner: SchemaCatalog::from_json(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn relationship_types(&self) -> Vec<String> {
        self.inner
            .relationship_types()
            .map(str::to_string)
            .collect()
    }

    #[getter]
    fn property_keys(&self) -> Vec<String> {
        self.inner.property_keys().map(str::to_string).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Catalog(|T|={}, |P|={})",
            self.inner.relationship_types().count(),
            self.inner.property_keys().count()
        )
    }
}

/// An RDF dataset.
#[pyclass(name = "Graph", module = "sparql2cypher_py", frozen)]
struct PyGraph {
    inner: RdfGraph,
}

#[pymethods]
impl PyGraph {
    #[staticmethod]
    #[pyo3(signature = (text, prefixes=None))]
    fn from_ntriples(text: &str, prefixes: Option<HashMap<String, String>>) -> PyResult<Self> {
        let inner = parse_ntriples_with(text, &prefix_map(prefixes)).map_err(err)?;
        Ok(PyGraph { inner })
    }

    /// Seeded synthetic dataset; `scale=1.0` is about a hundred nodes.
    #[staticmethod]
    #[pyo3(signature = (scale=1.0, seed=7))]
    fn synthetic(scale: f64, seed: u64) -> Self {
        let cfg = SyntheticConfig {
            seed,
            ..SyntheticConfig::default()
        }
        .scaled(scale);
        PyGraph {
            inner: generate(&cfg),
        }
    }

    #[pyo3(signature = (mixed="error"))]
    fn catalog(&self, mixed: &str) -> PyResult<PyCatalog> {
        let inner = derive_catalog_with(&self.inner, policy(mixed)?).map_err(err)?;
        Ok(PyCatalog { inner })
    }

    fn to_ntriples(&self) -> String {
        self.inner.to_ntriples()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Outcome of comparing a query with its translation.
#[pyclass(name = "EquivalenceReport", module = "sparql2cypher_py", frozen)]
struct PyReport {
    inner: EquivalenceReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn equivalent(&self) -> bool {
        self.inner.is_equivalent()
    }

    #[getter]
    fn sparql_rows(&self) -> usize {
        self.inner.expected_rows
    }

    #[getter]
    fn cypher_rows(&self) -> usize {
        self.inner.cypher_rows
    }

    #[getter]
    fn algebra_rows(&self) -> usize {
        self.inner.algebra_rows
    }

    #[getter]
    fn missing(&self) -> Vec<String> {
        self.inner
            .missing
            .iter()
            .map(|m| format!("{m:?}"))
            .collect()
    }

    #[getter]
    fn extra(&self) -> Vec<String> {
        self.inner.extra.iter().map(|m| format!("{m:?}")).collect()
    }

    #[getter]
    fn translate_ms(&self) -> f64 {
        self.inner.translate_time.as_secs_f64() * 1e3
    }

    fn summary_json(&self) -> String {
        self.inner.summary_json().to_string()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

fn parse(query: &str, prefixes: &PrefixMap) -> PyResult<SparqlQuery> {
    parse_sparql_with(query, prefixes).map_err(err)
}

/// Translate a SPARQL SELECT query to Cypher text.
#[pyfunction]
#[pyo3(signature = (query, catalog, prefixes=None, guard_properties=false, pretty=false))]
fn translate(
    query: &str,
    catalog: &PyCatalog,
    prefixes: Option<HashMap<String, String>>,
    guard_properties: bool,
    pretty: bool,
) -> PyResult<String> {
    let prefixes = prefix_map(prefixes);
    let q = parse(query, &prefixes)?;
    let t =
        translate_with(&q, &catalog.inner, TranslateOptions { guard_properties }).map_err(err)?;
    let style = if pretty {
        RenderStyle::Pretty
    } else {
        RenderStyle::SingleLine
    };
    render_with(&t.query, &prefixes, style).map_err(err)
}

/// Evaluate `query` directly and through its translation on `graph`.
#[pyfunction]
#[pyo3(signature = (query, graph, catalog=None, prefixes=None, guard_properties=false))]
fn check_equivalence(
    py: Python<'_>,
    query: &str,
    graph: &PyGraph,
    catalog: Option<&PyCatalog>,
    prefixes: Option<HashMap<String, String>>,
    guard_properties: bool,
) -> PyResult<PyReport> {
    let q = parse(query, &prefix_map(prefixes))?;
    let cat = match catalog {
        Some(c) => c.inner.clone(),
        None => derive_catalog_with(&graph.inner, MixedPolicy::Error).map_err(err)?,
    };
    let mut options = CheckOptions::default();
    options.translate.guard_properties = guard_properties;
    let report = py
        .detach(|| check_equivalence_with(&q, &graph.inner, &cat, options))
        .map_err(err)?;
    Ok(PyReport { inner: report })
}

#[pymodule]
fn sparql2cypher_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCatalog>()?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(translate, m)?)?;
    m.add_function(wrap_pyfunction!(check_equivalence, m)?)?;
    m.add("TranslationError", m.py().get_type::<TranslationError>())?;
    Ok(())
}
