//! Three-way comparison of a SPARQL query and its translation on one
//! dataset: direct SPARQL evaluation, execution of the Cypher translation
//! on the converted property graph, and relational evaluation.

use std::collections::HashMap;
use std::fmt;
use std::time::{Duration, Instant};

use crate::catalog::SchemaCatalog;
use crate::error::Result;
use crate::pg::{rdf_to_pg, PropertyGraph};
use crate::rdf::{RdfGraph, RdfTerm};
use crate::sparql::SparqlQuery;
use crate::translate::{translate_with, TranslateOptions, Translation};

use super::algebra::eval_algebra_query;
use super::exec::{exec_with, ExecOptions};
use super::interp::{xi, zeta};
use super::mapping::{eval_mapping, Mapping};

#[derive(Debug, Clone, Copy, Default)]
pub struct CheckOptions {
    pub translate: TranslateOptions,
    pub exec: ExecOptions,
}

/// Outcome of [`check_equivalence`]. "Expected" rows come from direct
/// SPARQL evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub expected_rows: usize,
    pub cypher_rows: usize,
    pub algebra_rows: usize,
    /// Expected solutions the Cypher side did not produce.
    pub missing: Vec<Mapping>,
    /// Cypher solutions not among the expected ones.
    pub extra: Vec<Mapping>,
    pub cypher_matches: bool,
    pub algebra_matches: bool,
    /// Whether ORDER BY key sequences agree (true when unordered).
    pub order_matches: bool,
    /// LIMIT/OFFSET present: the full results were compared, and the
    /// sliced Cypher result checked to be a valid slice.
    pub sliced: bool,
    pub translate_time: Duration,
}

impl EquivalenceReport {
    pub fn is_equivalent(&self) -> bool {
        self.cypher_matches && self.algebra_matches && self.order_matches
    }

    /// Machine-readable summary without the solution diff.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "equivalent": self.is_equivalent(),
            "sparql_rows": self.expected_rows,
            "cypher_rows": self.cypher_rows,
            "algebra_rows": self.algebra_rows,
            "missing": self.missing.len(),
            "extra": self.extra.len(),
            "order_matches": self.order_matches,
            "sliced": self.sliced,
            "translate_ms": self.translate_time.as_secs_f64() * 1e3,
        })
    }
}

fn show(m: &Mapping) -> String {
    let parts: Vec<String> = m.iter().map(|(k, v)| format!("?{k}={v}")).collect();
    format!("{{{}}}", parts.join(", "))
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.is_equivalent() {
            "equivalent"
        } else {
            "MISMATCH"
        };
        writeln!(
            f,
            "{verdict}: sparql={} cypher={} algebra={} translate={:.3}ms",
            self.expected_rows,
            self.cypher_rows,
            self.algebra_rows,
            self.translate_time.as_secs_f64() * 1e3
        )?;
        if !self.order_matches {
            writeln!(f, "  row order differs")?;
        }
        if !self.algebra_matches {
            writeln!(f, "  relational evaluation differs")?;
        }
        for m in &self.missing {
            writeln!(f, "  missing {}", show(m))?;
        }
        for m in &self.extra {
            writeln!(f, "  extra   {}", show(m))?;
        }
        Ok(())
    }
}

/// Bag difference: rows of `expected` absent from `actual`, and rows of
/// `actual` absent from `expected`, with multiplicity.
pub fn bag_diff(expected: &[Mapping], actual: &[Mapping]) -> (Vec<Mapping>, Vec<Mapping>) {
    let mut counts: HashMap<&Mapping, i64> = HashMap::new();
    for m in expected {
        *counts.entry(m).or_default() += 1;
    }
    for m in actual {
        *counts.entry(m).or_default() -= 1;
    }
    let mut missing = Vec::new();
    let mut extra = Vec::new();
    for (m, c) in counts {
        for _ in 0..c.max(0) {
            missing.push(m.clone());
        }
        for _ in 0..(-c).max(0) {
            extra.push(m.clone());
        }
    }
    missing.sort();
    extra.sort();
    (missing, extra)
}

fn bag_eq(a: &[Mapping], b: &[Mapping]) -> bool {
    let (m, e) = bag_diff(a, b);
    m.is_empty() && e.is_empty()
}

fn is_sub_bag(small: &[Mapping], big: &[Mapping]) -> bool {
    bag_diff(small, big).0.is_empty()
}

fn order_keys(q: &SparqlQuery, rows: &[Mapping]) -> Option<Vec<Vec<Option<RdfTerm>>>> {
    let names = q.modifiers.output_names();
    if q.modifiers.order.is_empty()
        || !q
            .modifiers
            .order
            .iter()
            .all(|k| names.contains(&k.var.as_str()))
    {
        return None;
    }
    Some(
        rows.iter()
            .map(|m| {
                q.modifiers
                    .order
                    .iter()
                    .map(|k| m.get(&k.var).cloned())
                    .collect()
            })
            .collect(),
    )
}

/// Rows of the Cypher side as mappings: execute, map identifiers to
/// terms, attach the SPARQL variable of each column.
pub fn cypher_solutions(
    t: &Translation,
    pg: &PropertyGraph,
    options: ExecOptions,
) -> Result<Vec<Mapping>> {
    let raw = exec_with(&t.query, pg, options)?;
    let mut labelled = raw;
    for (attr, var) in labelled.schema.iter_mut().zip(&t.columns) {
        attr.var = Some(var.clone());
    }
    Ok(zeta(&xi(&labelled, pg)?))
}

fn algebra_solutions(
    q: &SparqlQuery,
    graph: &RdfGraph,
    cat: &SchemaCatalog,
) -> Result<Vec<Mapping>> {
    Ok(zeta(&eval_algebra_query(q, graph, cat)?))
}

pub fn check_equivalence(
    q: &SparqlQuery,
    graph: &RdfGraph,
    cat: &SchemaCatalog,
) -> Result<EquivalenceReport> {
    check_equivalence_with(q, graph, cat, CheckOptions::default())
}

pub fn check_equivalence_with(
    q: &SparqlQuery,
    graph: &RdfGraph,
    cat: &SchemaCatalog,
    options: CheckOptions,
) -> Result<EquivalenceReport> {
    let start = Instant::now();
    let translation = translate_with(q, cat, options.translate)?;
    let translate_time = start.elapsed();
    let mut report = check_translation(q, &translation, graph, cat, options.exec)?;
    report.translate_time = translate_time;
    Ok(report)
}

/// Compare `q` with a given translation of it; `translate_time` is left
/// at zero.
pub fn check_translation(
    q: &SparqlQuery,
    translation: &Translation,
    graph: &RdfGraph,
    cat: &SchemaCatalog,
    exec: ExecOptions,
) -> Result<EquivalenceReport> {
    let pg = rdf_to_pg(graph, cat)?;
    let sliced = q.modifiers.limit.is_some() || q.modifiers.offset.is_some();

    let expected = eval_mapping(q, graph);
    let actual = cypher_solutions(translation, &pg, exec)?;
    let algebra = algebra_solutions(q, graph, cat)?;

    let (cypher_matches, algebra_matches, missing, extra) = if sliced {
        let mut full_q = q.clone();
        full_q.modifiers.limit = None;
        full_q.modifiers.offset = None;
        let mut full_t = translation.clone();
        full_t.query.skip = None;
        full_t.query.limit = None;
        let expected_full = eval_mapping(&full_q, graph);
        let actual_full = cypher_solutions(&full_t, &pg, exec)?;
        let algebra_full = algebra_solutions(&full_q, graph, cat)?;
        let (missing, extra) = bag_diff(&expected_full, &actual_full);
        let cypher_ok = missing.is_empty()
            && extra.is_empty()
            && actual.len() == expected.len()
            && is_sub_bag(&actual, &actual_full);
        let algebra_ok = bag_eq(&expected_full, &algebra_full)
            && algebra.len() == expected.len()
            && is_sub_bag(&algebra, &algebra_full);
        (cypher_ok, algebra_ok, missing, extra)
    } else {
        let (missing, extra) = bag_diff(&expected, &actual);
        let ok = missing.is_empty() && extra.is_empty();
        (ok, bag_eq(&expected, &algebra), missing, extra)
    };
    let order_matches = match order_keys(q, &expected) {
        None => true,
        Some(keys) => {
            order_keys(q, &actual) == Some(keys.clone()) && order_keys(q, &algebra) == Some(keys)
        }
    };
    Ok(EquivalenceReport {
        expected_rows: expected.len(),
        cypher_rows: actual.len(),
        algebra_rows: algebra.len(),
        missing,
        extra,
        cypher_matches,
        algebra_matches,
        order_matches,
        sliced,
        translate_time: Duration::ZERO,
    })
}
