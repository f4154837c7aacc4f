//! Reading property-graph results back as SPARQL solutions.
//!
//! [`xi`] replaces graph elements by RDF terms: relationship columns are
//! renamed to their type IRI, nodes become their `uri`, relationships their
//! type. [`zeta`] turns a relation whose columns carry variables into
//! solution mappings, dropping NULLs.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::pg::{NodeId, PropertyGraph, RelId};
use crate::rdf::RdfTerm;
use crate::value::Value;

use super::mapping::Mapping;
use super::relation::GraphRelation;

fn term_of(v: &Value, g: &PropertyGraph) -> Value {
    match v {
        Value::Node(id) => Value::from(g.uri(*id).cloned()),
        Value::Rel(id) => Value::Term(RdfTerm::Iri(g.rel_type(*id).to_string())),
        Value::List(items) => Value::List(items.iter().map(|i| term_of(i, g)).collect()),
        other => other.clone(),
    }
}

fn collect_rels(v: &Value, out: &mut Vec<RelId>) {
    match v {
        Value::Rel(id) => out.push(*id),
        Value::List(items) => items.iter().for_each(|i| collect_rels(i, out)),
        _ => {}
    }
}

/// Map identifiers in `r` to RDF terms. Fails if two relationships in the
/// result share type and endpoints, since their terms would coincide.
pub fn xi(r: &GraphRelation, g: &PropertyGraph) -> Result<GraphRelation> {
    let mut rels = Vec::new();
    for row in &r.rows {
        for v in row {
            collect_rels(v, &mut rels);
        }
    }
    rels.sort_unstable();
    rels.dedup();
    let mut seen: HashMap<(NodeId, NodeId, &str), RelId> = HashMap::new();
    for id in rels {
        let (s, t) = g.endpoints(id);
        if let Some(prev) = seen.insert((s, t, g.rel_type(id)), id) {
            return Err(Error::AmbiguousRelationship(
                prev.to_string(),
                id.to_string(),
            ));
        }
    }
    let mut schema = r.schema.clone();
    for (i, attr) in schema.iter_mut().enumerate() {
        let mut types = r.rows.iter().filter_map(|row| match &row[i] {
            Value::Rel(id) => Some(g.rel_type(*id)),
            _ => None,
        });
        if let Some(first) = types.next() {
            if types.all(|t| t == first) {
                attr.name = first.to_string();
            }
        }
    }
    let rows = r
        .rows
        .iter()
        .map(|row| row.iter().map(|v| term_of(v, g)).collect())
        .collect();
    Ok(GraphRelation::with_rows(schema, rows))
}

/// One mapping per row over the columns that carry a variable and hold a
/// term.
pub fn zeta(r: &GraphRelation) -> Vec<Mapping> {
    r.rows
        .iter()
        .map(|row| {
            let mut m = Mapping::new();
            for (attr, v) in r.schema.iter().zip(row) {
                if let (Some(var), Value::Term(t)) = (&attr.var, v) {
                    m.entry(var.clone()).or_insert_with(|| t.clone());
                }
            }
            m
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::relation::Attribute;
    use crate::pg::{NodeData, URI_KEY};

    #[test]
    fn duplicate_relationships_are_ambiguous() {
        let mut g = PropertyGraph::new();
        let mut node = |u: &str| {
            let mut d = NodeData::default();
            d.properties
                .insert(URI_KEY.into(), Value::Term(RdfTerm::Iri(u.into())));
            g.add_node(d)
        };
        let (a, b) = (node("http://e/a"), node("http://e/b"));
        let r1 = g.add_relationship(a, b, "http://e/p");
        let r2 = g.add_relationship(a, b, "http://e/p");
        let rel = GraphRelation::with_rows(
            vec![Attribute::new("r")],
            vec![vec![Value::Rel(r1)], vec![Value::Rel(r2)]],
        );
        assert!(matches!(
            xi(&rel, &g),
            Err(Error::AmbiguousRelationship(..))
        ));
        let one = GraphRelation::with_rows(
            vec![Attribute::var("n"), Attribute::new("r")],
            vec![vec![Value::Node(a), Value::Rel(r1)]],
        );
        let mapped = xi(&one, &g).unwrap();
        assert_eq!(mapped.column_names(), ["n", "http://e/p"]);
        let m = zeta(&mapped);
        assert_eq!(m[0].len(), 1);
        assert_eq!(m[0]["n"], RdfTerm::Iri("http://e/a".into()));
    }
}
