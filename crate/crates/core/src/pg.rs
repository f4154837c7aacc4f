//! In-memory property graph and the RDF → property graph data mapping.
//!
//! Every resource becomes a node that carries its IRI (or blank label) in
//! the `uri` property. `rdf:type` objects become labels, predicates in the
//! catalog's property keys become node properties, and predicates in its
//! relationship types become relationships.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use indexmap::IndexMap;

use crate::catalog::SchemaCatalog;
use crate::error::{Error, Result};
use crate::rdf::{RdfGraph, RdfTerm, RDF_TYPE};
use crate::value::Value;

/// Property key holding a node's IRI.
pub const URI_KEY: &str = "uri";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0 + 1)
    }
}

impl fmt::Display for RelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0 + 1)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NodeData {
    pub labels: Vec<String>,
    pub properties: IndexMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelData {
    pub source: NodeId,
    pub target: NodeId,
    pub rel_type: String,
    pub properties: IndexMap<String, Value>,
}

#[derive(Debug, Clone, Default)]
pub struct PropertyGraph {
    nodes: Vec<NodeData>,
    rels: Vec<RelData>,
    outgoing: Vec<Vec<RelId>>,
    incoming: Vec<Vec<RelId>>,
    by_uri: HashMap<RdfTerm, NodeId>,
}

impl PropertyGraph {
    pub fn new() -> Self {
        PropertyGraph::default()
    }

    pub fn add_node(&mut self, data: NodeData) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        if let Some(Value::Term(uri)) = data.properties.get(URI_KEY) {
            self.by_uri.entry(uri.clone()).or_insert(id);
        }
        self.nodes.push(data);
        self.outgoing.push(Vec::new());
        self.incoming.push(Vec::new());
        id
    }

    pub fn add_relationship(
        &mut self,
        source: NodeId,
        target: NodeId,
        rel_type: impl Into<String>,
    ) -> RelId {
        let id = RelId(self.rels.len() as u32);
        self.rels.push(RelData {
            source,
            target,
            rel_type: rel_type.into(),
            properties: IndexMap::new(),
        });
        self.outgoing[source.0 as usize].push(id);
        self.incoming[target.0 as usize].push(id);
        id
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn relationship_count(&self) -> usize {
        self.rels.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn rel_ids(&self) -> impl Iterator<Item = RelId> {
        (0..self.rels.len() as u32).map(RelId)
    }

    pub fn node(&self, id: NodeId) -> &NodeData {
        &self.nodes[id.0 as usize]
    }

    pub fn relationship(&self, id: RelId) -> &RelData {
        &self.rels[id.0 as usize]
    }

    pub fn labels(&self, id: NodeId) -> &[String] {
        &self.node(id).labels
    }

    pub fn has_label(&self, id: NodeId, label: &str) -> bool {
        self.labels(id).iter().any(|l| l == label)
    }

    pub fn node_property(&self, id: NodeId, key: &str) -> Option<&Value> {
        self.node(id).properties.get(key)
    }

    pub fn rel_type(&self, id: RelId) -> &str {
        &self.relationship(id).rel_type
    }

    /// `st(r)`: source and target of a relationship.
    pub fn endpoints(&self, id: RelId) -> (NodeId, NodeId) {
        let r = self.relationship(id);
        (r.source, r.target)
    }

    pub fn outgoing(&self, id: NodeId) -> &[RelId] {
        &self.outgoing[id.0 as usize]
    }

    pub fn incoming(&self, id: NodeId) -> &[RelId] {
        &self.incoming[id.0 as usize]
    }

    pub fn node_by_uri(&self, uri: &RdfTerm) -> Option<NodeId> {
        self.by_uri.get(uri).copied()
    }

    pub fn uri(&self, id: NodeId) -> Option<&RdfTerm> {
        self.node_property(id, URI_KEY).and_then(Value::as_term)
    }

    /// Total number of labels over all nodes.
    pub fn label_assignment_count(&self) -> usize {
        self.nodes.iter().map(|n| n.labels.len()).sum()
    }

    /// Number of property values over all nodes, excluding `uri`; a
    /// multi-valued property counts each element.
    pub fn property_value_count(&self) -> usize {
        self.nodes
            .iter()
            .flat_map(|n| n.properties.iter())
            .filter(|(k, _)| k.as_str() != URI_KEY)
            .map(|(_, v)| match v {
                Value::List(items) => items.len(),
                _ => 1,
            })
            .sum()
    }

    /// Line-oriented listing of nodes and relationships.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for id in self.node_ids() {
            let node = self.node(id);
            let props: Vec<String> = node
                .properties
                .iter()
                .map(|(k, v)| format!("{k}: {v}"))
                .collect();
            let _ = writeln!(
                out,
                "node {id} [{}] {{{}}}",
                node.labels.join(", "),
                props.join(", ")
            );
        }
        for id in self.rel_ids() {
            let r = self.relationship(id);
            let _ = writeln!(
                out,
                "rel {id} {} -[{}]-> {}",
                r.source, r.rel_type, r.target
            );
        }
        out
    }

    fn node_for(&mut self, term: &RdfTerm) -> NodeId {
        if let Some(id) = self.by_uri.get(term) {
            return *id;
        }
        let mut data = NodeData::default();
        data.properties
            .insert(URI_KEY.to_string(), Value::Term(term.clone()));
        self.add_node(data)
    }
}

/// Map an RDF graph onto a property graph, following `catalog` for which
/// predicates are relationships and which are properties.
///
/// Blank nodes keep their own `_:` label as `uri`. A property key seen more
/// than once on the same node becomes a list value.
pub fn rdf_to_pg(graph: &RdfGraph, catalog: &SchemaCatalog) -> Result<PropertyGraph> {
    let mut pg = PropertyGraph::new();
    for triple in graph.iter() {
        if !triple.subject.is_resource() {
            return Err(Error::InvalidTerm(format!(
                "literal subject {}",
                triple.subject
            )));
        }
        let predicate = triple.predicate_iri();
        let subject = pg.node_for(&triple.subject);
        if predicate == RDF_TYPE {
            let RdfTerm::Iri(class) = &triple.object else {
                return Err(Error::InvalidTerm(format!(
                    "rdf:type object must be an IRI, got {}",
                    triple.object
                )));
            };
            let labels = &mut pg.nodes[subject.0 as usize].labels;
            if !labels.contains(class) {
                labels.push(class.clone());
            }
        } else if catalog.is_property_key(predicate) {
            let value = Value::Term(triple.object.clone());
            let props = &mut pg.nodes[subject.0 as usize].properties;
            match props.get_mut(predicate) {
                None => {
                    props.insert(predicate.to_string(), value);
                }
                Some(Value::List(items)) => items.push(value),
                Some(existing) => {
                    let first = std::mem::replace(existing, Value::Null);
                    *existing = Value::List(vec![first, value]);
                }
            }
        } else if catalog.is_relationship_type(predicate) {
            if !triple.object.is_resource() {
                return Err(Error::MixedPredicate(vec![predicate.to_string()]));
            }
            let object = pg.node_for(&triple.object);
            pg.add_relationship(subject, object, predicate);
        } else {
            return Err(Error::UnknownPredicate(predicate.to_string()));
        }
    }
    Ok(pg)
}
