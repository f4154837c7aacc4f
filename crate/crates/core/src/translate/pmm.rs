//! Triple patterns to Cypher path patterns.
//!
//! Triples are folded one at a time into a growing list of path patterns.
//! A triple whose subject already sits at the start or end of a path
//! extends that path (prepending a reversed relationship at the start);
//! a subject in the middle of a path starts a new comma-joined pattern
//! that shares the node name.

use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;

use crate::catalog::{classify_triple, SchemaCatalog, TripleClass};
use crate::cypher::{
    Direction, Expr as CExpr, Name, NodePattern, PathPattern, Range, RelationshipPattern,
};
use crate::error::{Error, Result};
use crate::pg::URI_KEY;
use crate::rdf::{RdfTerm, RDF_TYPE};
use crate::sparql::{PathExpr, PredicatePattern, TermPattern, TriplePattern};
use crate::value::CompareOp;

/// What a SPARQL variable stands for on the Cypher side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Node(String),
    /// A relationship whose type is the variable's value.
    Rel(String),
    /// `node.key`
    Property(String, String),
    /// An `UNWIND labels(..)` alias.
    Label(String),
}

impl Binding {
    /// Cypher expression producing the variable's value.
    pub fn value_expr(&self) -> CExpr {
        match self {
            Binding::Node(n) => CExpr::Var(n.clone()),
            Binding::Rel(r) => CExpr::Type(r.clone()),
            Binding::Property(n, k) => CExpr::Property(n.clone(), k.clone()),
            Binding::Label(a) => CExpr::Var(a.clone()),
        }
    }

    /// Like `value_expr`, but nodes are represented by their `uri` so the
    /// result compares and sorts like the RDF term.
    pub fn term_expr(&self) -> CExpr {
        match self {
            Binding::Node(n) => CExpr::Property(n.clone(), URI_KEY.into()),
            other => other.value_expr(),
        }
    }
}

/// Path patterns produced for one basic graph pattern, with the variable
/// bindings they establish.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PatternSet {
    pub patterns: Vec<PathPattern>,
    pub bindings: IndexMap<String, Binding>,
}

const RESERVED: [&str; 44] = [
    "all",
    "and",
    "as",
    "asc",
    "ascending",
    "by",
    "call",
    "case",
    "contains",
    "create",
    "delete",
    "desc",
    "descending",
    "detach",
    "distinct",
    "else",
    "end",
    "ends",
    "exists",
    "false",
    "in",
    "is",
    "limit",
    "match",
    "merge",
    "not",
    "null",
    "on",
    "optional",
    "or",
    "order",
    "remove",
    "return",
    "set",
    "skip",
    "starts",
    "then",
    "true",
    "union",
    "unwind",
    "when",
    "where",
    "with",
    "xor",
];

/// Allocates Cypher identifiers: one per SPARQL variable, plus fresh
/// generated names that never collide with them.
#[derive(Debug, Clone, Default)]
pub struct Namer {
    used: HashSet<String>,
    idents: HashMap<String, String>,
    var_idents: HashSet<String>,
}

impl Namer {
    pub fn new<'a>(vars: impl IntoIterator<Item = &'a str>) -> Self {
        let mut namer = Namer::default();
        let vars: Vec<&str> = vars.into_iter().collect();
        for v in &vars {
            if !RESERVED.contains(&v.to_ascii_lowercase().as_str()) {
                namer.used.insert(v.to_string());
            }
        }
        for v in vars {
            if namer.idents.contains_key(v) {
                continue;
            }
            let ident = if RESERVED.contains(&v.to_ascii_lowercase().as_str()) {
                namer.numbered(v)
            } else {
                v.to_string()
            };
            namer.var_idents.insert(ident.clone());
            namer.idents.insert(v.to_string(), ident);
        }
        namer
    }

    /// Identifier for a SPARQL variable.
    pub fn ident(&mut self, var: &str) -> String {
        if let Some(id) = self.idents.get(var) {
            return id.clone();
        }
        let id = if self.used.contains(var) || RESERVED.contains(&var.to_ascii_lowercase().as_str())
        {
            self.numbered(var)
        } else {
            self.used.insert(var.to_string());
            var.to_string()
        };
        self.var_idents.insert(id.clone());
        self.idents.insert(var.to_string(), id.clone());
        id
    }

    fn is_var_ident(&self, ident: &str) -> bool {
        self.var_idents.contains(ident)
    }

    /// `base` itself if free, else `base1`, `base2`, ...
    pub fn fresh(&mut self, base: &str) -> String {
        if !self.used.contains(base) && !RESERVED.contains(&base.to_ascii_lowercase().as_str()) {
            self.used.insert(base.to_string());
            return base.to_string();
        }
        self.numbered(base)
    }

    /// `base1`, `base2`, ... whichever is free first.
    pub fn numbered(&mut self, base: &str) -> String {
        let mut i = 1;
        loop {
            let candidate = format!("{base}{i}");
            if !self.used.contains(&candidate) {
                self.used.insert(candidate.clone());
                return candidate;
            }
            i += 1;
        }
    }

    /// Name for a relationship derived from its predicate's local name.
    pub fn relationship(&mut self, iri: &str) -> String {
        let local = iri.rsplit(['/', '#', ':']).next().unwrap_or("");
        let cleaned: String = local
            .chars()
            .filter(|c| c.is_ascii_alphanumeric() || *c == '_')
            .collect();
        if cleaned.is_empty() || cleaned.starts_with(|c: char| c.is_ascii_digit()) {
            self.fresh("_r")
        } else {
            self.fresh(&cleaned)
        }
    }
}

/// Outer context visible to an OPTIONAL arm.
pub(crate) struct Outer<'a> {
    pub bindings: &'a IndexMap<String, Binding>,
    pub nodes: &'a HashSet<String>,
    pub iri_nodes: &'a HashMap<String, String>,
}

pub(crate) struct Scope<'a> {
    cat: &'a SchemaCatalog,
    pub namer: &'a mut Namer,
    outer: Option<Outer<'a>>,
    guard_properties: bool,
    pub patterns: Vec<PathPattern>,
    pub bindings: IndexMap<String, Binding>,
    pub iri_nodes: HashMap<String, String>,
    placed: HashSet<String>,
    aliases: HashMap<String, String>,
    /// Constraints over pattern names, usable in the MATCH's WHERE.
    pub conditions: Vec<CExpr>,
    /// `UNWIND expr AS alias`, in order.
    pub unwinds: Vec<(CExpr, String)>,
    /// Constraints that mention unwound aliases.
    pub post_conditions: Vec<CExpr>,
}

impl<'a> Scope<'a> {
    pub fn new(cat: &'a SchemaCatalog, namer: &'a mut Namer, guard_properties: bool) -> Self {
        Scope {
            cat,
            namer,
            outer: None,
            guard_properties,
            patterns: Vec::new(),
            bindings: IndexMap::new(),
            iri_nodes: HashMap::new(),
            placed: HashSet::new(),
            aliases: HashMap::new(),
            conditions: Vec::new(),
            unwinds: Vec::new(),
            post_conditions: Vec::new(),
        }
    }

    /// Scope for an OPTIONAL arm: property bindings are always guarded, and
    /// properties of outer nodes are read through an alias so they come out
    /// NULL when the arm does not match.
    pub fn arm(cat: &'a SchemaCatalog, namer: &'a mut Namer, outer: Outer<'a>) -> Self {
        let mut scope = Scope::new(cat, namer, true);
        scope.outer = Some(outer);
        scope
    }

    fn lookup(&self, var: &str) -> Option<&Binding> {
        self.bindings
            .get(var)
            .or_else(|| self.outer.as_ref().and_then(|o| o.bindings.get(var)))
    }

    fn is_outer_node(&self, name: &str) -> bool {
        self.outer.as_ref().is_some_and(|o| o.nodes.contains(name))
    }

    fn node_for(&mut self, term: &TermPattern, role: &str) -> Result<String> {
        match term {
            TermPattern::Variable(v) => match self.lookup(v) {
                Some(Binding::Node(n)) => Ok(n.clone()),
                Some(_) => Err(Error::Unsupported(format!(
                    "?{v} used both as a node and as a value"
                ))),
                None => {
                    let ident = self.namer.ident(v);
                    self.bindings
                        .insert(v.clone(), Binding::Node(ident.clone()));
                    Ok(ident)
                }
            },
            TermPattern::Iri(iri) => {
                if let Some(n) = self.outer.as_ref().and_then(|o| o.iri_nodes.get(iri)) {
                    return Ok(n.clone());
                }
                if let Some(n) = self.iri_nodes.get(iri) {
                    return Ok(n.clone());
                }
                let name = self.namer.numbered("_n");
                self.iri_nodes.insert(iri.clone(), name.clone());
                Ok(name)
            }
            TermPattern::Literal(l) => Err(Error::Unsupported(format!(
                "literal {l} as {role} of a relationship or node pattern"
            ))),
        }
    }

    /// Node pattern for `name`; the first placement of an IRI node carries
    /// its `uri`.
    fn make_node(&mut self, name: &str) -> NodePattern {
        let tag = if self.namer.is_var_ident(name) {
            Name::Var(name.to_string())
        } else {
            Name::Generated(name.to_string())
        };
        let mut node = NodePattern::named(tag);
        if self.placed.insert(name.to_string()) && !self.is_outer_node(name) {
            if let Some((iri, _)) = self.iri_nodes.iter().find(|(_, n)| n.as_str() == name) {
                node.properties
                    .insert(URI_KEY.to_string(), RdfTerm::Iri(iri.clone()));
            }
        }
        node
    }

    fn get_pattern(&self, name: &str) -> Option<usize> {
        self.patterns
            .iter()
            .position(|p| p.nodes().any(|n| n.name_str() == Some(name)))
    }

    fn node_mut(&mut self, name: &str) -> &mut NodePattern {
        let idx = match self.get_pattern(name) {
            Some(i) => i,
            None => {
                let node = self.make_node(name);
                self.patterns.push(PathPattern::node(node));
                self.patterns.len() - 1
            }
        };
        self.patterns[idx]
            .nodes_mut()
            .find(|n| n.name_str() == Some(name))
            .expect("pattern contains the node")
    }

    /// Make sure `name` is matched somewhere in this scope.
    fn ensure_node(&mut self, name: &str) {
        if !self.is_outer_node(name) {
            self.node_mut(name);
        }
    }

    fn add_edge(&mut self, subject: &str, segment: Vec<(RelationshipPattern, NodePattern)>) {
        match self.get_pattern(subject) {
            None => {
                let start = self.make_node(subject);
                self.patterns.push(PathPattern {
                    start,
                    steps: segment,
                });
            }
            Some(i) => {
                let path = &mut self.patterns[i];
                if path.start.name_str() == Some(subject) {
                    if path.steps.is_empty() {
                        path.steps = segment;
                        return;
                    }
                    // reverse the segment and hang it off the start node
                    let old_start = std::mem::take(&mut path.start);
                    let mut nodes: Vec<NodePattern> =
                        segment.iter().map(|(_, n)| n.clone()).collect();
                    let new_start = nodes.pop().expect("segment is non-empty");
                    let mut steps = Vec::with_capacity(segment.len() + path.steps.len());
                    let mut rels: Vec<RelationshipPattern> =
                        segment.into_iter().map(|(r, _)| r.reversed()).collect();
                    while let Some(rel) = rels.pop() {
                        let node = nodes.pop().unwrap_or_else(|| old_start.clone());
                        steps.push((rel, node));
                    }
                    steps.append(&mut path.steps);
                    path.start = new_start;
                    path.steps = steps;
                } else if path.end().name_str() == Some(subject) {
                    path.steps.extend(segment);
                } else {
                    let start = self.make_node(subject);
                    self.patterns.push(PathPattern {
                        start,
                        steps: segment,
                    });
                }
            }
        }
    }

    pub fn add_triple(&mut self, tp: &TriplePattern) -> Result<()> {
        if let PredicatePattern::Path(path) = &tp.predicate {
            let s = self.node_for(&tp.subject, "subject")?;
            let o = self.node_for(&tp.object, "object")?;
            let segment = self.path_segment(path, &o)?;
            self.add_edge(&s, segment);
            return Ok(());
        }
        let class = classify_triple(tp, self.cat)?;
        let s = self.node_for(&tp.subject, "subject")?;
        let pred_iri = match &tp.predicate {
            PredicatePattern::Term(TermPattern::Iri(i)) => Some(i.clone()),
            _ => None,
        };
        match class {
            TripleClass::Type => match &tp.object {
                TermPattern::Iri(c) => self.node_mut(&s).add_label(c),
                TermPattern::Variable(v) => self.label_binding(&s, v)?,
                TermPattern::Literal(l) => {
                    return Err(Error::Unsupported(format!(
                        "literal {l} as an rdf:type object"
                    )))
                }
            },
            TripleClass::Property => {
                let key = pred_iri.expect("property predicates are IRIs");
                match &tp.object {
                    TermPattern::Literal(l) => {
                        let value = RdfTerm::Literal(l.clone());
                        let node = self.node_mut(&s);
                        if let Some(existing) = node.properties.get(&key) {
                            if *existing != value {
                                self.conditions.push(CExpr::compare(
                                    CompareOp::Eq,
                                    CExpr::property(&s, &key),
                                    CExpr::Literal(value),
                                ));
                            }
                        } else {
                            node.properties.insert(key, value);
                        }
                    }
                    TermPattern::Variable(v) => self.property_binding(&s, &key, v)?,
                    TermPattern::Iri(i) => {
                        return Err(Error::Unsupported(format!(
                            "IRI <{i}> as the value of property key <{key}>"
                        )))
                    }
                }
            }
            TripleClass::IriEdge => {
                let iri = pred_iri.expect("edge predicates are IRIs");
                let o = self.node_for(&tp.object, "object")?;
                let name = self.namer.relationship(&iri);
                let rel = RelationshipPattern::new(
                    Direction::Out,
                    Some(Name::Generated(name)),
                    Some(iri),
                );
                let target = self.make_node(&o);
                self.add_edge(&s, vec![(rel, target)]);
            }
            TripleClass::VarEdge => {
                let PredicatePattern::Term(TermPattern::Variable(pv)) = &tp.predicate else {
                    unreachable!("VarEdge has a variable predicate")
                };
                let name = match self.lookup(pv).cloned() {
                    None => {
                        let ident = self.namer.ident(pv);
                        self.bindings
                            .insert(pv.clone(), Binding::Rel(ident.clone()));
                        Name::Var(ident)
                    }
                    Some(Binding::Rel(first)) => {
                        let fresh = self.namer.numbered("_r");
                        self.conditions.push(CExpr::compare(
                            CompareOp::Eq,
                            CExpr::Type(fresh.clone()),
                            CExpr::Type(first),
                        ));
                        Name::Generated(fresh)
                    }
                    Some(_) => {
                        return Err(Error::Unsupported(format!(
                            "?{pv} used both as a predicate and elsewhere"
                        )))
                    }
                };
                let o = self.node_for(&tp.object, "object")?;
                let rel = RelationshipPattern::new(Direction::Out, Some(name), None);
                let target = self.make_node(&o);
                self.add_edge(&s, vec![(rel, target)]);
            }
        }
        Ok(())
    }

    fn label_binding(&mut self, node: &str, var: &str) -> Result<()> {
        if self.outer.is_some() {
            return Err(Error::Unsupported(format!(
                "rdf:type with variable object ?{var} inside OPTIONAL"
            )));
        }
        self.ensure_node(node);
        match self.lookup(var).cloned() {
            None => {
                let alias = self.namer.ident(var);
                self.unwinds
                    .push((CExpr::Labels(node.to_string()), alias.clone()));
                self.bindings.insert(var.to_string(), Binding::Label(alias));
            }
            Some(Binding::Label(first)) => {
                let alias = self.namer.numbered("_t");
                self.unwinds
                    .push((CExpr::Labels(node.to_string()), alias.clone()));
                self.post_conditions.push(CExpr::compare(
                    CompareOp::Eq,
                    CExpr::Var(alias),
                    CExpr::Var(first),
                ));
            }
            Some(_) => {
                return Err(Error::Unsupported(format!(
                    "?{var} used both as a class and as another kind of value"
                )))
            }
        }
        Ok(())
    }

    fn property_binding(&mut self, node: &str, key: &str, var: &str) -> Result<()> {
        let holder = if self.is_outer_node(node) {
            match self.aliases.get(node) {
                Some(a) => a.clone(),
                None => {
                    let alias = self.namer.numbered("_p");
                    self.aliases.insert(node.to_string(), alias.clone());
                    self.patterns
                        .push(PathPattern::node(NodePattern::named(Name::Generated(
                            alias.clone(),
                        ))));
                    self.conditions.push(CExpr::compare(
                        CompareOp::Eq,
                        CExpr::var(&alias),
                        CExpr::var(node),
                    ));
                    alias
                }
            }
        } else {
            self.ensure_node(node);
            node.to_string()
        };
        let access = CExpr::property(&holder, key);
        match self.lookup(var).cloned() {
            None => {
                if self.guard_properties {
                    self.conditions.push(CExpr::is_not_null(access));
                }
                self.bindings
                    .insert(var.to_string(), Binding::Property(holder, key.to_string()));
            }
            Some(Binding::Property(n, k)) => {
                self.conditions
                    .push(CExpr::compare(CompareOp::Eq, access, CExpr::Property(n, k)));
            }
            Some(_) => {
                return Err(Error::Unsupported(format!(
                    "?{var} used both as a property value and as a node, class or predicate"
                )))
            }
        }
        Ok(())
    }

    fn path_segment(
        &mut self,
        path: &PathExpr,
        object: &str,
    ) -> Result<Vec<(RelationshipPattern, NodePattern)>> {
        let steps = path.steps();
        let last = steps.len() - 1;
        let mut out = Vec::with_capacity(steps.len());
        for (i, step) in steps.into_iter().enumerate() {
            let rel = self.path_step(step)?;
            let node = if i == last {
                self.make_node(object)
            } else {
                NodePattern::anonymous()
            };
            out.push((rel, node));
        }
        Ok(out)
    }

    fn path_step(&mut self, step: &PathExpr) -> Result<RelationshipPattern> {
        let iri = step.iri().expect("steps are not sequences");
        if iri == RDF_TYPE {
            return Err(Error::Unsupported("rdf:type inside a property path".into()));
        }
        if self.cat.is_property_key(iri) {
            return Err(Error::Unsupported(format!(
                "property path over property key <{iri}>"
            )));
        }
        if !self.cat.is_relationship_type(iri) {
            return Err(Error::UnknownPredicate(iri.to_string()));
        }
        let name = self.namer.relationship(iri);
        let mut rel = RelationshipPattern::new(
            Direction::Out,
            Some(Name::Generated(name)),
            Some(iri.to_string()),
        );
        match step {
            PathExpr::Predicate(_) => {}
            PathExpr::Inverse(_) => rel.direction = Direction::In,
            PathExpr::ZeroOrMore(_) => rel.range = Some(Range { min: 0, max: None }),
            PathExpr::OneOrMore(_) => rel.range = Some(Range { min: 1, max: None }),
            PathExpr::ZeroOrOne(_) => {
                rel.range = Some(Range {
                    min: 0,
                    max: Some(1),
                })
            }
            PathExpr::Sequence(..) => unreachable!("flattened"),
        }
        Ok(rel)
    }
}

/// Fold a basic graph pattern into path patterns.
pub fn pmm(bgp: &[TriplePattern], cat: &SchemaCatalog) -> Result<PatternSet> {
    let vars: Vec<String> = bgp
        .iter()
        .flat_map(|tp| tp.variables().into_iter().map(str::to_string))
        .collect();
    let mut namer = Namer::new(vars.iter().map(String::as_str));
    let mut scope = Scope::new(cat, &mut namer, false);
    for tp in bgp {
        scope.add_triple(tp)?;
    }
    Ok(PatternSet {
        patterns: scope.patterns,
        bindings: scope.bindings,
    })
}

/// Path pattern `(s) ... (o)` for a triple whose predicate is a property
/// path, with relationship names taken from the predicates' local names.
pub fn map_property_path(tp: &TriplePattern, cat: &SchemaCatalog) -> Result<PathPattern> {
    let PredicatePattern::Path(_) = &tp.predicate else {
        return Err(Error::InvalidQuery(
            "triple pattern has no property path".into(),
        ));
    };
    let set = pmm(std::slice::from_ref(tp), cat)?;
    Ok(set
        .patterns
        .into_iter()
        .next()
        .expect("one pattern per path"))
}
