use indexmap::IndexMap;

use crate::rdf::RdfTerm;
use crate::value::{AggregateFn, CompareOp};

/// Pattern identifier. `Generated` names are invented by the translator
/// (relationship names derived from predicate IRIs, helper nodes); `Var`
/// names come straight from SPARQL variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Name {
    Var(String),
    Generated(String),
}

impl Name {
    pub fn as_str(&self) -> &str {
        match self {
            Name::Var(s) | Name::Generated(s) => s,
        }
    }

    pub fn is_generated(&self) -> bool {
        matches!(self, Name::Generated(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Out,
    In,
    Both,
}

impl Direction {
    pub fn reversed(self) -> Self {
        match self {
            Direction::Out => Direction::In,
            Direction::In => Direction::Out,
            Direction::Both => Direction::Both,
        }
    }
}

/// Variable-length bounds; `max: None` is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Range {
    pub min: u32,
    pub max: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NodePattern {
    pub name: Option<Name>,
    pub labels: Vec<String>,
    pub properties: IndexMap<String, RdfTerm>,
}

impl NodePattern {
    pub fn named(name: Name) -> Self {
        NodePattern {
            name: Some(name),
            ..NodePattern::default()
        }
    }

    pub fn anonymous() -> Self {
        NodePattern::default()
    }

    pub fn name_str(&self) -> Option<&str> {
        self.name.as_ref().map(Name::as_str)
    }

    pub fn add_label(&mut self, label: &str) {
        if !self.labels.iter().any(|l| l == label) {
            self.labels.push(label.to_string());
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationshipPattern {
    pub direction: Direction,
    pub name: Option<Name>,
    pub rel_type: Option<String>,
    pub properties: IndexMap<String, RdfTerm>,
    pub range: Option<Range>,
}

impl RelationshipPattern {
    pub fn new(direction: Direction, name: Option<Name>, rel_type: Option<String>) -> Self {
        RelationshipPattern {
            direction,
            name,
            rel_type,
            properties: IndexMap::new(),
            range: None,
        }
    }

    pub fn name_str(&self) -> Option<&str> {
        self.name.as_ref().map(Name::as_str)
    }

    pub fn reversed(mut self) -> Self {
        self.direction = self.direction.reversed();
        self
    }
}

/// `start (rel node)*`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPattern {
    pub start: NodePattern,
    pub steps: Vec<(RelationshipPattern, NodePattern)>,
}

impl PathPattern {
    pub fn node(start: NodePattern) -> Self {
        PathPattern {
            start,
            steps: Vec::new(),
        }
    }

    pub fn end(&self) -> &NodePattern {
        self.steps.last().map_or(&self.start, |(_, n)| n)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodePattern> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|(_, n)| n))
    }

    pub fn nodes_mut(&mut self) -> impl Iterator<Item = &mut NodePattern> {
        std::iter::once(&mut self.start).chain(self.steps.iter_mut().map(|(_, n)| n))
    }

    pub fn relationships(&self) -> impl Iterator<Item = &RelationshipPattern> {
        self.steps.iter().map(|(r, _)| r)
    }

    /// Every name bound by this pattern, nodes and relationships.
    pub fn names(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.start.name_str().into_iter().collect();
        for (r, n) in &self.steps {
            out.extend(r.name_str());
            out.extend(n.name_str());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(String),
    Property(String, String),
    Labels(String),
    Type(String),
    Literal(RdfTerm),
    Null,
    Compare(CompareOp, Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    IsNotNull(Box<Expr>),
    /// `arg: None` is `count(*)`.
    Aggregate {
        func: AggregateFn,
        distinct: bool,
        arg: Option<Box<Expr>>,
    },
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Self {
        Expr::Var(name.into())
    }

    pub fn property(node: impl Into<String>, key: impl Into<String>) -> Self {
        Expr::Property(node.into(), key.into())
    }

    pub fn compare(op: CompareOp, left: Expr, right: Expr) -> Self {
        Expr::Compare(op, Box::new(left), Box::new(right))
    }

    pub fn and(left: Expr, right: Expr) -> Self {
        Expr::And(Box::new(left), Box::new(right))
    }

    pub fn or(left: Expr, right: Expr) -> Self {
        Expr::Or(Box::new(left), Box::new(right))
    }

    pub fn not(inner: Expr) -> Self {
        Expr::Not(Box::new(inner))
    }

    pub fn is_not_null(inner: Expr) -> Self {
        Expr::IsNotNull(Box::new(inner))
    }

    /// Conjunction of `parts`, `None` when empty.
    pub fn all(parts: impl IntoIterator<Item = Expr>) -> Option<Expr> {
        parts.into_iter().reduce(Expr::and)
    }

    pub fn is_aggregate(&self) -> bool {
        matches!(self, Expr::Aggregate { .. })
    }

    /// Identifiers referenced by the expression.
    pub fn names(&self) -> Vec<&str> {
        match self {
            Expr::Var(n) | Expr::Property(n, _) | Expr::Labels(n) | Expr::Type(n) => vec![n],
            Expr::Literal(_) | Expr::Null => Vec::new(),
            Expr::Compare(_, a, b) | Expr::And(a, b) | Expr::Or(a, b) => {
                let mut out = a.names();
                out.extend(b.names());
                out
            }
            Expr::Not(e) | Expr::IsNotNull(e) => e.names(),
            Expr::Aggregate { arg, .. } => arg.as_ref().map_or_else(Vec::new, |a| a.names()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchClause {
    pub optional: bool,
    pub patterns: Vec<PathPattern>,
    pub where_: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Clause {
    Match(MatchClause),
    Unwind {
        expr: Expr,
        alias: String,
    },
    /// `WITH * WHERE cond`
    With {
        where_: Expr,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnItem {
    pub expr: Expr,
    pub alias: Option<String>,
}

impl ReturnItem {
    pub fn new(expr: Expr) -> Self {
        ReturnItem { expr, alias: None }
    }

    pub fn aliased(expr: Expr, alias: impl Into<String>) -> Self {
        ReturnItem {
            expr,
            alias: Some(alias.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SortItem {
    pub expr: Expr,
    pub descending: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnionPart {
    /// `UNION ALL` keeps duplicates.
    pub all: bool,
    pub query: CypherQuery,
}

/// A read query: an optional `CALL { ... }` subquery, reading clauses,
/// the RETURN part, and an optional union continuation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CypherQuery {
    pub call: Option<Box<CypherQuery>>,
    pub clauses: Vec<Clause>,
    pub distinct: bool,
    pub return_items: Vec<ReturnItem>,
    pub order: Vec<SortItem>,
    pub skip: Option<u64>,
    pub limit: Option<u64>,
    pub union: Option<Box<UnionPart>>,
}

impl CypherQuery {
    fn matches(&self, optional: bool) -> impl Iterator<Item = &MatchClause> {
        self.clauses.iter().filter_map(move |c| match c {
            Clause::Match(m) if m.optional == optional => Some(m),
            _ => None,
        })
    }

    /// Patterns of every non-optional MATCH clause.
    pub fn match_patterns(&self) -> Vec<&PathPattern> {
        self.matches(false)
            .flat_map(|m| m.patterns.iter())
            .collect()
    }

    /// Patterns of every OPTIONAL MATCH clause.
    pub fn optional_matches(&self) -> Vec<&PathPattern> {
        self.matches(true).flat_map(|m| m.patterns.iter()).collect()
    }

    /// The WHERE condition of the non-optional MATCH clauses, if any.
    pub fn where_condition(&self) -> Option<&Expr> {
        self.matches(false).find_map(|m| m.where_.as_ref())
    }

    pub fn union_with(&self) -> Option<&CypherQuery> {
        self.union.as_ref().map(|u| &u.query)
    }

    /// This query followed by all union continuations.
    pub fn union_arms(&self) -> Vec<&CypherQuery> {
        let mut out = vec![self];
        let mut cur = self;
        while let Some(next) = cur.union_with() {
            out.push(next);
            cur = next;
        }
        out
    }

    pub fn push_union(&mut self, all: bool, query: CypherQuery) {
        let mut cur = self;
        while cur.union.is_some() {
            cur = &mut cur.union.as_mut().expect("checked").query;
        }
        cur.union = Some(Box::new(UnionPart { all, query }));
    }
}
