use std::fmt;

use indexmap::IndexSet;

use crate::rdf::{escape_string, Literal, PrefixMap, RdfTerm};
use crate::value::{AggregateFn, CompareOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Variable,
    Iri,
    Literal,
}

/// One position of a triple pattern. Variables are stored without `?`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermPattern {
    Variable(String),
    Iri(String),
    Literal(Literal),
}

impl TermPattern {
    pub fn var(name: impl Into<String>) -> Self {
        TermPattern::Variable(name.into())
    }

    pub fn iri(iri: impl Into<String>) -> Self {
        TermPattern::Iri(iri.into())
    }

    pub fn kind(&self) -> ElementKind {
        element_kind(self)
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            TermPattern::Variable(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            TermPattern::Iri(i) => Some(i),
            _ => None,
        }
    }

    /// The constant RDF term, if this position is not a variable.
    pub fn to_term(&self) -> Option<RdfTerm> {
        match self {
            TermPattern::Variable(_) => None,
            TermPattern::Iri(i) => Some(RdfTerm::Iri(i.clone())),
            TermPattern::Literal(l) => Some(RdfTerm::Literal(l.clone())),
        }
    }
}

/// Classify a triple element as variable, IRI or literal.
pub fn element_kind(element: &TermPattern) -> ElementKind {
    match element {
        TermPattern::Variable(_) => ElementKind::Variable,
        TermPattern::Iri(_) => ElementKind::Iri,
        TermPattern::Literal(_) => ElementKind::Literal,
    }
}

/// The property-path shapes that have a Cypher counterpart.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PathExpr {
    Predicate(String),
    Inverse(String),
    ZeroOrMore(String),
    OneOrMore(String),
    ZeroOrOne(String),
    Sequence(Box<PathExpr>, Box<PathExpr>),
}

impl PathExpr {
    pub fn sequence(first: PathExpr, second: PathExpr) -> Self {
        PathExpr::Sequence(Box::new(first), Box::new(second))
    }

    pub fn iri(&self) -> Option<&str> {
        match self {
            PathExpr::Predicate(i)
            | PathExpr::Inverse(i)
            | PathExpr::ZeroOrMore(i)
            | PathExpr::OneOrMore(i)
            | PathExpr::ZeroOrOne(i) => Some(i),
            PathExpr::Sequence(..) => None,
        }
    }

    /// Non-sequence steps in order.
    pub fn steps(&self) -> Vec<&PathExpr> {
        match self {
            PathExpr::Sequence(a, b) => {
                let mut out = a.steps();
                out.extend(b.steps());
                out
            }
            other => vec![other],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PredicatePattern {
    Term(TermPattern),
    Path(PathExpr),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: TermPattern,
    pub predicate: PredicatePattern,
    pub object: TermPattern,
}

impl TriplePattern {
    pub fn new(subject: TermPattern, predicate: TermPattern, object: TermPattern) -> Self {
        TriplePattern {
            subject,
            predicate: PredicatePattern::Term(predicate),
            object,
        }
    }

    pub fn with_path(subject: TermPattern, path: PathExpr, object: TermPattern) -> Self {
        TriplePattern {
            subject,
            predicate: PredicatePattern::Path(path),
            object,
        }
    }

    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        out.extend(self.subject.as_var());
        if let PredicatePattern::Term(t) = &self.predicate {
            out.extend(t.as_var());
        }
        out.extend(self.object.as_var());
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphPattern {
    Bgp(Vec<TriplePattern>),
    And(Box<GraphPattern>, Box<GraphPattern>),
    Opt(Box<GraphPattern>, Box<GraphPattern>),
    Union(Box<GraphPattern>, Box<GraphPattern>),
    Filter(Box<GraphPattern>, Expr),
}

impl GraphPattern {
    pub fn and(left: GraphPattern, right: GraphPattern) -> Self {
        GraphPattern::And(Box::new(left), Box::new(right))
    }

    pub fn opt(left: GraphPattern, right: GraphPattern) -> Self {
        GraphPattern::Opt(Box::new(left), Box::new(right))
    }

    pub fn union(left: GraphPattern, right: GraphPattern) -> Self {
        GraphPattern::Union(Box::new(left), Box::new(right))
    }

    pub fn filter(inner: GraphPattern, cond: Expr) -> Self {
        GraphPattern::Filter(Box::new(inner), cond)
    }

    /// Variables in order of first appearance.
    pub fn variables(&self) -> IndexSet<String> {
        let mut out = IndexSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut IndexSet<String>) {
        match self {
            GraphPattern::Bgp(tps) => {
                for tp in tps {
                    for v in tp.variables() {
                        out.insert(v.to_string());
                    }
                }
            }
            GraphPattern::And(a, b) | GraphPattern::Opt(a, b) | GraphPattern::Union(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            GraphPattern::Filter(inner, _) => inner.collect_vars(out),
        }
    }

    /// Every triple pattern in the tree, left to right.
    pub fn triple_patterns(&self) -> Vec<&TriplePattern> {
        match self {
            GraphPattern::Bgp(tps) => tps.iter().collect(),
            GraphPattern::And(a, b) | GraphPattern::Opt(a, b) | GraphPattern::Union(a, b) => {
                let mut out = a.triple_patterns();
                out.extend(b.triple_patterns());
                out
            }
            GraphPattern::Filter(inner, _) => inner.triple_patterns(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(String),
    Const(RdfTerm),
    Compare(CompareOp, Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Self {
        Expr::Var(name.into())
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

    pub fn variables(&self) -> IndexSet<String> {
        let mut out = IndexSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut IndexSet<String>) {
        match self {
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Const(_) => {}
            Expr::Compare(_, a, b) | Expr::And(a, b) | Expr::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Not(inner) => inner.collect_vars(out),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aggregate {
    pub func: AggregateFn,
    /// `None` is `COUNT(*)`.
    pub arg: Option<String>,
    pub distinct: bool,
    pub alias: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProjectionItem {
    Var(String),
    Aggregate(Aggregate),
}

impl ProjectionItem {
    /// Output variable of this item.
    pub fn name(&self) -> &str {
        match self {
            ProjectionItem::Var(v) => v,
            ProjectionItem::Aggregate(a) => &a.alias,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderKey {
    pub var: String,
    pub descending: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolutionModifiers {
    pub projection: Vec<ProjectionItem>,
    /// `SELECT *`; `projection` then lists every pattern variable.
    pub select_all: bool,
    pub distinct: bool,
    pub order: Vec<OrderKey>,
    pub limit: Option<u64>,
    pub offset: Option<u64>,
    pub group_by: Vec<String>,
}

impl SolutionModifiers {
    pub fn has_aggregates(&self) -> bool {
        self.projection
            .iter()
            .any(|p| matches!(p, ProjectionItem::Aggregate(_)))
    }

    pub fn output_names(&self) -> Vec<&str> {
        self.projection.iter().map(ProjectionItem::name).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparqlQuery {
    pub prefixes: PrefixMap,
    pub pattern: GraphPattern,
    pub modifiers: SolutionModifiers,
}

impl fmt::Display for TermPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermPattern::Variable(v) => write!(f, "?{v}"),
            TermPattern::Iri(i) => write!(f, "<{i}>"),
            TermPattern::Literal(l) => write_literal(f, l),
        }
    }
}

fn write_literal(f: &mut fmt::Formatter<'_>, lit: &Literal) -> fmt::Result {
    write!(f, "\"{}\"", escape_string(lit.lexical()))?;
    if let Some(lang) = lit.language() {
        write!(f, "@{lang}")
    } else if let Some(dt) = lit.datatype() {
        write!(f, "^^<{dt}>")
    } else {
        Ok(())
    }
}

impl fmt::Display for PathExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathExpr::Predicate(i) => write!(f, "<{i}>"),
            PathExpr::Inverse(i) => write!(f, "^<{i}>"),
            PathExpr::ZeroOrMore(i) => write!(f, "<{i}>*"),
            PathExpr::OneOrMore(i) => write!(f, "<{i}>+"),
            PathExpr::ZeroOrOne(i) => write!(f, "<{i}>?"),
            PathExpr::Sequence(a, b) => {
                if matches!(**b, PathExpr::Sequence(..)) {
                    write!(f, "{a}/({b})")
                } else {
                    write!(f, "{a}/{b}")
                }
            }
        }
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.subject)?;
        match &self.predicate {
            PredicatePattern::Term(t) => write!(f, "{t}")?,
            PredicatePattern::Path(p) => write!(f, "{p}")?,
        }
        write!(f, " {} .", self.object)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(v) => write!(f, "?{v}"),
            Expr::Const(RdfTerm::Literal(l)) => write_literal(f, l),
            Expr::Const(t) => write!(f, "{t}"),
            Expr::Compare(op, a, b) => write!(f, "({a} {} {b})", op.sparql_symbol()),
            Expr::And(a, b) => write!(f, "({a} && {b})"),
            Expr::Or(a, b) => write!(f, "({a} || {b})"),
            Expr::Not(inner) => write!(f, "(!{inner})"),
        }
    }
}

impl fmt::Display for GraphPattern {
    /// Always printed as a braced group so that re-parsing rebuilds the
    /// same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphPattern::Bgp(tps) => {
                f.write_str("{ ")?;
                for tp in tps {
                    write!(f, "{tp} ")?;
                }
                f.write_str("}")
            }
            GraphPattern::And(a, b) => write!(f, "{{ {a} {b} }}"),
            GraphPattern::Opt(a, b) => write!(f, "{{ {a} OPTIONAL {b} }}"),
            GraphPattern::Union(a, b) => write!(f, "{{ {a} UNION {b} }}"),
            GraphPattern::Filter(inner, cond) => write!(f, "{{ {inner} FILTER {cond} }}"),
        }
    }
}

impl fmt::Display for SparqlQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (prefix, ns) in self.prefixes.iter() {
            writeln!(f, "PREFIX {prefix}: <{ns}>")?;
        }
        let m = &self.modifiers;
        f.write_str("SELECT ")?;
        if m.distinct {
            f.write_str("DISTINCT ")?;
        }
        if m.select_all {
            f.write_str("*")?;
        } else {
            for (i, item) in m.projection.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                match item {
                    ProjectionItem::Var(v) => write!(f, "?{v}")?,
                    ProjectionItem::Aggregate(a) => {
                        write!(f, "({}(", a.func.name().to_ascii_uppercase())?;
                        if a.distinct {
                            f.write_str("DISTINCT ")?;
                        }
                        match &a.arg {
                            Some(v) => write!(f, "?{v}")?,
                            None => f.write_str("*")?,
                        }
                        write!(f, ") AS ?{})", a.alias)?;
                    }
                }
            }
        }
        write!(f, "\nWHERE {}", self.pattern)?;
        if !m.group_by.is_empty() {
            f.write_str("\nGROUP BY")?;
            for v in &m.group_by {
                write!(f, " ?{v}")?;
            }
        }
        if !m.order.is_empty() {
            f.write_str("\nORDER BY")?;
            for key in &m.order {
                let dir = if key.descending { "DESC" } else { "ASC" };
                write!(f, " {dir}(?{})", key.var)?;
            }
        }
        if let Some(limit) = m.limit {
            write!(f, "\nLIMIT {limit}")?;
        }
        if let Some(offset) = m.offset {
            write!(f, "\nOFFSET {offset}")?;
        }
        Ok(())
    }
}
