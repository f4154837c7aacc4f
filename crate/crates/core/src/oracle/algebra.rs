//! Relational evaluation of a SPARQL pattern: every triple pattern becomes
//! a selection and renaming over the triple table, combined with the
//! NULL-tolerant joins and outer union of [`super::relation`].

use std::collections::HashSet;

use crate::catalog::{classify_triple, SchemaCatalog, TripleClass};
use crate::error::Result;
use crate::rdf::{Literal, RdfGraph, RdfTerm};
use crate::sparql::{
    GraphPattern, PathExpr, PredicatePattern, ProjectionItem, SolutionModifiers, SparqlQuery,
    TermPattern, TriplePattern,
};
use crate::value::{aggregate, Value};

use super::mapping::eval_condition;
use super::relation::{
    distinct, join, left_join, order_by, outer_union, project, select, slice, Attribute,
    GraphRelation, Row,
};

/// Source column of the triple table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    Subject,
    Predicate,
    Object,
}

fn element_name(t: &TermPattern) -> String {
    match t {
        TermPattern::Variable(v) => v.clone(),
        TermPattern::Iri(i) => i.clone(),
        TermPattern::Literal(l) => l.to_string(),
    }
}

fn element_attr(t: &TermPattern) -> Attribute {
    match t {
        TermPattern::Variable(v) => Attribute::var(v.clone()),
        other => Attribute::new(element_name(other)),
    }
}

/// Projection and renaming for one triple pattern: which triple column
/// feeds which attribute.
pub fn gen_pr(tp: &TriplePattern, cat: &SchemaCatalog) -> Result<Vec<(Position, Attribute)>> {
    let subject = element_name(&tp.subject);
    let mut out = vec![(Position::Subject, element_attr(&tp.subject))];
    match &tp.predicate {
        PredicatePattern::Path(_) => {
            out.push((Position::Object, element_attr(&tp.object)));
        }
        PredicatePattern::Term(pred) => {
            let pred_name = element_name(pred);
            match classify_triple(tp, cat)? {
                TripleClass::Type => {
                    if let Some(v) = tp.object.as_var() {
                        out.push((
                            Position::Object,
                            Attribute::named_var(format!("L({subject})"), v),
                        ));
                    }
                }
                TripleClass::Property => {
                    if let Some(v) = tp.object.as_var() {
                        out.push((
                            Position::Object,
                            Attribute::named_var(format!("{subject}.{pred_name}"), v),
                        ));
                    }
                }
                TripleClass::IriEdge | TripleClass::VarEdge => {
                    if pred_name != subject {
                        out.push((Position::Predicate, element_attr(pred)));
                    }
                    out.push((Position::Object, element_attr(&tp.object)));
                }
            }
        }
    }
    // a variable repeated within the pattern yields one attribute
    let mut keys = HashSet::new();
    out.retain(|(_, a)| keys.insert(a.key().to_string()));
    Ok(out)
}

/// Evaluate `q.pattern` relationally.
pub fn eval_algebra(
    pattern: &GraphPattern,
    graph: &RdfGraph,
    cat: &SchemaCatalog,
) -> Result<GraphRelation> {
    let triples: Vec<[RdfTerm; 3]> = graph
        .iter()
        .map(|t| [t.subject.clone(), t.predicate.clone(), t.object.clone()])
        .collect();
    let terms: Vec<RdfTerm> = graph.nodes().into_iter().collect();
    Algebra {
        triples,
        terms,
        cat,
    }
    .pattern(pattern)
}

/// Evaluate the pattern and apply the solution modifiers relationally.
pub fn eval_algebra_query(
    q: &SparqlQuery,
    graph: &RdfGraph,
    cat: &SchemaCatalog,
) -> Result<GraphRelation> {
    let r = eval_algebra(&q.pattern, graph, cat)?;
    Ok(modifiers(&q.modifiers, r))
}

struct Algebra<'c> {
    triples: Vec<[RdfTerm; 3]>,
    terms: Vec<RdfTerm>,
    cat: &'c SchemaCatalog,
}

fn row_lookup<'r>(schema: &'r [Attribute], row: &'r Row) -> impl Fn(&str) -> Option<RdfTerm> + 'r {
    move |v: &str| {
        schema
            .iter()
            .zip(row)
            .find(|(a, val)| a.var.as_deref() == Some(v) && !val.is_null())
            .and_then(|(_, val)| val.as_term().cloned())
    }
}

impl Algebra<'_> {
    fn pattern(&self, p: &GraphPattern) -> Result<GraphRelation> {
        Ok(match p {
            GraphPattern::Bgp(tps) => {
                let mut acc = GraphRelation::with_rows(Vec::new(), vec![Vec::new()]);
                for tp in tps {
                    acc = join(&acc, &self.triple(tp)?);
                }
                acc
            }
            GraphPattern::And(a, b) => join(&self.pattern(a)?, &self.pattern(b)?),
            GraphPattern::Opt(a, b) => {
                let (inner, cond) = match &**b {
                    GraphPattern::Filter(inner, cond) => (&**inner, Some(cond)),
                    other => (other, None),
                };
                let left = self.pattern(a)?;
                let right = self.pattern(inner)?;
                left_join(&left, &right, |schema, row| {
                    cond.is_none_or(|c| eval_condition(c, &row_lookup(schema, row)) == Some(true))
                })
            }
            GraphPattern::Union(a, b) => outer_union(&self.pattern(a)?, &self.pattern(b)?),
            GraphPattern::Filter(inner, cond) => {
                let r = self.pattern(inner)?;
                let schema = r.schema.clone();
                select(&r, |row| {
                    eval_condition(cond, &row_lookup(&schema, row)) == Some(true)
                })
            }
        })
    }

    fn triple(&self, tp: &TriplePattern) -> Result<GraphRelation> {
        let projection = gen_pr(tp, self.cat)?;
        let table: Vec<[RdfTerm; 3]> = match &tp.predicate {
            PredicatePattern::Term(_) => self.triples.clone(),
            PredicatePattern::Path(path) => {
                let mut extra = Vec::new();
                extra.extend(tp.subject.to_term());
                extra.extend(tp.object.to_term());
                let placeholder = RdfTerm::Literal(Literal::string(path.to_string()));
                self.path(path, &extra)
                    .into_iter()
                    .map(|(s, o)| [s, placeholder.clone(), o])
                    .collect()
            }
        };
        let elements: [Option<&TermPattern>; 3] = [
            Some(&tp.subject),
            match &tp.predicate {
                PredicatePattern::Term(t) => Some(t),
                PredicatePattern::Path(_) => None,
            },
            Some(&tp.object),
        ];
        let mut rows = Vec::new();
        'rows: for t in table {
            // selection: constants match, repeated variables agree
            let mut seen: Vec<(&str, &RdfTerm)> = Vec::new();
            for (el, val) in elements.iter().zip(&t) {
                match el {
                    None => {}
                    Some(TermPattern::Variable(v)) => {
                        if let Some((_, prev)) = seen.iter().find(|(n, _)| n == v) {
                            if *prev != val {
                                continue 'rows;
                            }
                        }
                        seen.push((v, val));
                    }
                    Some(c) if c.to_term().as_ref() != Some(val) => continue 'rows,
                    Some(_) => {}
                }
            }
            rows.push(
                projection
                    .iter()
                    .map(|(pos, _)| {
                        Value::Term(
                            t[match pos {
                                Position::Subject => 0,
                                Position::Predicate => 1,
                                Position::Object => 2,
                            }]
                            .clone(),
                        )
                    })
                    .collect(),
            );
        }
        Ok(GraphRelation::with_rows(
            projection.into_iter().map(|(_, a)| a).collect(),
            rows,
        ))
    }

    fn base(&self, iri: &str) -> HashSet<(RdfTerm, RdfTerm)> {
        self.triples
            .iter()
            .filter(|t| t[1].as_iri() == Some(iri))
            .map(|t| (t[0].clone(), t[2].clone()))
            .collect()
    }

    /// Endpoint pairs of a path; closures computed as a join fixpoint.
    fn path(&self, path: &PathExpr, extra: &[RdfTerm]) -> Vec<(RdfTerm, RdfTerm)> {
        match path {
            PathExpr::Predicate(p) => self
                .triples
                .iter()
                .filter(|t| t[1].as_iri() == Some(p.as_str()))
                .map(|t| (t[0].clone(), t[2].clone()))
                .collect(),
            PathExpr::Inverse(p) => self
                .path(&PathExpr::Predicate(p.clone()), extra)
                .into_iter()
                .map(|(s, o)| (o, s))
                .collect(),
            PathExpr::Sequence(a, b) => {
                let left = self.path(a, extra);
                let right = self.path(b, extra);
                let mut out = Vec::new();
                for (s, m) in &left {
                    for (m2, o) in &right {
                        if m == m2 {
                            out.push((s.clone(), o.clone()));
                        }
                    }
                }
                out
            }
            PathExpr::OneOrMore(p) | PathExpr::ZeroOrMore(p) | PathExpr::ZeroOrOne(p) => {
                let base = self.base(p);
                let mut closure = base.clone();
                if !matches!(path, PathExpr::ZeroOrOne(_)) {
                    let mut delta = base.clone();
                    while !delta.is_empty() {
                        let mut next = HashSet::new();
                        for (s, m) in &delta {
                            for (m2, o) in &base {
                                if m == m2 && !closure.contains(&(s.clone(), o.clone())) {
                                    next.insert((s.clone(), o.clone()));
                                }
                            }
                        }
                        closure.extend(next.iter().cloned());
                        delta = next;
                    }
                }
                if !matches!(path, PathExpr::OneOrMore(_)) {
                    for t in self.terms.iter().chain(extra) {
                        closure.insert((t.clone(), t.clone()));
                    }
                }
                closure.into_iter().collect()
            }
        }
    }
}

fn column(r: &GraphRelation, var: &str) -> Vec<Value> {
    match r.position(var) {
        Some(i) => r.rows.iter().map(|row| row[i].clone()).collect(),
        None => vec![Value::Null; r.len()],
    }
}

/// Group/aggregate, order, project, distinct and slice over a relation
/// whose variable columns are keyed by variable name.
pub fn modifiers(mods: &SolutionModifiers, r: GraphRelation) -> GraphRelation {
    let mut r = if mods.has_aggregates() || !mods.group_by.is_empty() {
        group(mods, &r)
    } else {
        r
    };
    let names = mods.output_names();
    let wanted = names
        .iter()
        .copied()
        .chain(mods.order.iter().map(|k| k.var.as_str()));
    for v in wanted {
        if r.position(v).is_none() {
            r.schema.push(Attribute::var(v));
            for row in &mut r.rows {
                row.push(Value::Null);
            }
        }
    }
    if !mods.order.is_empty() {
        let keys: Vec<(usize, bool)> = mods
            .order
            .iter()
            .map(|k| (r.position(&k.var).expect("column added"), k.descending))
            .collect();
        r = order_by(&r, &keys);
    }
    let positions: Vec<usize> = names
        .iter()
        .map(|v| r.position(v).expect("column added"))
        .collect();
    r = project(&r, &positions);
    if mods.distinct {
        r = distinct(&r);
    }
    slice(&r, mods.offset, mods.limit)
}

fn group(mods: &SolutionModifiers, r: &GraphRelation) -> GraphRelation {
    let key_cols: Vec<Vec<Value>> = mods.group_by.iter().map(|v| column(r, v)).collect();
    let mut groups: Vec<(Vec<Value>, Vec<usize>)> = Vec::new();
    for i in 0..r.len() {
        let key: Vec<Value> = key_cols.iter().map(|c| c[i].clone()).collect();
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(i),
            None => groups.push((key, vec![i])),
        }
    }
    if groups.is_empty() && mods.group_by.is_empty() {
        groups.push((Vec::new(), Vec::new()));
    }
    let aggs: Vec<_> = mods
        .projection
        .iter()
        .filter_map(|p| match p {
            ProjectionItem::Aggregate(a) => Some(a),
            ProjectionItem::Var(_) => None,
        })
        .collect();
    let mut schema: Vec<Attribute> = mods.group_by.iter().map(Attribute::var).collect();
    schema.extend(aggs.iter().map(|a| Attribute::var(a.alias.clone())));
    let arg_cols: Vec<Option<Vec<Value>>> = aggs
        .iter()
        .map(|a| a.arg.as_ref().map(|v| column(r, v)))
        .collect();
    let rows = groups
        .into_iter()
        .map(|(key, members)| {
            let mut row = key;
            for (a, col) in aggs.iter().zip(&arg_cols) {
                let values: Vec<Value> = members
                    .iter()
                    .map(|&i| match col {
                        Some(c) => c[i].clone(),
                        None => Value::literal(Literal::boolean(true)),
                    })
                    .collect();
                row.push(aggregate(a.func, a.distinct, &values));
            }
            row
        })
        .collect();
    GraphRelation::with_rows(schema, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_ntriples;
    use crate::sparql::parse_sparql;

    #[test]
    fn gen_pr_names_follow_triple_class() {
        let cat = SchemaCatalog::new(["http://e/rel"], ["http://e/prop"]).unwrap();
        let q = parse_sparql(
            "SELECT * WHERE { ?x a ?t . ?x <http://e/prop> ?v . ?x <http://e/rel> ?y . ?x ?p ?z }",
        )
        .unwrap();
        let names: Vec<Vec<String>> = q
            .pattern
            .triple_patterns()
            .into_iter()
            .map(|tp| {
                gen_pr(tp, &cat)
                    .unwrap()
                    .into_iter()
                    .map(|(_, a)| a.name)
                    .collect()
            })
            .collect();
        assert_eq!(names[0], ["x", "L(x)"]);
        assert_eq!(names[1], ["x", "x.http://e/prop"]);
        assert_eq!(names[2], ["x", "http://e/rel", "y"]);
        assert_eq!(names[3], ["x", "p", "z"]);
    }

    #[test]
    fn closure_fixpoint() {
        let g = parse_ntriples(
            "<http://e/a> <http://e/rel> <http://e/b> .\n<http://e/b> <http://e/rel> <http://e/c> .\n",
        )
        .unwrap();
        let cat = SchemaCatalog::new(["http://e/rel"], Vec::<String>::new()).unwrap();
        let q = parse_sparql("SELECT * WHERE { ?x <http://e/rel>+ ?y }").unwrap();
        assert_eq!(eval_algebra_query(&q, &g, &cat).unwrap().len(), 3);
    }
}
