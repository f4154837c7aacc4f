//! Direct SPARQL evaluation over an RDF graph: solution mappings under
//! bag semantics, then the solution modifiers.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use crate::rdf::{RdfGraph, RdfTerm, RdfTriple};
use crate::sparql::{
    Expr, GraphPattern, PathExpr, PredicatePattern, ProjectionItem, SolutionModifiers, SparqlQuery,
    TermPattern, TriplePattern,
};
use crate::value::{aggregate, sort_cmp, sparql_compare, Value};

/// Variable name (without `?`) to bound term.
pub type Mapping = BTreeMap<String, RdfTerm>;

/// Evaluate the whole query, modifiers included.
pub fn eval_mapping(q: &SparqlQuery, graph: &RdfGraph) -> Vec<Mapping> {
    let solutions = eval_pattern(&q.pattern, graph);
    apply_modifiers(&q.modifiers, solutions)
}

/// Evaluate a graph pattern to a bag of mappings.
pub fn eval_pattern(p: &GraphPattern, graph: &RdfGraph) -> Vec<Mapping> {
    Evaluator::new(graph).pattern(p)
}

/// SPARQL three-valued condition evaluation; `None` is an error.
pub fn eval_condition(e: &Expr, lookup: &dyn Fn(&str) -> Option<RdfTerm>) -> Option<bool> {
    match e {
        Expr::Compare(op, a, b) => {
            let a = operand(a, lookup)?;
            let b = operand(b, lookup)?;
            sparql_compare(*op, &a, &b)
        }
        Expr::And(a, b) => match (eval_condition(a, lookup), eval_condition(b, lookup)) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        },
        Expr::Or(a, b) => match (eval_condition(a, lookup), eval_condition(b, lookup)) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(false), Some(false)) => Some(false),
            _ => None,
        },
        Expr::Not(inner) => eval_condition(inner, lookup).map(|b| !b),
        Expr::Var(_) | Expr::Const(_) => {
            let term = operand(e, lookup)?;
            effective_boolean(&term)
        }
    }
}

fn operand(e: &Expr, lookup: &dyn Fn(&str) -> Option<RdfTerm>) -> Option<RdfTerm> {
    match e {
        Expr::Var(v) => lookup(v),
        Expr::Const(t) => Some(t.clone()),
        _ => eval_condition(e, lookup).map(|b| RdfTerm::Literal(crate::rdf::Literal::boolean(b))),
    }
}

fn effective_boolean(term: &RdfTerm) -> Option<bool> {
    let lit = term.as_literal()?;
    if let Some(b) = lit.as_bool() {
        return Some(b);
    }
    if let Some(f) = lit.as_f64() {
        return Some(f != 0.0 && !f.is_nan());
    }
    if lit.is_plain() {
        return Some(!lit.lexical().is_empty());
    }
    None
}

fn compatible(a: &Mapping, b: &Mapping) -> bool {
    a.iter().all(|(k, v)| b.get(k).is_none_or(|w| w == v))
}

fn merged(a: &Mapping, b: &Mapping) -> Mapping {
    let mut m = a.clone();
    m.extend(b.iter().map(|(k, v)| (k.clone(), v.clone())));
    m
}

fn join(left: &[Mapping], right: &[Mapping]) -> Vec<Mapping> {
    let mut out = Vec::new();
    for a in left {
        for b in right {
            if compatible(a, b) {
                out.push(merged(a, b));
            }
        }
    }
    out
}

struct Evaluator<'g> {
    triples: Vec<&'g RdfTriple>,
    by_predicate: HashMap<&'g str, Vec<&'g RdfTriple>>,
    terms: Vec<RdfTerm>,
}

impl<'g> Evaluator<'g> {
    fn new(graph: &'g RdfGraph) -> Self {
        let triples: Vec<&RdfTriple> = graph.iter().collect();
        let mut by_predicate: HashMap<&str, Vec<&RdfTriple>> = HashMap::new();
        for t in &triples {
            by_predicate.entry(t.predicate_iri()).or_default().push(t);
        }
        Evaluator {
            triples,
            by_predicate,
            terms: graph.nodes().into_iter().collect(),
        }
    }

    fn pattern(&self, p: &GraphPattern) -> Vec<Mapping> {
        match p {
            GraphPattern::Bgp(tps) => {
                let mut sols = vec![Mapping::new()];
                for tp in tps {
                    let mut next = Vec::new();
                    for m in &sols {
                        self.extend(tp, m, &mut next);
                    }
                    sols = next;
                }
                sols
            }
            GraphPattern::And(a, b) => join(&self.pattern(a), &self.pattern(b)),
            GraphPattern::Opt(a, b) => {
                // a filter directly inside the optional part is its condition
                let (inner, cond) = match &**b {
                    GraphPattern::Filter(inner, cond) => (&**inner, Some(cond)),
                    other => (other, None),
                };
                let right = self.pattern(inner);
                let mut out = Vec::new();
                for m in self.pattern(a) {
                    let mut matched = false;
                    for r in &right {
                        if !compatible(&m, r) {
                            continue;
                        }
                        let joined = merged(&m, r);
                        let ok = cond.is_none_or(|c| {
                            eval_condition(c, &|v| joined.get(v).cloned()) == Some(true)
                        });
                        if ok {
                            out.push(joined);
                            matched = true;
                        }
                    }
                    if !matched {
                        out.push(m);
                    }
                }
                out
            }
            GraphPattern::Union(a, b) => {
                let mut out = self.pattern(a);
                out.extend(self.pattern(b));
                out
            }
            GraphPattern::Filter(inner, cond) => self
                .pattern(inner)
                .into_iter()
                .filter(|m| eval_condition(cond, &|v| m.get(v).cloned()) == Some(true))
                .collect(),
        }
    }

    /// All extensions of `m` matching one triple pattern.
    fn extend(&self, tp: &TriplePattern, m: &Mapping, out: &mut Vec<Mapping>) {
        match &tp.predicate {
            PredicatePattern::Term(pred) => {
                let bound_pred = match pred {
                    TermPattern::Variable(v) => {
                        m.get(v).and_then(|t| t.as_iri().map(str::to_string))
                    }
                    TermPattern::Iri(i) => Some(i.clone()),
                    TermPattern::Literal(_) => return,
                };
                let candidates: &[&RdfTriple] = match &bound_pred {
                    Some(p) => self.by_predicate.get(p.as_str()).map_or(&[], Vec::as_slice),
                    None => &self.triples,
                };
                for t in candidates {
                    let mut next = m.clone();
                    if bind(&tp.subject, &t.subject, &mut next)
                        && bind(pred, &t.predicate, &mut next)
                        && bind(&tp.object, &t.object, &mut next)
                    {
                        out.push(next);
                    }
                }
            }
            PredicatePattern::Path(path) => {
                let mut extra = Vec::new();
                for end in [&tp.subject, &tp.object] {
                    if let Some(t) = end.to_term() {
                        extra.push(t);
                    } else if let Some(t) = end.as_var().and_then(|v| m.get(v)) {
                        extra.push(t.clone());
                    }
                }
                for (s, o) in self.path_pairs(path, &extra) {
                    let mut next = m.clone();
                    if bind(&tp.subject, &s, &mut next) && bind(&tp.object, &o, &mut next) {
                        out.push(next);
                    }
                }
            }
        }
    }

    fn edges(&self, iri: &str) -> Vec<(RdfTerm, RdfTerm)> {
        self.by_predicate
            .get(iri)
            .map(|ts| {
                ts.iter()
                    .map(|t| (t.subject.clone(), t.object.clone()))
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Endpoint pairs of a path. Plain steps and sequences keep
    /// duplicates; closures yield each pair once.
    fn path_pairs(&self, path: &PathExpr, extra: &[RdfTerm]) -> Vec<(RdfTerm, RdfTerm)> {
        match path {
            PathExpr::Predicate(p) => self.edges(p),
            PathExpr::Inverse(p) => self.edges(p).into_iter().map(|(s, o)| (o, s)).collect(),
            PathExpr::Sequence(a, b) => {
                let left = self.path_pairs(a, extra);
                let right = self.path_pairs(b, extra);
                let mut by_start: HashMap<&RdfTerm, Vec<&RdfTerm>> = HashMap::new();
                for (s, o) in &right {
                    by_start.entry(s).or_default().push(o);
                }
                let mut out = Vec::new();
                for (s, mid) in &left {
                    for o in by_start.get(mid).into_iter().flatten() {
                        out.push((s.clone(), (*o).clone()));
                    }
                }
                out
            }
            PathExpr::ZeroOrMore(p) | PathExpr::OneOrMore(p) | PathExpr::ZeroOrOne(p) => {
                let mut adjacency: HashMap<RdfTerm, Vec<RdfTerm>> = HashMap::new();
                for (s, o) in self.edges(p) {
                    adjacency.entry(s).or_default().push(o);
                }
                let zero = !matches!(path, PathExpr::OneOrMore(_));
                let unbounded = !matches!(path, PathExpr::ZeroOrOne(_));
                let mut starts: Vec<RdfTerm> = self.terms.clone();
                starts.extend(extra.iter().cloned());
                let mut seen_start = HashSet::new();
                let mut out = Vec::new();
                for start in starts {
                    if !seen_start.insert(start.clone()) {
                        continue;
                    }
                    let mut reached: HashSet<RdfTerm> = HashSet::new();
                    if zero {
                        reached.insert(start.clone());
                        out.push((start.clone(), start.clone()));
                    }
                    let mut queue = VecDeque::from([(start.clone(), 0usize)]);
                    while let Some((cur, depth)) = queue.pop_front() {
                        if !unbounded && depth == 1 {
                            continue;
                        }
                        for next in adjacency.get(&cur).into_iter().flatten() {
                            if reached.insert(next.clone()) {
                                out.push((start.clone(), next.clone()));
                                queue.push_back((next.clone(), depth + 1));
                            }
                        }
                    }
                }
                out
            }
        }
    }
}

fn bind(pattern: &TermPattern, term: &RdfTerm, m: &mut Mapping) -> bool {
    match pattern {
        TermPattern::Variable(v) => match m.get(v) {
            Some(existing) => existing == term,
            None => {
                m.insert(v.clone(), term.clone());
                true
            }
        },
        other => other.to_term().as_ref() == Some(term),
    }
}

/// GROUP BY / aggregates, ORDER BY, projection, DISTINCT, OFFSET, LIMIT.
pub fn apply_modifiers(mods: &SolutionModifiers, solutions: Vec<Mapping>) -> Vec<Mapping> {
    let mut solutions = if mods.has_aggregates() || !mods.group_by.is_empty() {
        group(mods, solutions)
    } else {
        solutions
    };
    if !mods.order.is_empty() {
        let value = |m: &Mapping, v: &str| Value::from(m.get(v).cloned());
        solutions.sort_by(|a, b| {
            for key in &mods.order {
                let ord = sort_cmp(&value(a, &key.var), &value(b, &key.var));
                let ord = if key.descending { ord.reverse() } else { ord };
                if ord.is_ne() {
                    return ord;
                }
            }
            std::cmp::Ordering::Equal
        });
    }
    let names = mods.output_names();
    let mut projected: Vec<Mapping> = solutions
        .into_iter()
        .map(|m| {
            m.into_iter()
                .filter(|(k, _)| names.contains(&k.as_str()))
                .collect()
        })
        .collect();
    if mods.distinct {
        let mut seen = HashSet::new();
        projected.retain(|m| seen.insert(m.clone()));
    }
    let skip = mods.offset.unwrap_or(0) as usize;
    let limit = mods.limit.map_or(usize::MAX, |l| l as usize);
    projected.into_iter().skip(skip).take(limit).collect()
}

fn group(mods: &SolutionModifiers, solutions: Vec<Mapping>) -> Vec<Mapping> {
    let mut groups: Vec<(Vec<Option<RdfTerm>>, Vec<Mapping>)> = Vec::new();
    let mut index: HashMap<Vec<Option<RdfTerm>>, usize> = HashMap::new();
    for m in solutions {
        let key: Vec<Option<RdfTerm>> = mods.group_by.iter().map(|v| m.get(v).cloned()).collect();
        let slot = *index.entry(key.clone()).or_insert_with(|| {
            groups.push((key, Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push(m);
    }
    if groups.is_empty() && mods.group_by.is_empty() {
        groups.push((Vec::new(), Vec::new()));
    }
    groups
        .into_iter()
        .map(|(key, members)| {
            let mut out = Mapping::new();
            for (v, t) in mods.group_by.iter().zip(key) {
                if let Some(t) = t {
                    out.insert(v.clone(), t);
                }
            }
            for item in &mods.projection {
                let ProjectionItem::Aggregate(agg) = item else {
                    continue;
                };
                let values: Vec<Value> = members
                    .iter()
                    .map(|m| match &agg.arg {
                        Some(v) => Value::from(m.get(v).cloned()),
                        None => Value::literal(crate::rdf::Literal::boolean(true)),
                    })
                    .collect();
                if let Value::Term(t) = aggregate(agg.func, agg.distinct, &values) {
                    out.insert(agg.alias.clone(), t);
                }
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{parse_ntriples, Literal};
    use crate::sparql::parse_sparql;

    const DATA: &str = "<http://e/a> <http://e/p> <http://e/b> .\n\
        <http://e/b> <http://e/p> <http://e/c> .\n\
        <http://e/a> <http://e/v> \"1\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n\
        <http://e/b> <http://e/v> \"5\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n";

    fn run(q: &str) -> Vec<Mapping> {
        eval_mapping(&parse_sparql(q).unwrap(), &parse_ntriples(DATA).unwrap())
    }

    #[test]
    fn paths_and_closures() {
        assert_eq!(run("SELECT * WHERE { ?x <http://e/p>+ ?y }").len(), 3);
        assert_eq!(
            run("SELECT * WHERE { ?x <http://e/p>/<http://e/p> ?y }").len(),
            1
        );
        // every term in the graph reaches itself
        let star = run("SELECT * WHERE { <http://e/a> <http://e/p>* ?y }");
        assert_eq!(star.len(), 3);
        assert_eq!(run("SELECT * WHERE { ?x ^<http://e/p> ?y }").len(), 2);
    }

    #[test]
    fn optional_filter_and_aggregates() {
        let rows = run(
            "SELECT ?x ?w WHERE { ?x <http://e/p> ?y OPTIONAL { ?x <http://e/v> ?w FILTER(?w > 2) } }",
        );
        assert_eq!(rows.len(), 2);
        assert_eq!(rows.iter().filter(|m| m.contains_key("w")).count(), 1);
        let sum = run("SELECT (SUM(?w) AS ?s) WHERE { ?x <http://e/v> ?w }");
        assert_eq!(sum[0]["s"], RdfTerm::Literal(Literal::integer(6)));
        let none = run("SELECT (COUNT(*) AS ?c) WHERE { ?x <http://e/nothing> ?w }");
        assert_eq!(none[0]["c"], RdfTerm::Literal(Literal::integer(0)));
    }

    #[test]
    fn order_and_slice() {
        let rows = run("SELECT ?w WHERE { ?x <http://e/v> ?w } ORDER BY DESC(?w) LIMIT 1");
        assert_eq!(rows[0]["w"], RdfTerm::Literal(Literal::integer(5)));
    }
}
