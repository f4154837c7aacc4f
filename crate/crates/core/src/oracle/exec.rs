//! Reference evaluator for the Cypher subset produced by the translator.
//!
//! Pattern matching is homomorphic: two relationship patterns in one MATCH
//! may bind the same relationship. Variable-length patterns enumerate
//! relationship-distinct walks up to `max_depth` hops when unbounded.

use std::collections::{HashMap, HashSet};

use crate::cypher::{
    column_name, Clause, CypherQuery, Direction, Expr, MatchClause, NodePattern, PathPattern,
    RelationshipPattern, ReturnItem,
};
use crate::error::{Error, Result};
use crate::pg::{NodeId, PropertyGraph, RelId};
use crate::rdf::{Literal, RdfTerm};
use crate::value::{aggregate, cypher_compare, sort_cmp, CompareOp, Value};

use super::relation::{Attribute, GraphRelation};

pub const DEFAULT_MAX_DEPTH: u32 = 15;

#[derive(Debug, Clone, Copy)]
pub struct ExecOptions {
    /// Upper bound for unbounded variable-length relationships.
    pub max_depth: u32,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions {
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

type Env = HashMap<String, Value>;

/// Run `query` against `graph`. Columns are named after the RETURN items.
pub fn exec(query: &CypherQuery, graph: &PropertyGraph) -> Result<GraphRelation> {
    exec_with(query, graph, ExecOptions::default())
}

pub fn exec_with(
    query: &CypherQuery,
    graph: &PropertyGraph,
    options: ExecOptions,
) -> Result<GraphRelation> {
    Executor { graph, options }.query(query)
}

struct Executor<'g> {
    graph: &'g PropertyGraph,
    options: ExecOptions,
}

fn truth(v: &Value) -> Option<bool> {
    v.as_term()
        .and_then(RdfTerm::as_literal)
        .and_then(Literal::as_bool)
}

fn boolean(b: Option<bool>) -> Value {
    b.map_or(Value::Null, |b| Value::literal(Literal::boolean(b)))
}

impl Executor<'_> {
    fn query(&self, q: &CypherQuery) -> Result<GraphRelation> {
        let mut result = self.single(q)?;
        let mut dedupe = false;
        let mut cur = q;
        while let Some(part) = &cur.union {
            let arm = self.single(&part.query)?;
            if arm.schema.len() != result.schema.len() {
                return Err(Error::UnunifiableUnion {
                    left: result.schema.len(),
                    right: arm.schema.len(),
                });
            }
            result.rows.extend(arm.rows);
            dedupe |= !part.all;
            cur = &part.query;
        }
        if dedupe {
            result = super::relation::distinct(&result);
        }
        Ok(result)
    }

    fn single(&self, q: &CypherQuery) -> Result<GraphRelation> {
        let mut rows: Vec<Env> = match &q.call {
            Some(inner) => {
                let sub = self.query(inner)?;
                sub.rows
                    .into_iter()
                    .map(|row| sub.schema.iter().map(|a| a.name.clone()).zip(row).collect())
                    .collect()
            }
            None => vec![Env::new()],
        };
        for clause in &q.clauses {
            rows = self.clause(clause, rows)?;
        }
        self.project(q, rows)
    }

    fn clause(&self, clause: &Clause, rows: Vec<Env>) -> Result<Vec<Env>> {
        let mut out = Vec::new();
        match clause {
            Clause::Match(m) => {
                for env in rows {
                    let matches = self.match_clause(m, &env)?;
                    if matches.is_empty() && m.optional {
                        let mut padded = env.clone();
                        for p in &m.patterns {
                            for name in p.names() {
                                padded.entry(name.to_string()).or_insert(Value::Null);
                            }
                        }
                        out.push(padded);
                    } else {
                        out.extend(matches);
                    }
                }
            }
            Clause::Unwind { expr, alias } => {
                for env in rows {
                    let items = match self.eval(expr, &env)? {
                        Value::Null => Vec::new(),
                        Value::List(items) => items,
                        other => vec![other],
                    };
                    for item in items {
                        let mut next = env.clone();
                        next.insert(alias.clone(), item);
                        out.push(next);
                    }
                }
            }
            Clause::With { where_ } => {
                for env in rows {
                    if truth(&self.eval(where_, &env)?) == Some(true) {
                        out.push(env);
                    }
                }
            }
        }
        Ok(out)
    }

    fn match_clause(&self, m: &MatchClause, env: &Env) -> Result<Vec<Env>> {
        let mut envs = vec![env.clone()];
        for p in &m.patterns {
            let mut next = Vec::new();
            for e in &envs {
                self.match_path(p, e, &mut next);
            }
            envs = next;
        }
        match &m.where_ {
            None => Ok(envs),
            Some(cond) => {
                let mut kept = Vec::new();
                for e in envs {
                    if truth(&self.eval(cond, &e)?) == Some(true) {
                        kept.push(e);
                    }
                }
                Ok(kept)
            }
        }
    }

    fn node_ok(&self, np: &NodePattern, id: NodeId) -> bool {
        np.labels.iter().all(|l| self.graph.has_label(id, l))
            && np.properties.iter().all(|(k, v)| {
                self.graph.node_property(id, k).is_some_and(|actual| {
                    cypher_compare(CompareOp::Eq, actual, &Value::Term(v.clone())) == Some(true)
                })
            })
    }

    fn bind(env: &Env, name: Option<&str>, value: Value) -> Option<Env> {
        let Some(name) = name else {
            return Some(env.clone());
        };
        match env.get(name) {
            Some(existing) if *existing == value => Some(env.clone()),
            Some(_) => None,
            None => {
                let mut next = env.clone();
                next.insert(name.to_string(), value);
                Some(next)
            }
        }
    }

    fn bind_node(&self, np: &NodePattern, id: NodeId, env: &Env) -> Option<Env> {
        if !self.node_ok(np, id) {
            return None;
        }
        Self::bind(env, np.name_str(), Value::Node(id))
    }

    fn match_path(&self, p: &PathPattern, env: &Env, out: &mut Vec<Env>) {
        let starts: Vec<NodeId> = match p.start.name_str().and_then(|n| env.get(n)) {
            Some(Value::Node(id)) => vec![*id],
            Some(_) => Vec::new(),
            None => self.graph.node_ids().collect(),
        };
        for id in starts {
            if let Some(e) = self.bind_node(&p.start, id, env) {
                self.steps(&p.steps, id, e, out);
            }
        }
    }

    fn steps(
        &self,
        steps: &[(RelationshipPattern, NodePattern)],
        cur: NodeId,
        env: Env,
        out: &mut Vec<Env>,
    ) {
        let Some(((rp, np), rest)) = steps.split_first() else {
            out.push(env);
            return;
        };
        match rp.range {
            None => {
                for (rel, next) in self.expand(cur, rp) {
                    let Some(e) = Self::bind(&env, rp.name_str(), Value::Rel(rel)) else {
                        continue;
                    };
                    if let Some(e) = self.bind_node(np, next, &e) {
                        self.steps(rest, next, e, out);
                    }
                }
            }
            Some(range) => {
                let max = range.max.unwrap_or(self.options.max_depth);
                let mut walks = Vec::new();
                let mut path = Vec::new();
                self.walk(cur, rp, range.min, max, &mut path, &mut walks);
                for (rels, end) in walks {
                    let list = Value::List(rels.into_iter().map(Value::Rel).collect());
                    let Some(e) = Self::bind(&env, rp.name_str(), list) else {
                        continue;
                    };
                    if let Some(e) = self.bind_node(np, end, &e) {
                        self.steps(rest, end, e, out);
                    }
                }
            }
        }
    }

    /// Single hops from `cur` matching the relationship pattern.
    fn expand(&self, cur: NodeId, rp: &RelationshipPattern) -> Vec<(RelId, NodeId)> {
        let g = self.graph;
        let mut hops = Vec::new();
        if matches!(rp.direction, Direction::Out | Direction::Both) {
            hops.extend(g.outgoing(cur).iter().map(|&r| (r, g.endpoints(r).1)));
        }
        if matches!(rp.direction, Direction::In | Direction::Both) {
            hops.extend(
                g.incoming(cur)
                    .iter()
                    // an undirected self-loop is one hop, not two
                    .filter(|&&r| rp.direction == Direction::In || g.endpoints(r).0 != cur)
                    .map(|&r| (r, g.endpoints(r).0)),
            );
        }
        hops.retain(|&(r, _)| {
            rp.rel_type.as_deref().is_none_or(|t| g.rel_type(r) == t)
                && rp.properties.iter().all(|(k, v)| {
                    g.relationship(r).properties.get(k).is_some_and(|actual| {
                        cypher_compare(CompareOp::Eq, actual, &Value::Term(v.clone())) == Some(true)
                    })
                })
        });
        hops
    }

    fn walk(
        &self,
        cur: NodeId,
        rp: &RelationshipPattern,
        min: u32,
        max: u32,
        path: &mut Vec<RelId>,
        out: &mut Vec<(Vec<RelId>, NodeId)>,
    ) {
        let depth = path.len() as u32;
        if depth >= min {
            out.push((path.clone(), cur));
        }
        if depth == max {
            return;
        }
        for (rel, next) in self.expand(cur, rp) {
            if path.contains(&rel) {
                continue;
            }
            path.push(rel);
            self.walk(next, rp, min, max, path, out);
            path.pop();
        }
    }

    fn eval(&self, e: &Expr, env: &Env) -> Result<Value> {
        let g = self.graph;
        let lookup = |n: &str| env.get(n).ok_or_else(|| Error::UnboundName(n.to_string()));
        Ok(match e {
            Expr::Var(n) => lookup(n)?.clone(),
            Expr::Property(n, k) => match lookup(n)? {
                Value::Node(id) => g.node_property(*id, k).cloned().unwrap_or(Value::Null),
                Value::Rel(id) => g
                    .relationship(*id)
                    .properties
                    .get(k)
                    .cloned()
                    .unwrap_or(Value::Null),
                _ => Value::Null,
            },
            Expr::Labels(n) => match lookup(n)? {
                Value::Node(id) => Value::List(
                    g.labels(*id)
                        .iter()
                        .map(|l| Value::Term(RdfTerm::Iri(l.clone())))
                        .collect(),
                ),
                _ => Value::Null,
            },
            Expr::Type(n) => match lookup(n)? {
                Value::Rel(id) => Value::Term(RdfTerm::Iri(g.rel_type(*id).to_string())),
                _ => Value::Null,
            },
            Expr::Literal(t) => Value::Term(t.clone()),
            Expr::Null => Value::Null,
            Expr::Compare(op, a, b) => boolean(cypher_compare(
                *op,
                &self.eval(a, env)?,
                &self.eval(b, env)?,
            )),
            Expr::And(a, b) => {
                let (x, y) = (truth(&self.eval(a, env)?), truth(&self.eval(b, env)?));
                boolean(match (x, y) {
                    (Some(false), _) | (_, Some(false)) => Some(false),
                    (Some(true), Some(true)) => Some(true),
                    _ => None,
                })
            }
            Expr::Or(a, b) => {
                let (x, y) = (truth(&self.eval(a, env)?), truth(&self.eval(b, env)?));
                boolean(match (x, y) {
                    (Some(true), _) | (_, Some(true)) => Some(true),
                    (Some(false), Some(false)) => Some(false),
                    _ => None,
                })
            }
            Expr::Not(inner) => boolean(truth(&self.eval(inner, env)?).map(|b| !b)),
            Expr::IsNotNull(inner) => boolean(Some(!self.eval(inner, env)?.is_null())),
            Expr::Aggregate { .. } => {
                return Err(Error::InvalidQuery(
                    "aggregate outside of RETURN".to_string(),
                ))
            }
        })
    }

    fn project(&self, q: &CypherQuery, rows: Vec<Env>) -> Result<GraphRelation> {
        let items = &q.return_items;
        let schema: Vec<Attribute> = items
            .iter()
            .map(|i| Attribute::new(column_name(i)))
            .collect();
        let aggregated = items.iter().any(|i| i.expr.is_aggregate());
        // (projected row, environment for ORDER BY)
        let mut out: Vec<(Vec<Value>, Env)> = Vec::new();
        if aggregated {
            let mut groups: Vec<(Vec<Value>, Vec<Env>)> = Vec::new();
            let mut index: HashMap<Vec<Value>, usize> = HashMap::new();
            for env in rows {
                let mut key = Vec::new();
                for item in items.iter().filter(|i| !i.expr.is_aggregate()) {
                    key.push(self.eval(&item.expr, &env)?);
                }
                let slot = *index.entry(key.clone()).or_insert_with(|| {
                    groups.push((key, Vec::new()));
                    groups.len() - 1
                });
                groups[slot].1.push(env);
            }
            if groups.is_empty() && items.iter().all(|i| i.expr.is_aggregate()) {
                groups.push((Vec::new(), Vec::new()));
            }
            for (key, members) in groups {
                let mut key = key.into_iter();
                let mut row = Vec::with_capacity(items.len());
                for item in items {
                    match &item.expr {
                        Expr::Aggregate {
                            func,
                            distinct,
                            arg,
                        } => {
                            let mut values = Vec::with_capacity(members.len());
                            for env in &members {
                                values.push(match arg {
                                    Some(a) => self.eval(a, env)?,
                                    None => Value::literal(Literal::boolean(true)),
                                });
                            }
                            row.push(aggregate(*func, *distinct, &values));
                        }
                        _ => row.push(key.next().expect("one key per plain item")),
                    }
                }
                let env = projected_env(items, &row);
                out.push((row, env));
            }
        } else {
            for env in rows {
                let mut row = Vec::with_capacity(items.len());
                for item in items {
                    row.push(self.eval(&item.expr, &env)?);
                }
                let env = if q.distinct {
                    projected_env(items, &row)
                } else {
                    let mut env = env;
                    env.extend(projected_env(items, &row));
                    env
                };
                out.push((row, env));
            }
        }
        if q.distinct {
            let mut seen = HashSet::new();
            out.retain(|(row, _)| seen.insert(row.clone()));
        }
        if !q.order.is_empty() {
            let mut keyed = Vec::with_capacity(out.len());
            for (row, env) in out {
                let mut key = Vec::with_capacity(q.order.len());
                for s in &q.order {
                    key.push(match items.iter().position(|i| i.expr == s.expr) {
                        Some(i) => row[i].clone(),
                        None => self.eval(&s.expr, &env)?,
                    });
                }
                keyed.push((key, row, env));
            }
            keyed.sort_by(|a, b| {
                for (i, s) in q.order.iter().enumerate() {
                    let ord = sort_cmp(&a.0[i], &b.0[i]);
                    let ord = if s.descending { ord.reverse() } else { ord };
                    if ord.is_ne() {
                        return ord;
                    }
                }
                std::cmp::Ordering::Equal
            });
            out = keyed.into_iter().map(|(_, row, env)| (row, env)).collect();
        }
        let skip = q.skip.unwrap_or(0) as usize;
        let limit = q.limit.map_or(usize::MAX, |l| l as usize);
        let rows = out
            .into_iter()
            .skip(skip)
            .take(limit)
            .map(|(row, _)| row)
            .collect();
        Ok(GraphRelation::with_rows(schema, rows))
    }
}

/// Names visible after projection: aliases and plainly returned variables.
fn projected_env(items: &[ReturnItem], row: &[Value]) -> Env {
    let mut env = Env::new();
    for (item, v) in items.iter().zip(row) {
        if let Expr::Var(n) = &item.expr {
            env.insert(n.clone(), v.clone());
        }
        if let Some(a) = &item.alias {
            env.insert(a.clone(), v.clone());
        }
    }
    env
}
