//! SPARQL query to Cypher query.
//!
//! The graph pattern is first flattened into a union of branches, each a
//! required BGP followed by an ordered list of OPTIONAL arms and FILTERs.
//! Every branch becomes one Cypher query part; several branches are joined
//! with UNION (inside `CALL { }` when modifiers must apply to the union as
//! a whole).

mod expr;
mod pmm;

use std::collections::HashSet;

use indexmap::{IndexMap, IndexSet};

pub use expr::map_expression;
pub use pmm::{map_property_path, pmm, Binding, Namer, PatternSet};

use crate::catalog::SchemaCatalog;
use crate::cypher::{
    Clause, CypherQuery, Expr as CExpr, MatchClause, PathPattern, ReturnItem, SortItem,
};
use crate::error::{Error, Result};
use crate::sparql::{
    Expr, GraphPattern, PredicatePattern, ProjectionItem, SolutionModifiers, SparqlQuery,
    TermPattern, TriplePattern,
};
use crate::value::AggregateFn;
use pmm::{Outer, Scope};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TranslateOptions {
    /// Add `IS NOT NULL` checks for properties bound to variables in the
    /// required part, so nodes lacking the property do not produce rows.
    pub guard_properties: bool,
}

/// A translated query and, per return column, the SPARQL variable it
/// carries.
#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    pub query: CypherQuery,
    pub columns: Vec<String>,
}

pub fn translate(q: &SparqlQuery, cat: &SchemaCatalog) -> Result<Translation> {
    translate_with(q, cat, TranslateOptions::default())
}

pub fn translate_with(
    q: &SparqlQuery,
    cat: &SchemaCatalog,
    opts: TranslateOptions,
) -> Result<Translation> {
    let branches = branches(&q.pattern)?;
    let mut all_vars: Vec<String> = q.pattern.variables().into_iter().collect();
    all_vars.extend(q.modifiers.output_names().iter().map(|s| s.to_string()));
    let namer = Namer::new(all_vars.iter().map(String::as_str));
    let built: Vec<BuiltBranch> = branches
        .iter()
        .map(|b| build_branch(b, cat, namer.clone(), opts))
        .collect::<Result<_>>()?;
    let query = if built.len() == 1 {
        smm(&q.modifiers, built.into_iter().next().expect("one branch"))?
    } else {
        union_query(&q.modifiers, built, &namer)?
    };
    Ok(Translation {
        query,
        columns: q
            .modifiers
            .output_names()
            .into_iter()
            .map(str::to_string)
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Stage {
    Optional {
        triples: Vec<TriplePattern>,
        filter: Option<Expr>,
    },
    Filter(Expr),
}

#[derive(Debug, Clone, PartialEq)]
struct Branch {
    triples: Vec<TriplePattern>,
    stages: Vec<Stage>,
}

fn triple_vars(tps: &[TriplePattern]) -> IndexSet<String> {
    tps.iter()
        .flat_map(|t| t.variables().into_iter().map(str::to_string))
        .collect()
}

impl Stage {
    fn vars(&self) -> IndexSet<String> {
        match self {
            Stage::Optional { triples, filter } => {
                let mut v = triple_vars(triples);
                if let Some(f) = filter {
                    v.extend(f.variables());
                }
                v
            }
            Stage::Filter(f) => f.variables(),
        }
    }
}

impl Branch {
    fn required_vars(&self) -> IndexSet<String> {
        triple_vars(&self.triples)
    }

    fn all_vars(&self) -> IndexSet<String> {
        let mut v = self.required_vars();
        for s in &self.stages {
            v.extend(s.vars());
        }
        v
    }

    /// Whether conjoining `other` keeps every stage of `self` valid when
    /// evaluated after `other`'s required triples.
    fn stages_commute_with(&self, other: &Branch) -> Result<()> {
        let required = self.required_vars();
        let others = other.all_vars();
        for stage in &self.stages {
            for v in stage.vars() {
                if others.contains(&v) && !required.contains(&v) {
                    let what = match stage {
                        Stage::Optional { .. } => "OPTIONAL",
                        Stage::Filter(_) => "FILTER",
                    };
                    return Err(Error::Unsupported(format!(
                        "{what} whose variable ?{v} is shared with a sibling pattern but not bound \
                         by the enclosing group"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Union-of-branches form of a graph pattern.
fn branches(gp: &GraphPattern) -> Result<Vec<Branch>> {
    match gp {
        GraphPattern::Bgp(tps) => Ok(vec![Branch {
            triples: tps.clone(),
            stages: Vec::new(),
        }]),
        GraphPattern::Union(a, b) => {
            let mut out = branches(a)?;
            out.extend(branches(b)?);
            Ok(out)
        }
        GraphPattern::And(a, b) => {
            let (left, right) = (branches(a)?, branches(b)?);
            let mut out = Vec::with_capacity(left.len() * right.len());
            for l in &left {
                for r in &right {
                    l.stages_commute_with(r)?;
                    r.stages_commute_with(l)?;
                    let mut triples = l.triples.clone();
                    triples.extend(r.triples.iter().cloned());
                    let mut stages = l.stages.clone();
                    stages.extend(r.stages.iter().cloned());
                    out.push(Branch { triples, stages });
                }
            }
            Ok(out)
        }
        GraphPattern::Opt(a, b) => {
            let mut arm = branches(b)?;
            if arm.len() != 1 {
                return Err(Error::Unsupported("UNION inside OPTIONAL".into()));
            }
            let arm = arm.pop().expect("one arm");
            let mut filters = Vec::new();
            for stage in arm.stages {
                match stage {
                    Stage::Filter(f) => filters.push(f),
                    Stage::Optional { .. } => {
                        return Err(Error::Unsupported("OPTIONAL nested inside OPTIONAL".into()))
                    }
                }
            }
            let stage = Stage::Optional {
                triples: arm.triples,
                filter: filters.into_iter().reduce(Expr::and),
            };
            let arm_vars = stage.vars();
            let mut out = branches(a)?;
            for branch in &mut out {
                let required = branch.required_vars();
                for s in &branch.stages {
                    if let Some(v) = s
                        .vars()
                        .iter()
                        .find(|v| arm_vars.contains(*v) && !required.contains(*v))
                    {
                        return Err(Error::Unsupported(format!(
                            "OPTIONAL reusing ?{v}, which an earlier OPTIONAL or FILTER binds"
                        )));
                    }
                }
                branch.stages.push(stage.clone());
            }
            Ok(out)
        }
        GraphPattern::Filter(inner, cond) => {
            let mut out = branches(inner)?;
            for branch in &mut out {
                branch.stages.push(Stage::Filter(cond.clone()));
            }
            Ok(out)
        }
    }
}

/// One branch in Cypher form, before the RETURN part.
struct BuiltBranch {
    clauses: Vec<Clause>,
    env: IndexMap<String, Binding>,
    namer: Namer,
}

fn conjuncts(e: &Expr, out: &mut Vec<Expr>) {
    match e {
        Expr::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        other => out.push(other.clone()),
    }
}

/// Split patterns into connected components (by shared names), keeping
/// first-appearance order.
fn components(patterns: Vec<PathPattern>) -> Vec<Vec<PathPattern>> {
    let mut groups: Vec<(HashSet<String>, Vec<PathPattern>)> = Vec::new();
    for p in patterns {
        let names: HashSet<String> = p.names().into_iter().map(str::to_string).collect();
        let hits: Vec<usize> = groups
            .iter()
            .enumerate()
            .filter(|(_, (n, _))| !n.is_disjoint(&names))
            .map(|(i, _)| i)
            .collect();
        match hits.first() {
            None => groups.push((names, vec![p])),
            Some(&first) => {
                for &i in hits[1..].iter().rev() {
                    let (n, ps) = groups.remove(i);
                    groups[first].0.extend(n);
                    groups[first].1.extend(ps);
                }
                groups[first].0.extend(names);
                groups[first].1.push(p);
            }
        }
    }
    groups.into_iter().map(|(_, ps)| ps).collect()
}

fn single_property_arm(
    triples: &[TriplePattern],
    filter: &Option<Expr>,
    env: &IndexMap<String, Binding>,
    cat: &SchemaCatalog,
) -> Option<Binding> {
    if filter.is_some() || triples.len() != 1 {
        return None;
    }
    let tp = &triples[0];
    let (
        TermPattern::Variable(s),
        PredicatePattern::Term(TermPattern::Iri(p)),
        TermPattern::Variable(o),
    ) = (&tp.subject, &tp.predicate, &tp.object)
    else {
        return None;
    };
    match env.get(s) {
        Some(Binding::Node(n)) if cat.is_property_key(p) && !env.contains_key(o) => {
            Some(Binding::Property(n.clone(), p.clone()))
        }
        _ => None,
    }
}

fn build_branch(
    branch: &Branch,
    cat: &SchemaCatalog,
    mut namer: Namer,
    opts: TranslateOptions,
) -> Result<BuiltBranch> {
    let mut scope = Scope::new(cat, &mut namer, opts.guard_properties);
    for tp in &branch.triples {
        scope.add_triple(tp)?;
    }
    let mut env = std::mem::take(&mut scope.bindings);
    let mut pre = std::mem::take(&mut scope.conditions);
    let mut post = std::mem::take(&mut scope.post_conditions);
    let unwinds = std::mem::take(&mut scope.unwinds);
    let patterns = std::mem::take(&mut scope.patterns);
    let iri_nodes = std::mem::take(&mut scope.iri_nodes);
    drop(scope);

    let mut nodes: HashSet<String> = HashSet::new();
    for p in &patterns {
        for n in p.nodes() {
            nodes.extend(n.name_str().map(str::to_string));
        }
    }
    let required: IndexSet<String> = branch.required_vars();
    let unwound: HashSet<&str> = env
        .iter()
        .filter(|(_, b)| matches!(b, Binding::Label(_)))
        .map(|(v, _)| v.as_str())
        .collect::<HashSet<_>>();
    let unwound: HashSet<String> = unwound.into_iter().map(str::to_string).collect();

    let mut stage_clauses: Vec<Clause> = Vec::new();
    for stage in &branch.stages {
        match stage {
            Stage::Filter(cond) => {
                let mut parts = Vec::new();
                conjuncts(cond, &mut parts);
                let mut deferred = Vec::new();
                for part in parts {
                    let vars = part.variables();
                    if vars.iter().all(|v| required.contains(v)) {
                        let mapped = map_expression(&part, &env)?;
                        if vars.iter().any(|v| unwound.contains(v)) {
                            post.push(mapped);
                        } else {
                            pre.push(mapped);
                        }
                    } else {
                        deferred.push(map_expression(&part, &env)?);
                    }
                }
                if let Some(cond) = CExpr::all(deferred) {
                    stage_clauses.push(Clause::With { where_: cond });
                }
            }
            Stage::Optional { triples, filter } => {
                if let Some(b) = single_property_arm(triples, filter, &env, cat) {
                    let var = triples[0].object.as_var().expect("checked").to_string();
                    env.insert(var, b);
                    continue;
                }
                let mut arm = Scope::arm(
                    cat,
                    &mut namer,
                    Outer {
                        bindings: &env,
                        nodes: &nodes,
                        iri_nodes: &iri_nodes,
                    },
                );
                for tp in triples {
                    arm.add_triple(tp)?;
                }
                let arm_bindings = std::mem::take(&mut arm.bindings);
                let mut conds = std::mem::take(&mut arm.conditions);
                let arm_patterns = std::mem::take(&mut arm.patterns);
                let arm_nodes = {
                    let mut s = HashSet::new();
                    for p in &arm_patterns {
                        for n in p.nodes() {
                            s.extend(n.name_str().map(str::to_string));
                        }
                    }
                    s
                };
                drop(arm);
                let mut arm_env = env.clone();
                arm_env.extend(arm_bindings.clone());
                if let Some(f) = filter {
                    conds.push(map_expression(f, &arm_env)?);
                }
                if arm_patterns.is_empty() {
                    return Err(Error::Unsupported("OPTIONAL without a pattern".into()));
                }
                stage_clauses.push(Clause::Match(MatchClause {
                    optional: true,
                    patterns: arm_patterns,
                    where_: CExpr::all(conds),
                }));
                env = arm_env;
                nodes.extend(arm_nodes);
            }
        }
    }

    let mut clauses: Vec<Clause> = components(patterns)
        .into_iter()
        .map(|patterns| {
            Clause::Match(MatchClause {
                optional: false,
                patterns,
                where_: None,
            })
        })
        .collect();
    if let Some(Clause::Match(last)) = clauses.last_mut() {
        last.where_ = CExpr::all(pre);
    }
    for (expr, alias) in unwinds {
        clauses.push(Clause::Unwind { expr, alias });
    }
    if let Some(cond) = CExpr::all(post) {
        clauses.push(Clause::With { where_: cond });
    }
    clauses.extend(stage_clauses);
    Ok(BuiltBranch {
        clauses,
        env,
        namer,
    })
}

fn binding<'a>(env: &'a IndexMap<String, Binding>, var: &str) -> Result<&'a Binding> {
    env.get(var)
        .ok_or_else(|| Error::InvalidQuery(format!("?{var} is not bound by the pattern")))
}

fn aggregate_arg(func: AggregateFn, b: &Binding) -> CExpr {
    if func == AggregateFn::Count {
        b.value_expr()
    } else {
        b.term_expr()
    }
}

/// Solution modifiers for a single-branch query.
fn smm(m: &SolutionModifiers, mut built: BuiltBranch) -> Result<CypherQuery> {
    let env = &built.env;
    let aggregated = m.has_aggregates();
    let plain: Vec<&str> = m
        .projection
        .iter()
        .filter_map(|p| match p {
            ProjectionItem::Var(v) => Some(v.as_str()),
            ProjectionItem::Aggregate(_) => None,
        })
        .collect();
    if let Some(g) = m.group_by.iter().find(|g| !plain.contains(&g.as_str())) {
        return Err(Error::Unsupported(format!(
            "GROUP BY on ?{g}, which is not projected"
        )));
    }
    let mut items = Vec::with_capacity(m.projection.len());
    let mut seen: HashSet<String> = HashSet::new();
    for p in &m.projection {
        let item = match p {
            ProjectionItem::Var(v) => {
                let expr = binding(env, v)?.value_expr();
                let plain_name = crate::cypher::column_name(&ReturnItem::new(expr.clone()));
                if seen.contains(&plain_name) {
                    ReturnItem::aliased(expr, built.namer.ident(v))
                } else {
                    ReturnItem::new(expr)
                }
            }
            ProjectionItem::Aggregate(a) => {
                let arg = match &a.arg {
                    Some(v) => Some(Box::new(aggregate_arg(a.func, binding(env, v)?))),
                    None => None,
                };
                ReturnItem::aliased(
                    CExpr::Aggregate {
                        func: a.func,
                        distinct: a.distinct,
                        arg,
                    },
                    built.namer.ident(&a.alias),
                )
            }
        };
        seen.insert(crate::cypher::column_name(&item));
        items.push(item);
    }
    let mut order = Vec::with_capacity(m.order.len());
    for key in &m.order {
        let pos = m.projection.iter().position(|p| p.name() == key.var);
        let expr = match pos.map(|i| (&m.projection[i], &items[i])) {
            Some((ProjectionItem::Aggregate(_), item)) => {
                CExpr::Var(item.alias.clone().expect("aggregates are aliased"))
            }
            Some((ProjectionItem::Var(v), item)) => match binding(env, v)? {
                Binding::Node(n) => CExpr::property(n, crate::pg::URI_KEY),
                _ => item.expr.clone(),
            },
            None => {
                if m.distinct || aggregated {
                    return Err(Error::Unsupported(format!(
                        "ORDER BY ?{} which is not projected, with DISTINCT or aggregates",
                        key.var
                    )));
                }
                binding(env, &key.var)?.term_expr()
            }
        };
        order.push(SortItem {
            expr,
            descending: key.descending,
        });
    }
    Ok(CypherQuery {
        call: None,
        clauses: std::mem::take(&mut built.clauses),
        distinct: m.distinct,
        return_items: items,
        order,
        skip: m.offset,
        limit: m.limit,
        union: None,
    })
}

/// Several branches: each returns the needed variables under their own
/// names (NULL where a branch does not bind one).
fn union_query(
    m: &SolutionModifiers,
    built: Vec<BuiltBranch>,
    namer: &Namer,
) -> Result<CypherQuery> {
    let mut namer = namer.clone();
    let aggregated = m.has_aggregates();
    let wrap = aggregated || !m.order.is_empty() || m.limit.is_some() || m.offset.is_some();
    let mut needed: IndexSet<String> = IndexSet::new();
    for p in &m.projection {
        match p {
            ProjectionItem::Var(v) => {
                needed.insert(v.clone());
            }
            ProjectionItem::Aggregate(a) => {
                if let Some(arg) = &a.arg {
                    needed.insert(arg.clone());
                }
            }
        }
    }
    if let Some(g) = m.group_by.iter().find(|g| !needed.contains(*g)) {
        return Err(Error::Unsupported(format!(
            "GROUP BY on ?{g}, which is not projected"
        )));
    }
    for key in &m.order {
        if !m.projection.iter().any(|p| p.name() == key.var) {
            return Err(Error::Unsupported(format!(
                "ORDER BY ?{} which is not projected, over a UNION",
                key.var
            )));
        }
    }
    let is_node = |v: &str| {
        built
            .iter()
            .any(|b| matches!(b.env.get(v), Some(Binding::Node(_))))
    };
    let node_vars: HashSet<String> = needed.iter().filter(|v| is_node(v)).cloned().collect();
    let mut arms = Vec::with_capacity(built.len());
    for b in built {
        let mut items: Vec<ReturnItem> = needed
            .iter()
            .map(|v| {
                let expr = b.env.get(v).map_or(CExpr::Null, Binding::value_expr);
                ReturnItem::aliased(expr, namer.ident(v))
            })
            .collect();
        if items.is_empty() {
            items.push(ReturnItem::aliased(CExpr::Null, "_row"));
        }
        arms.push(CypherQuery {
            clauses: b.clauses,
            return_items: items,
            ..CypherQuery::default()
        });
    }
    let all = !(m.distinct && !wrap);
    let mut arms = arms.into_iter();
    let mut chain = arms.next().expect("at least two branches");
    for arm in arms {
        chain.push_union(all, arm);
    }
    if !wrap {
        return Ok(chain);
    }
    let mut items = Vec::with_capacity(m.projection.len());
    for p in &m.projection {
        items.push(match p {
            ProjectionItem::Var(v) => ReturnItem::new(CExpr::Var(namer.ident(v))),
            ProjectionItem::Aggregate(a) => {
                let arg = a.arg.as_ref().map(|v| {
                    let ident = namer.ident(v);
                    Box::new(if a.func != AggregateFn::Count && node_vars.contains(v) {
                        CExpr::property(ident, crate::pg::URI_KEY)
                    } else {
                        CExpr::Var(ident)
                    })
                });
                ReturnItem::aliased(
                    CExpr::Aggregate {
                        func: a.func,
                        distinct: a.distinct,
                        arg,
                    },
                    namer.ident(&a.alias),
                )
            }
        });
    }
    let order = m
        .order
        .iter()
        .map(|k| {
            let ident = namer.ident(&k.var);
            let expr = if node_vars.contains(&k.var) {
                CExpr::property(ident, crate::pg::URI_KEY)
            } else {
                CExpr::Var(ident)
            };
            SortItem {
                expr,
                descending: k.descending,
            }
        })
        .collect();
    Ok(CypherQuery {
        call: Some(Box::new(chain)),
        clauses: Vec::new(),
        distinct: m.distinct,
        return_items: items,
        order,
        skip: m.offset,
        limit: m.limit,
        union: None,
    })
}
