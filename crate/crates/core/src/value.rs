//! Cell values of graph relations and the comparison rules of both query
//! languages.
//!
//! SPARQL comparisons return `None` for a type error; Cypher comparisons
//! return `None` for a comparison involving `null`. Ordering for ORDER BY is
//! a single total order shared by both engines: numbers, then other
//! literals, IRIs, blank nodes, graph elements, lists, and `null` last.

use std::cmp::Ordering;
use std::fmt;

use crate::pg::{NodeId, RelId};
use crate::rdf::{Literal, RdfTerm};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Null,
    Node(NodeId),
    Rel(RelId),
    Term(RdfTerm),
    List(Vec<Value>),
}

impl Value {
    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn as_term(&self) -> Option<&RdfTerm> {
        match self {
            Value::Term(t) => Some(t),
            _ => None,
        }
    }

    pub fn literal(lit: Literal) -> Self {
        Value::Term(RdfTerm::Literal(lit))
    }
}

impl From<RdfTerm> for Value {
    fn from(term: RdfTerm) -> Self {
        Value::Term(term)
    }
}

impl From<Option<RdfTerm>> for Value {
    fn from(term: Option<RdfTerm>) -> Self {
        term.map_or(Value::Null, Value::Term)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("NULL"),
            Value::Node(id) => id.fmt(f),
            Value::Rel(id) => id.fmt(f),
            Value::Term(t) => t.fmt(f),
            Value::List(items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    v.fmt(f)?;
                }
                f.write_str("]")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    pub fn sparql_symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        }
    }

    pub fn cypher_symbol(self) -> &'static str {
        match self {
            CompareOp::Ne => "<>",
            other => other.sparql_symbol(),
        }
    }

    fn holds(self, ord: Ordering) -> bool {
        match self {
            CompareOp::Eq => ord == Ordering::Equal,
            CompareOp::Ne => ord != Ordering::Equal,
            CompareOp::Lt => ord == Ordering::Less,
            CompareOp::Le => ord != Ordering::Greater,
            CompareOp::Gt => ord == Ordering::Greater,
            CompareOp::Ge => ord != Ordering::Less,
        }
    }
}

/// SPARQL operator semantics over RDF terms; `None` is an evaluation error.
pub fn sparql_compare(op: CompareOp, a: &RdfTerm, b: &RdfTerm) -> Option<bool> {
    match op {
        CompareOp::Eq => sparql_equal(a, b),
        CompareOp::Ne => sparql_equal(a, b).map(|eq| !eq),
        _ => sparql_order(a, b).map(|ord| op.holds(ord)),
    }
}

fn sparql_equal(a: &RdfTerm, b: &RdfTerm) -> Option<bool> {
    match (a, b) {
        (RdfTerm::Literal(x), RdfTerm::Literal(y)) => {
            if let (Some(fx), Some(fy)) = (x.as_f64(), y.as_f64()) {
                Some(fx == fy)
            } else if x.is_plain() && y.is_plain() {
                Some(x.lexical() == y.lexical())
            } else if let (Some(bx), Some(by)) = (x.as_bool(), y.as_bool()) {
                Some(bx == by)
            } else if x == y {
                Some(true)
            } else {
                None
            }
        }
        (RdfTerm::Literal(_), _) | (_, RdfTerm::Literal(_)) => Some(false),
        _ => Some(a == b),
    }
}

fn sparql_order(a: &RdfTerm, b: &RdfTerm) -> Option<Ordering> {
    let (RdfTerm::Literal(x), RdfTerm::Literal(y)) = (a, b) else {
        return None;
    };
    if let (Some(fx), Some(fy)) = (x.as_f64(), y.as_f64()) {
        fx.partial_cmp(&fy)
    } else if x.is_plain() && y.is_plain() {
        Some(x.lexical().cmp(y.lexical()))
    } else if let (Some(bx), Some(by)) = (x.as_bool(), y.as_bool()) {
        Some(bx.cmp(&by))
    } else {
        None
    }
}

enum CypherScalar<'a> {
    Number(f64),
    Bool(bool),
    Text(&'a str),
    Node(NodeId),
    Rel(RelId),
    List(&'a [Value]),
}

fn cypher_scalar(v: &Value) -> Option<CypherScalar<'_>> {
    Some(match v {
        Value::Null => return None,
        Value::Node(id) => CypherScalar::Node(*id),
        Value::Rel(id) => CypherScalar::Rel(*id),
        Value::List(items) => CypherScalar::List(items),
        Value::Term(RdfTerm::Literal(lit)) => {
            if let Some(f) = lit.as_f64() {
                CypherScalar::Number(f)
            } else if let Some(b) = lit.as_bool() {
                CypherScalar::Bool(b)
            } else {
                CypherScalar::Text(lit.lexical())
            }
        }
        // IRIs and blank labels are plain strings on the property-graph side
        Value::Term(t) => CypherScalar::Text(t.lexical()),
    })
}

/// Cypher operator semantics; `None` stands for `null`.
pub fn cypher_compare(op: CompareOp, a: &Value, b: &Value) -> Option<bool> {
    let (x, y) = (cypher_scalar(a)?, cypher_scalar(b)?);
    let ord = match (&x, &y) {
        (CypherScalar::Number(p), CypherScalar::Number(q)) => p.partial_cmp(q),
        (CypherScalar::Text(p), CypherScalar::Text(q)) => Some(p.cmp(q)),
        (CypherScalar::Bool(p), CypherScalar::Bool(q)) => Some(p.cmp(q)),
        (CypherScalar::Node(p), CypherScalar::Node(q))
            if matches!(op, CompareOp::Eq | CompareOp::Ne) =>
        {
            Some(p.cmp(q))
        }
        (CypherScalar::Rel(p), CypherScalar::Rel(q))
            if matches!(op, CompareOp::Eq | CompareOp::Ne) =>
        {
            Some(p.cmp(q))
        }
        (CypherScalar::List(p), CypherScalar::List(q))
            if matches!(op, CompareOp::Eq | CompareOp::Ne) =>
        {
            Some(if p == q {
                Ordering::Equal
            } else {
                Ordering::Less
            })
        }
        _ => None,
    };
    match ord {
        Some(ord) => Some(op.holds(ord)),
        // values of different types are never equal
        None => match op {
            CompareOp::Eq => Some(false),
            CompareOp::Ne => Some(true),
            _ => None,
        },
    }
}

fn rank(v: &Value) -> u8 {
    match v {
        Value::Term(RdfTerm::Literal(lit)) if lit.as_f64().is_some() => 0,
        Value::Term(RdfTerm::Literal(_)) => 1,
        Value::Term(RdfTerm::Iri(_)) => 2,
        Value::Term(RdfTerm::BlankNode(_)) => 3,
        Value::Node(_) => 4,
        Value::Rel(_) => 5,
        Value::List(_) => 6,
        Value::Null => 7,
    }
}

/// Total order used by ORDER BY in both engines.
pub fn sort_cmp(a: &Value, b: &Value) -> Ordering {
    rank(a).cmp(&rank(b)).then_with(|| match (a, b) {
        (Value::Term(RdfTerm::Literal(x)), Value::Term(RdfTerm::Literal(y))) => {
            match (x.as_f64(), y.as_f64()) {
                (Some(p), Some(q)) => p.total_cmp(&q).then_with(|| x.cmp(y)),
                _ => x.cmp(y),
            }
        }
        (Value::List(x), Value::List(y)) => {
            for (p, q) in x.iter().zip(y) {
                let ord = sort_cmp(p, q);
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            x.len().cmp(&y.len())
        }
        _ => a.cmp(b),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AggregateFn {
    Count,
    Max,
    Min,
    Sum,
    Avg,
}

impl AggregateFn {
    pub fn name(self) -> &'static str {
        match self {
            AggregateFn::Count => "count",
            AggregateFn::Max => "max",
            AggregateFn::Min => "min",
            AggregateFn::Sum => "sum",
            AggregateFn::Avg => "avg",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Some(match name.to_ascii_lowercase().as_str() {
            "count" => AggregateFn::Count,
            "max" => AggregateFn::Max,
            "min" => AggregateFn::Min,
            "sum" => AggregateFn::Sum,
            "avg" => AggregateFn::Avg,
            _ => return None,
        })
    }
}

/// Fold one group. `values` holds the argument per input row (`Null` where
/// unbound); `COUNT(*)` passes a non-null placeholder per row.
///
/// Empty groups give `0` for COUNT and SUM and `Null` for the rest. SUM and
/// AVG over a non-numeric value give `Null`.
pub fn aggregate(func: AggregateFn, distinct: bool, values: &[Value]) -> Value {
    let mut present: Vec<&Value> = values.iter().filter(|v| !v.is_null()).collect();
    if distinct {
        present.sort();
        present.dedup();
    }
    match func {
        AggregateFn::Count => Value::literal(Literal::integer(present.len() as i64)),
        AggregateFn::Max => present
            .into_iter()
            .max_by(|a, b| sort_cmp(a, b))
            .cloned()
            .unwrap_or(Value::Null),
        AggregateFn::Min => present
            .into_iter()
            .min_by(|a, b| sort_cmp(a, b))
            .cloned()
            .unwrap_or(Value::Null),
        AggregateFn::Sum | AggregateFn::Avg => {
            let mut all_int = true;
            let mut int_sum: i64 = 0;
            let mut sum = 0.0;
            for v in &present {
                let Some(lit) = v.as_term().and_then(RdfTerm::as_literal) else {
                    return Value::Null;
                };
                let Some(f) = lit.as_f64() else {
                    return Value::Null;
                };
                sum += f;
                match (lit.is_integer(), lit.lexical().trim().parse::<i64>()) {
                    (true, Ok(i)) => int_sum = int_sum.saturating_add(i),
                    _ => all_int = false,
                }
            }
            if func == AggregateFn::Sum {
                if all_int {
                    Value::literal(Literal::integer(int_sum))
                } else {
                    Value::literal(Literal::double(sum))
                }
            } else if present.is_empty() {
                Value::Null
            } else {
                Value::literal(Literal::double(sum / present.len() as f64))
            }
        }
    }
}

/// Parse a bare numeric token the way both query languages read it.
pub fn numeric_literal(token: &str) -> Option<Literal> {
    use crate::rdf::{XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER};
    if token.parse::<i64>().is_ok() {
        Some(Literal::typed(token, XSD_INTEGER))
    } else if token.contains(['e', 'E']) && token.parse::<f64>().is_ok() {
        Some(Literal::typed(token, XSD_DOUBLE))
    } else if token.parse::<f64>().is_ok() {
        Some(Literal::typed(token, XSD_DECIMAL))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::XSD_DECIMAL;

    fn int(i: i64) -> Value {
        Value::literal(Literal::integer(i))
    }

    fn s(x: &str) -> Value {
        Value::literal(Literal::string(x))
    }

    #[test]
    fn sparql_numeric_equality_crosses_datatypes() {
        let one = RdfTerm::Literal(Literal::integer(1));
        let one_dec = RdfTerm::Literal(Literal::typed("1.0", XSD_DECIMAL));
        assert_eq!(sparql_compare(CompareOp::Eq, &one, &one_dec), Some(true));
        let text = RdfTerm::Literal(Literal::string("1"));
        assert_eq!(sparql_compare(CompareOp::Eq, &one, &text), None);
        assert_eq!(sparql_compare(CompareOp::Lt, &one, &text), None);
        let iri = RdfTerm::Iri("http://x".into());
        assert_eq!(sparql_compare(CompareOp::Eq, &iri, &text), Some(false));
        assert_eq!(sparql_compare(CompareOp::Lt, &iri, &iri), None);
    }

    #[test]
    fn cypher_null_and_mixed_types() {
        assert_eq!(cypher_compare(CompareOp::Eq, &Value::Null, &int(1)), None);
        assert_eq!(cypher_compare(CompareOp::Eq, &s("a"), &int(1)), Some(false));
        assert_eq!(cypher_compare(CompareOp::Ne, &s("a"), &int(1)), Some(true));
        assert_eq!(cypher_compare(CompareOp::Lt, &s("a"), &int(1)), None);
        assert_eq!(cypher_compare(CompareOp::Lt, &int(1), &int(2)), Some(true));
        let iri = Value::Term(RdfTerm::Iri("http://x".into()));
        assert_eq!(
            cypher_compare(CompareOp::Eq, &iri, &s("http://x")),
            Some(true)
        );
    }

    #[test]
    fn sort_order_puts_null_last() {
        let mut vals = vec![Value::Null, s("b"), int(10), int(2), s("a")];
        vals.sort_by(sort_cmp);
        assert_eq!(vals, vec![int(2), int(10), s("a"), s("b"), Value::Null]);
    }

    #[test]
    fn aggregates_over_empty_and_mixed_input() {
        assert_eq!(aggregate(AggregateFn::Count, false, &[]), int(0));
        assert_eq!(aggregate(AggregateFn::Sum, false, &[]), int(0));
        assert_eq!(aggregate(AggregateFn::Max, false, &[]), Value::Null);
        assert_eq!(aggregate(AggregateFn::Avg, false, &[]), Value::Null);
        let vals = [int(3), Value::Null, int(5), int(3)];
        assert_eq!(aggregate(AggregateFn::Count, false, &vals), int(3));
        assert_eq!(aggregate(AggregateFn::Count, true, &vals), int(2));
        assert_eq!(aggregate(AggregateFn::Sum, false, &vals), int(11));
        assert_eq!(aggregate(AggregateFn::Max, false, &vals), int(5));
        assert_eq!(aggregate(AggregateFn::Min, false, &vals), int(3));
        assert_eq!(
            aggregate(AggregateFn::Avg, false, &[int(1), int(2)]),
            Value::literal(Literal::double(1.5))
        );
        assert_eq!(aggregate(AggregateFn::Sum, false, &[s("x")]), Value::Null);
    }

    #[test]
    fn numeric_tokens() {
        assert!(numeric_literal("42").unwrap().is_integer());
        assert_eq!(
            numeric_literal("4.5").unwrap().datatype(),
            Some(XSD_DECIMAL)
        );
        assert!(numeric_literal("abc").is_none());
    }
}
