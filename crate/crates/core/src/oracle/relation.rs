use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::value::{sort_cmp, Value};

/// Column of a graph relation. `var` names the SPARQL variable the column
/// stands for, when there is one; joins match columns on `var` if present
/// and on `name` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Attribute {
    pub name: String,
    pub var: Option<String>,
}

impl Attribute {
    pub fn new(name: impl Into<String>) -> Self {
        Attribute {
            name: name.into(),
            var: None,
        }
    }

    pub fn var(name: impl Into<String>) -> Self {
        let name = name.into();
        Attribute {
            var: Some(name.clone()),
            name,
        }
    }

    pub fn named_var(name: impl Into<String>, var: impl Into<String>) -> Self {
        Attribute {
            name: name.into(),
            var: Some(var.into()),
        }
    }

    pub fn key(&self) -> &str {
        self.var.as_deref().unwrap_or(&self.name)
    }
}

pub type Row = Vec<Value>;

/// A bag of rows over an ordered schema; NULL is `Value::Null`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GraphRelation {
    pub schema: Vec<Attribute>,
    pub rows: Vec<Row>,
}

impl GraphRelation {
    pub fn new(schema: Vec<Attribute>) -> Self {
        GraphRelation {
            schema,
            rows: Vec::new(),
        }
    }

    pub fn with_rows(schema: Vec<Attribute>, rows: Vec<Row>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == schema.len()));
        GraphRelation { schema, rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn position(&self, key: &str) -> Option<usize> {
        self.schema.iter().position(|a| a.key() == key)
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.schema.iter().map(|a| a.name.as_str()).collect()
    }

    /// Rows in canonical order, for multiset comparison.
    pub fn sorted_rows(&self) -> Vec<Row> {
        let mut rows = self.rows.clone();
        rows.sort_by(cmp_rows);
        rows
    }

    /// Same schema keys and same rows as multisets.
    pub fn bag_eq(&self, other: &GraphRelation) -> bool {
        let keys = |r: &GraphRelation| {
            r.schema
                .iter()
                .map(|a| a.key().to_string())
                .collect::<Vec<_>>()
        };
        keys(self) == keys(other) && self.sorted_rows() == other.sorted_rows()
    }
}

fn cmp_rows(a: &Row, b: &Row) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = sort_cmp(x, y);
        if ord != Ordering::Equal {
            return ord;
        }
    }
    a.len().cmp(&b.len())
}

fn compatible(a: &Value, b: &Value) -> bool {
    a.is_null() || b.is_null() || a == b
}

/// Schema of a join: all of `left`, then `right` columns with new keys.
/// Returns the merged schema and, per right column, its left position.
fn join_schema(
    left: &GraphRelation,
    right: &GraphRelation,
) -> (Vec<Attribute>, Vec<Option<usize>>) {
    let mut schema = left.schema.clone();
    let mut mapping = Vec::with_capacity(right.schema.len());
    for attr in &right.schema {
        match left.position(attr.key()) {
            Some(i) => mapping.push(Some(i)),
            None => {
                mapping.push(None);
                schema.push(attr.clone());
            }
        }
    }
    (schema, mapping)
}

fn merge(l: &Row, r: &Row, mapping: &[Option<usize>]) -> Option<Row> {
    let mut out = l.clone();
    for (j, v) in r.iter().enumerate() {
        match mapping[j] {
            Some(i) => {
                if !compatible(&out[i], v) {
                    return None;
                }
                if out[i].is_null() {
                    out[i] = v.clone();
                }
            }
            None => out.push(v.clone()),
        }
    }
    Some(out)
}

/// Inner join where common columns match when equal or when either side
/// is NULL; merged columns keep the non-NULL value.
pub fn join(left: &GraphRelation, right: &GraphRelation) -> GraphRelation {
    let (schema, mapping) = join_schema(left, right);
    let mut rows = Vec::new();
    let shared: Vec<(usize, usize)> = mapping
        .iter()
        .enumerate()
        .filter_map(|(j, m)| m.map(|i| (i, j)))
        .collect();
    // hash on right rows whose shared columns are all non-NULL
    let mut index: HashMap<Vec<&Value>, Vec<usize>> = HashMap::new();
    let mut loose: Vec<usize> = Vec::new();
    for (idx, r) in right.rows.iter().enumerate() {
        if shared.iter().any(|&(_, j)| r[j].is_null()) {
            loose.push(idx);
        } else {
            index
                .entry(shared.iter().map(|&(_, j)| &r[j]).collect())
                .or_default()
                .push(idx);
        }
    }
    for l in &left.rows {
        let mut candidates: Vec<usize> = if shared.iter().any(|&(i, _)| l[i].is_null()) {
            (0..right.rows.len()).collect()
        } else {
            let key: Vec<&Value> = shared.iter().map(|&(i, _)| &l[i]).collect();
            let mut c = index.get(&key).cloned().unwrap_or_default();
            c.extend(&loose);
            c.sort_unstable();
            c
        };
        candidates.dedup();
        for idx in candidates {
            if let Some(row) = merge(l, &right.rows[idx], &mapping) {
                rows.push(row);
            }
        }
    }
    GraphRelation { schema, rows }
}

/// Left outer join; `cond` sees the merged row under the merged schema.
pub fn left_join(
    left: &GraphRelation,
    right: &GraphRelation,
    mut cond: impl FnMut(&[Attribute], &Row) -> bool,
) -> GraphRelation {
    let (schema, mapping) = join_schema(left, right);
    let width = schema.len();
    let mut rows = Vec::new();
    for l in &left.rows {
        let mut matched = false;
        for r in &right.rows {
            if let Some(row) = merge(l, r, &mapping) {
                if cond(&schema, &row) {
                    rows.push(row);
                    matched = true;
                }
            }
        }
        if !matched {
            let mut row = l.clone();
            row.resize(width, Value::Null);
            rows.push(row);
        }
    }
    GraphRelation { schema, rows }
}

/// Outer union: union of schemas, missing columns padded with NULL.
pub fn outer_union(left: &GraphRelation, right: &GraphRelation) -> GraphRelation {
    let (schema, mapping) = join_schema(left, right);
    let width = schema.len();
    let mut rows = Vec::with_capacity(left.len() + right.len());
    for l in &left.rows {
        let mut row = l.clone();
        row.resize(width, Value::Null);
        rows.push(row);
    }
    let mut next_new = left.schema.len();
    let positions: Vec<usize> = mapping
        .iter()
        .map(|m| match m {
            Some(i) => *i,
            None => {
                next_new += 1;
                next_new - 1
            }
        })
        .collect();
    for r in &right.rows {
        let mut row = vec![Value::Null; width];
        for (j, v) in r.iter().enumerate() {
            row[positions[j]] = v.clone();
        }
        rows.push(row);
    }
    GraphRelation { schema, rows }
}

/// Rows satisfying `pred`.
pub fn select(r: &GraphRelation, mut pred: impl FnMut(&Row) -> bool) -> GraphRelation {
    GraphRelation {
        schema: r.schema.clone(),
        rows: r.rows.iter().filter(|row| pred(row)).cloned().collect(),
    }
}

/// Keep the columns at `positions`, in that order.
pub fn project(r: &GraphRelation, positions: &[usize]) -> GraphRelation {
    GraphRelation {
        schema: positions.iter().map(|&i| r.schema[i].clone()).collect(),
        rows: r
            .rows
            .iter()
            .map(|row| positions.iter().map(|&i| row[i].clone()).collect())
            .collect(),
    }
}

/// First occurrence of each distinct row.
pub fn distinct(r: &GraphRelation) -> GraphRelation {
    let mut seen = std::collections::HashSet::new();
    GraphRelation {
        schema: r.schema.clone(),
        rows: r
            .rows
            .iter()
            .filter(|row| seen.insert((*row).clone()))
            .cloned()
            .collect(),
    }
}

/// Stable sort by `(column, descending)` keys.
pub fn order_by(r: &GraphRelation, keys: &[(usize, bool)]) -> GraphRelation {
    let mut rows = r.rows.clone();
    rows.sort_by(|a, b| {
        for &(i, desc) in keys {
            let ord = sort_cmp(&a[i], &b[i]);
            let ord = if desc { ord.reverse() } else { ord };
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    });
    GraphRelation {
        schema: r.schema.clone(),
        rows,
    }
}

/// Drop `skip` rows, then keep at most `limit`.
pub fn slice(r: &GraphRelation, skip: Option<u64>, limit: Option<u64>) -> GraphRelation {
    let skip = skip.unwrap_or(0) as usize;
    let limit = limit.map_or(usize::MAX, |l| l as usize);
    GraphRelation {
        schema: r.schema.clone(),
        rows: r.rows.iter().skip(skip).take(limit).cloned().collect(),
    }
}

impl fmt::Display for GraphRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.column_names();
        writeln!(f, "{}", names.join(" | "))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", cells.join(" | "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{Literal, RdfTerm};

    fn t(s: &str) -> Value {
        Value::Term(RdfTerm::Iri(format!("http://e/{s}")))
    }

    fn rel(cols: &[&str], rows: Vec<Vec<Value>>) -> GraphRelation {
        GraphRelation::with_rows(cols.iter().map(|c| Attribute::var(*c)).collect(), rows)
    }

    #[test]
    fn null_tolerant_join_merges_non_null() {
        let a = rel(
            &["x", "y"],
            vec![vec![t("a"), Value::Null], vec![t("b"), t("c")]],
        );
        let b = rel(&["y", "z"], vec![vec![t("c"), t("d")]]);
        let j = join(&a, &b);
        assert_eq!(j.column_names(), ["x", "y", "z"]);
        assert_eq!(
            j.sorted_rows(),
            vec![vec![t("a"), t("c"), t("d")], vec![t("b"), t("c"), t("d")]]
        );
    }

    #[test]
    fn left_join_pads_and_union_adds() {
        let a = rel(&["x"], vec![vec![t("a")], vec![t("b")]]);
        let b = rel(&["x", "y"], vec![vec![t("a"), t("1")]]);
        let lj = left_join(&a, &b, |_, _| true);
        assert_eq!(
            lj.rows,
            vec![vec![t("a"), t("1")], vec![t("b"), Value::Null]]
        );
        let u = outer_union(&a, &rel(&["y"], vec![vec![t("q")]]));
        assert_eq!(
            u.rows,
            vec![
                vec![t("a"), Value::Null],
                vec![t("b"), Value::Null],
                vec![Value::Null, t("q")]
            ]
        );
    }

    #[test]
    fn order_slice_distinct() {
        let n = |i: i64| Value::literal(Literal::integer(i));
        let r = rel(
            &["v"],
            vec![vec![n(3)], vec![n(1)], vec![n(3)], vec![Value::Null]],
        );
        let o = order_by(&r, &[(0, false)]);
        assert_eq!(
            o.rows,
            vec![vec![n(1)], vec![n(3)], vec![n(3)], vec![Value::Null]]
        );
        assert_eq!(
            slice(&o, Some(1), Some(2)).rows,
            vec![vec![n(3)], vec![n(3)]]
        );
        assert_eq!(distinct(&r).len(), 3);
        let p = order_by(&r, &[(0, true)]);
        assert_eq!(p.rows[0], vec![Value::Null]);
    }
}
