use std::fmt::Write as _;

use super::ast::*;
use crate::error::{Error, Result};
use crate::rdf::{PrefixMap, RdfTerm};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum RenderStyle {
    #[default]
    SingleLine,
    /// One clause per line, `CALL` bodies indented.
    Pretty,
}

/// Backtick-quote `s` unless it is a plain word; embedded backticks are
/// doubled.
pub fn escape_identifier(s: &str) -> String {
    let mut chars = s.chars();
    let plain = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if plain {
        s.to_string()
    } else {
        format!("`{}`", s.replace('`', "``"))
    }
}

fn quote_string(s: &str) -> String {
    format!("'{}'", s.replace('\\', "\\\\").replace('\'', "\\'"))
}

/// Cypher literal text for an RDF term.
pub fn render_literal(term: &RdfTerm) -> String {
    match term {
        RdfTerm::Literal(lit) => {
            if lit.as_f64().is_some() {
                lit.lexical().trim().to_string()
            } else if let Some(b) = lit.as_bool() {
                b.to_string()
            } else {
                quote_string(lit.lexical())
            }
        }
        other => quote_string(other.lexical()),
    }
}

struct Renderer<'a> {
    prefixes: &'a PrefixMap,
    style: RenderStyle,
}

impl Renderer<'_> {
    fn iri(&self, iri: &str) -> String {
        escape_identifier(&self.prefixes.compact(iri))
    }

    fn properties(&self, props: &indexmap::IndexMap<String, RdfTerm>, out: &mut String) {
        if props.is_empty() {
            return;
        }
        out.push_str(" {");
        for (i, (k, v)) in props.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{}: {}", self.iri(k), render_literal(v));
        }
        out.push('}');
    }

    fn node(&self, n: &NodePattern, out: &mut String) {
        let mut inner = String::new();
        if let Some(name) = &n.name {
            inner.push_str(&escape_identifier(name.as_str()));
        }
        for l in &n.labels {
            inner.push(':');
            inner.push_str(&self.iri(l));
        }
        self.properties(&n.properties, &mut inner);
        let _ = write!(out, "({})", inner.trim_start());
    }

    fn relationship(&self, r: &RelationshipPattern, out: &mut String) {
        let mut inner = String::new();
        if let Some(name) = &r.name {
            inner.push_str(&escape_identifier(name.as_str()));
        }
        if let Some(t) = &r.rel_type {
            inner.push(':');
            inner.push_str(&self.iri(t));
        }
        if let Some(range) = r.range {
            let _ = write!(inner, "*{}..", range.min);
            if let Some(max) = range.max {
                let _ = write!(inner, "{max}");
            }
        }
        self.properties(&r.properties, &mut inner);
        let inner = inner.trim_start();
        out.push_str(if r.direction == Direction::In {
            "<-"
        } else {
            "-"
        });
        if !inner.is_empty() {
            let _ = write!(out, "[{inner}]");
        }
        out.push_str(if r.direction == Direction::Out {
            "->"
        } else {
            "-"
        });
    }

    fn path(&self, p: &PathPattern, out: &mut String) {
        self.node(&p.start, out);
        for (r, n) in &p.steps {
            self.relationship(r, out);
            self.node(n, out);
        }
    }

    fn expr(&self, e: &Expr) -> String {
        match e {
            Expr::Var(n) => escape_identifier(n),
            Expr::Property(n, k) => format!("{}.{}", escape_identifier(n), self.iri(k)),
            Expr::Labels(n) => format!("labels({})", escape_identifier(n)),
            Expr::Type(n) => format!("type({})", escape_identifier(n)),
            Expr::Literal(t) => render_literal(t),
            Expr::Null => "NULL".into(),
            Expr::Compare(op, a, b) => {
                format!(
                    "{} {} {}",
                    self.operand(a),
                    op.cypher_symbol(),
                    self.operand(b)
                )
            }
            Expr::And(a, b) => format!("({} AND {})", self.expr(a), self.expr(b)),
            Expr::Or(a, b) => format!("({} OR {})", self.expr(a), self.expr(b)),
            Expr::Not(inner) => format!("NOT {}", self.operand(inner)),
            Expr::IsNotNull(inner) => format!("{} IS NOT NULL", self.operand(inner)),
            Expr::Aggregate {
                func,
                distinct,
                arg,
            } => {
                let arg = arg
                    .as_ref()
                    .map_or_else(|| "*".to_string(), |a| self.expr(a));
                let d = if *distinct { "DISTINCT " } else { "" };
                format!("{}({d}{arg})", func.name())
            }
        }
    }

    fn operand(&self, e: &Expr) -> String {
        match e {
            Expr::Compare(..) | Expr::IsNotNull(..) | Expr::Not(..) => {
                format!("({})", self.expr(e))
            }
            _ => self.expr(e),
        }
    }

    fn sep(&self) -> &'static str {
        match self.style {
            RenderStyle::SingleLine => " ",
            RenderStyle::Pretty => "\n",
        }
    }

    fn query(&self, q: &CypherQuery, out: &mut String) -> Result<()> {
        let arms = q.union_arms();
        let width = arms[0].return_items.len();
        for arm in &arms[1..] {
            if arm.return_items.len() != width {
                return Err(Error::UnunifiableUnion {
                    left: width,
                    right: arm.return_items.len(),
                });
            }
        }
        let mut cur = q;
        loop {
            self.single(cur, out)?;
            match &cur.union {
                Some(u) => {
                    let kw = if u.all { "UNION ALL" } else { "UNION" };
                    let _ = write!(out, "{}{kw}{}", self.sep(), self.sep());
                    cur = &u.query;
                }
                None => return Ok(()),
            }
        }
    }

    fn single(&self, q: &CypherQuery, out: &mut String) -> Result<()> {
        let mut parts: Vec<String> = Vec::new();
        if let Some(inner) = &q.call {
            let mut body = String::new();
            self.query(inner, &mut body)?;
            parts.push(match self.style {
                RenderStyle::SingleLine => format!("CALL {{ {body} }}"),
                RenderStyle::Pretty => {
                    let indented: Vec<String> = body.lines().map(|l| format!("  {l}")).collect();
                    format!("CALL {{\n{}\n}}", indented.join("\n"))
                }
            });
        }
        for clause in &q.clauses {
            match clause {
                Clause::Match(m) => {
                    let mut s = String::from(if m.optional {
                        "OPTIONAL MATCH "
                    } else {
                        "MATCH "
                    });
                    for (i, p) in m.patterns.iter().enumerate() {
                        if i > 0 {
                            s.push_str(", ");
                        }
                        self.path(p, &mut s);
                    }
                    parts.push(s);
                    if let Some(w) = &m.where_ {
                        parts.push(format!("WHERE {}", self.expr(w)));
                    }
                }
                Clause::Unwind { expr, alias } => parts.push(format!(
                    "UNWIND {} AS {}",
                    self.expr(expr),
                    escape_identifier(alias)
                )),
                Clause::With { where_ } => {
                    parts.push(format!("WITH * WHERE {}", self.expr(where_)))
                }
            }
        }
        let items: Vec<String> = q
            .return_items
            .iter()
            .map(|item| match &item.alias {
                Some(a) => format!("{} AS {}", self.expr(&item.expr), escape_identifier(a)),
                None => self.expr(&item.expr),
            })
            .collect();
        let distinct = if q.distinct { "DISTINCT " } else { "" };
        parts.push(format!("RETURN {distinct}{}", items.join(", ")));
        if !q.order.is_empty() {
            let keys: Vec<String> = q
                .order
                .iter()
                .map(|s| {
                    let dir = if s.descending { "DESC" } else { "ASC" };
                    format!("{} {dir}", self.expr(&s.expr))
                })
                .collect();
            parts.push(format!("ORDER BY {}", keys.join(", ")));
        }
        if let Some(skip) = q.skip {
            parts.push(format!("SKIP {skip}"));
        }
        if let Some(limit) = q.limit {
            parts.push(format!("LIMIT {limit}"));
        }
        out.push_str(&parts.join(self.sep()));
        Ok(())
    }
}

/// Render on a single line.
pub fn render(q: &CypherQuery, prefixes: &PrefixMap) -> Result<String> {
    render_with(q, prefixes, RenderStyle::SingleLine)
}

/// Render `q`, showing IRIs compacted against `prefixes`.
pub fn render_with(q: &CypherQuery, prefixes: &PrefixMap, style: RenderStyle) -> Result<String> {
    let r = Renderer { prefixes, style };
    let mut out = String::new();
    r.query(q, &mut out)?;
    Ok(out)
}

pub fn render_expr(e: &Expr, prefixes: &PrefixMap) -> String {
    Renderer {
        prefixes,
        style: RenderStyle::SingleLine,
    }
    .expr(e)
}

/// Column header for a return item: its alias, or the expression with
/// full IRIs and no quoting, e.g. `y.http://example.org/date`.
pub fn column_name(item: &ReturnItem) -> String {
    if let Some(a) = &item.alias {
        return a.clone();
    }
    plain_expr(&item.expr)
}

fn plain_expr(e: &Expr) -> String {
    match e {
        Expr::Var(n) => n.clone(),
        Expr::Property(n, k) => format!("{n}.{k}"),
        Expr::Labels(n) => format!("labels({n})"),
        Expr::Type(n) => format!("type({n})"),
        Expr::Aggregate {
            func,
            distinct,
            arg,
        } => {
            let arg = arg
                .as_ref()
                .map_or_else(|| "*".to_string(), |a| plain_expr(a));
            let d = if *distinct { "DISTINCT " } else { "" };
            format!("{}({d}{arg})", func.name())
        }
        other => render_expr(other, &PrefixMap::new()),
    }
}
