//! Recursive-descent parser for the supported SELECT subset.

use indexmap::IndexSet;

use super::ast::*;
use crate::error::{Error, Result};
use crate::rdf::{Literal, PrefixMap, RdfTerm, RDF_TYPE};
use crate::value::{numeric_literal, AggregateFn, CompareOp};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    IriRef(String),
    PName(String, String),
    Var(String),
    Str(String),
    LangTag(String),
    Number(String),
    Ident(String),
    BlankLabel(String),
    Punct(&'static str),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::IriRef(i) => format!("<{i}>"),
            Tok::PName(p, l) => format!("{p}:{l}"),
            Tok::Var(v) => format!("?{v}"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::LangTag(l) => format!("@{l}"),
            Tok::Number(n) => n.clone(),
            Tok::Ident(i) => i.clone(),
            Tok::BlankLabel(b) => format!("_:{b}"),
            Tok::Punct(p) => format!("'{p}'"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self, Tok::Ident(i) if i.eq_ignore_ascii_case(kw))
    }
}

const PUNCTS: [&str; 22] = [
    "^^", "&&", "||", "!=", "<=", ">=", "{", "}", "(", ")", ".", ";", ",", "*", "/", "^", "+", "|",
    "!", "=", "<", ">",
];

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let at = |i: usize| chars.get(i).map(|c| c.1);
    let offset = |i: usize| chars.get(i).map_or(text.len(), |c| c.0);
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i].1;
        let start = offset(i);
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            while at(i).is_some_and(|c| c != '\n') {
                i += 1;
            }
            continue;
        }
        if c == '<' {
            // An IRI reference must be absolute (contain ':') and free of
            // whitespace; otherwise '<' is the comparison operator.
            let mut j = i + 1;
            let mut ok = false;
            while let Some(d) = at(j) {
                if d == '>' {
                    ok = true;
                    break;
                }
                if d.is_whitespace() || "<\"{}|^`\\".contains(d) {
                    break;
                }
                j += 1;
            }
            if ok {
                let body: String = chars[i + 1..j].iter().map(|c| c.1).collect();
                if body.contains(':') {
                    out.push((start, Tok::IriRef(body)));
                    i = j + 1;
                    continue;
                }
            }
        }
        if c == '?' || c == '$' {
            if at(i + 1).is_some_and(|d| d.is_alphanumeric() || d == '_') {
                let mut j = i + 1;
                while at(j).is_some_and(|d| d.is_alphanumeric() || d == '_') {
                    j += 1;
                }
                let name: String = chars[i + 1..j].iter().map(|c| c.1).collect();
                out.push((start, Tok::Var(name)));
                i = j;
            } else {
                out.push((start, Tok::Punct("?")));
                i += 1;
            }
            continue;
        }
        if c == '"' || c == '\'' {
            let (s, next) = read_string(&chars, i, text)?;
            out.push((start, Tok::Str(s)));
            i = next;
            continue;
        }
        if c == '@' {
            let mut j = i + 1;
            while at(j).is_some_and(|d| d.is_ascii_alphanumeric() || d == '-') {
                j += 1;
            }
            let tag: String = chars[i + 1..j].iter().map(|c| c.1).collect();
            out.push((start, Tok::LangTag(tag)));
            i = j;
            continue;
        }
        let starts_number = c.is_ascii_digit()
            || ((c == '-' || c == '+') && at(i + 1).is_some_and(|d| d.is_ascii_digit()));
        if starts_number {
            let mut j = i + 1;
            while at(j).is_some_and(|d| d.is_ascii_digit()) {
                j += 1;
            }
            if at(j) == Some('.') && at(j + 1).is_some_and(|d| d.is_ascii_digit()) {
                j += 1;
                while at(j).is_some_and(|d| d.is_ascii_digit()) {
                    j += 1;
                }
            }
            if matches!(at(j), Some('e' | 'E')) {
                let mut k = j + 1;
                if matches!(at(k), Some('+' | '-')) {
                    k += 1;
                }
                if at(k).is_some_and(|d| d.is_ascii_digit()) {
                    j = k;
                    while at(j).is_some_and(|d| d.is_ascii_digit()) {
                        j += 1;
                    }
                }
            }
            let tok: String = chars[i..j].iter().map(|c| c.1).collect();
            out.push((start, Tok::Number(tok)));
            i = j;
            continue;
        }
        if c == '_' && at(i + 1) == Some(':') {
            let mut j = i + 2;
            while at(j).is_some_and(is_name_char) {
                j += 1;
            }
            let label: String = chars[i + 2..j].iter().map(|c| c.1).collect();
            out.push((start, Tok::BlankLabel(label)));
            i = j;
            continue;
        }
        if is_name_start(c) || c == ':' {
            let mut j = i;
            while at(j).is_some_and(|d| is_name_char(d) || d == '.') {
                j += 1;
            }
            // names never end with '.'
            while j > i && at(j - 1) == Some('.') {
                j -= 1;
            }
            let prefix: String = chars[i..j].iter().map(|c| c.1).collect();
            if at(j) == Some(':') {
                let mut k = j + 1;
                while at(k).is_some_and(|d| is_name_char(d) || d == '.' || d == ':') {
                    k += 1;
                }
                while k > j + 1 && at(k - 1) == Some('.') {
                    k -= 1;
                }
                let local: String = chars[j + 1..k].iter().map(|c| c.1).collect();
                out.push((start, Tok::PName(prefix, local)));
                i = k;
            } else {
                out.push((start, Tok::Ident(prefix)));
                i = j;
            }
            continue;
        }
        let rest = &text[start..];
        if let Some(p) = PUNCTS.iter().find(|p| rest.starts_with(**p)) {
            out.push((start, Tok::Punct(p)));
            i += p.chars().count();
            continue;
        }
        return Err(Error::Syntax {
            position: start,
            expected: "a token".into(),
            found: format!("'{c}'"),
        });
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

fn read_string(chars: &[(usize, char)], i: usize, text: &str) -> Result<(String, usize)> {
    let quote = chars[i].1;
    let start = chars[i].0;
    let unterminated = || Error::Syntax {
        position: start,
        expected: "closing quote".into(),
        found: "end of input".into(),
    };
    let mut s = String::new();
    let mut j = i + 1;
    loop {
        let &(pos, c) = chars.get(j).ok_or_else(unterminated)?;
        match c {
            c if c == quote => return Ok((s, j + 1)),
            '\n' | '\r' => return Err(unterminated()),
            '\\' => {
                let &(_, e) = chars.get(j + 1).ok_or_else(unterminated)?;
                let mapped = match e {
                    't' => '\t',
                    'n' => '\n',
                    'r' => '\r',
                    'b' => '\u{8}',
                    'f' => '\u{c}',
                    '"' => '"',
                    '\'' => '\'',
                    '\\' => '\\',
                    'u' | 'U' => {
                        let len = if e == 'u' { 4 } else { 8 };
                        let hex: String = chars.iter().skip(j + 2).take(len).map(|c| c.1).collect();
                        let cp = u32::from_str_radix(&hex, 16)
                            .ok()
                            .filter(|_| hex.len() == len)
                            .and_then(char::from_u32)
                            .ok_or_else(|| Error::Syntax {
                                position: pos,
                                expected: "unicode escape".into(),
                                found: text[pos..].chars().take(len + 2).collect(),
                            })?;
                        s.push(cp);
                        j += 2 + len;
                        continue;
                    }
                    other => {
                        return Err(Error::Syntax {
                            position: pos,
                            expected: "escape sequence".into(),
                            found: format!("\\{other}"),
                        })
                    }
                };
                s.push(mapped);
                j += 2;
            }
            c => {
                s.push(c);
                j += 1;
            }
        }
    }
}

/// Parse a SELECT query; prefixes must be declared in the query text.
pub fn parse_sparql(text: &str) -> Result<SparqlQuery> {
    parse_sparql_with(text, &PrefixMap::new())
}

/// Parse with `defaults` available as if declared; declarations in the
/// query override them.
pub fn parse_sparql_with(text: &str, defaults: &PrefixMap) -> Result<SparqlQuery> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        prefixes: defaults.clone(),
    };
    p.query()
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    prefixes: PrefixMap,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].1
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let idx = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[idx].1
    }

    fn next(&mut self) -> Tok {
        let tok = self.tokens[self.pos].1.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error<T>(&self, expected: &str) -> Result<T> {
        Err(Error::Syntax {
            position: self.tokens[self.pos].0,
            expected: expected.into(),
            found: self.peek().describe(),
        })
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.error(&format!("'{p}'"))
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.peek().is_keyword(kw) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            self.error(kw)
        }
    }

    fn expect_var(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.next();
                Ok(v)
            }
            _ => self.error("a variable"),
        }
    }

    fn expand(&self, prefix: &str, local: &str) -> Result<String> {
        match self.prefixes.get(prefix) {
            Some(ns) => Ok(format!("{ns}{local}")),
            None => Err(Error::InvalidQuery(format!(
                "undeclared prefix '{prefix}:'"
            ))),
        }
    }

    fn query(&mut self) -> Result<SparqlQuery> {
        self.prologue()?;
        for kw in ["ASK", "CONSTRUCT", "DESCRIBE"] {
            if self.peek().is_keyword(kw) {
                return Err(Error::Unsupported(format!("{kw} queries")));
            }
        }
        self.expect_keyword("SELECT")?;
        let mut modifiers = SolutionModifiers::default();
        if self.eat_keyword("DISTINCT") || self.eat_keyword("REDUCED") {
            modifiers.distinct = true;
        }
        if self.eat_punct("*") {
            modifiers.select_all = true;
        } else {
            loop {
                match self.peek() {
                    Tok::Var(_) => {
                        let v = self.expect_var()?;
                        modifiers.projection.push(ProjectionItem::Var(v));
                    }
                    Tok::Punct("(") => {
                        self.next();
                        let agg = self.aggregate()?;
                        modifiers.projection.push(ProjectionItem::Aggregate(agg));
                    }
                    _ => break,
                }
            }
            if modifiers.projection.is_empty() {
                return self.error("a projection");
            }
        }
        if self.peek().is_keyword("FROM") {
            return Err(Error::Unsupported("FROM dataset clauses".into()));
        }
        self.eat_keyword("WHERE");
        let pattern = self.group()?;
        self.solution_modifiers(&mut modifiers)?;
        if *self.peek() != Tok::Eof {
            if self.peek().is_keyword("VALUES") {
                return Err(Error::Unsupported("VALUES".into()));
            }
            return self.error("end of query");
        }
        let query = SparqlQuery {
            prefixes: self.prefixes.clone(),
            pattern,
            modifiers,
        };
        validate(query)
    }

    fn prologue(&mut self) -> Result<()> {
        loop {
            if self.eat_keyword("PREFIX") {
                let (prefix, local) = match self.next() {
                    Tok::PName(p, l) => (p, l),
                    _ => {
                        self.pos -= 1;
                        return self.error("a prefix name");
                    }
                };
                if !local.is_empty() {
                    return self.error("a prefix name ending in ':'");
                }
                match self.next() {
                    Tok::IriRef(ns) => self.prefixes.insert(prefix, ns),
                    _ => {
                        self.pos -= 1;
                        return self.error("a namespace IRI");
                    }
                }
            } else if self.peek().is_keyword("BASE") {
                return Err(Error::Unsupported("BASE declarations".into()));
            } else {
                return Ok(());
            }
        }
    }

    fn aggregate(&mut self) -> Result<Aggregate> {
        let func = match self.peek() {
            Tok::Ident(name) => match AggregateFn::parse(name) {
                Some(f) => f,
                None => return Err(Error::Unsupported(format!("projection expression {name}"))),
            },
            _ => return self.error("an aggregate function"),
        };
        self.next();
        self.expect_punct("(")?;
        let distinct = self.eat_keyword("DISTINCT");
        let arg = if self.eat_punct("*") {
            if func != AggregateFn::Count {
                return self.error("a variable");
            }
            None
        } else if matches!(self.peek(), Tok::Var(_)) {
            Some(self.expect_var()?)
        } else {
            return Err(Error::Unsupported("aggregates over expressions".into()));
        };
        self.expect_punct(")")?;
        self.expect_keyword("AS")?;
        let alias = self.expect_var()?;
        self.expect_punct(")")?;
        Ok(Aggregate {
            func,
            arg,
            distinct,
            alias,
        })
    }

    fn group(&mut self) -> Result<GraphPattern> {
        self.expect_punct("{")?;
        let mut current: Option<GraphPattern> = None;
        let mut bgp_open = false;
        let mut filters: Vec<Expr> = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Punct("}") => {
                    self.next();
                    break;
                }
                Tok::Punct(".") => {
                    self.next();
                }
                Tok::Punct("{") => {
                    let sub = self.group_or_union()?;
                    current = Some(join(current, sub));
                    bgp_open = false;
                }
                t if t.is_keyword("OPTIONAL") => {
                    self.next();
                    let sub = self.group()?;
                    let Some(left) = current.take() else {
                        return Err(Error::Unsupported(
                            "OPTIONAL without a preceding pattern".into(),
                        ));
                    };
                    current = Some(GraphPattern::opt(left, sub));
                    bgp_open = false;
                }
                t if t.is_keyword("FILTER") => {
                    self.next();
                    filters.push(self.constraint()?);
                }
                Tok::Ident(kw)
                    if ["MINUS", "GRAPH", "SERVICE", "BIND", "VALUES", "SELECT"]
                        .iter()
                        .any(|k| kw.eq_ignore_ascii_case(k)) =>
                {
                    let what = if kw.eq_ignore_ascii_case("SELECT") {
                        "subqueries".to_string()
                    } else {
                        kw.to_ascii_uppercase()
                    };
                    return Err(Error::Unsupported(what));
                }
                Tok::Eof => return self.error("'}'"),
                _ => {
                    let tps = self.triples_block()?;
                    match (&mut current, bgp_open) {
                        (Some(GraphPattern::Bgp(existing)), true) => existing.extend(tps),
                        _ => current = Some(join(current, GraphPattern::Bgp(tps))),
                    }
                    bgp_open = true;
                }
            }
        }
        let Some(mut pattern) = current else {
            return Err(Error::Unsupported("empty group pattern".into()));
        };
        let mut filters = filters.into_iter();
        if let Some(first) = filters.next() {
            let cond = filters.fold(first, Expr::and);
            pattern = GraphPattern::filter(pattern, cond);
        }
        Ok(pattern)
    }

    fn group_or_union(&mut self) -> Result<GraphPattern> {
        let mut pattern = self.group()?;
        while self.eat_keyword("UNION") {
            let right = self.group()?;
            pattern = GraphPattern::union(pattern, right);
        }
        Ok(pattern)
    }

    fn triples_block(&mut self) -> Result<Vec<TriplePattern>> {
        let subject = self.term("a subject")?;
        let mut out = Vec::new();
        loop {
            let predicate = self.verb()?;
            loop {
                let object = self.term("an object")?;
                out.push(TriplePattern {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                if !self.eat_punct(",") {
                    break;
                }
            }
            if !self.eat_punct(";") {
                break;
            }
            while self.eat_punct(";") {}
            if self.is_punct(".") || self.is_punct("}") {
                break;
            }
        }
        Ok(out)
    }

    fn iri(&mut self) -> Result<Option<String>> {
        match self.peek().clone() {
            Tok::IriRef(i) => {
                self.next();
                Ok(Some(i))
            }
            Tok::PName(p, l) => {
                let iri = self.expand(&p, &l)?;
                self.next();
                Ok(Some(iri))
            }
            _ => Ok(None),
        }
    }

    fn term(&mut self, what: &str) -> Result<TermPattern> {
        if let Some(iri) = self.iri()? {
            return Ok(TermPattern::Iri(iri));
        }
        match self.peek().clone() {
            Tok::Var(v) => {
                self.next();
                Ok(TermPattern::Variable(v))
            }
            Tok::BlankLabel(_) | Tok::Punct("[") => {
                Err(Error::Unsupported("blank nodes in query patterns".into()))
            }
            Tok::Punct("(") if matches!(self.peek_at(1), Tok::Punct(")")) => {
                Err(Error::Unsupported("RDF collections".into()))
            }
            _ => match self.literal()? {
                Some(lit) => Ok(TermPattern::Literal(lit)),
                None => self.error(what),
            },
        }
    }

    fn literal(&mut self) -> Result<Option<Literal>> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.next();
                if let Tok::LangTag(tag) = self.peek().clone() {
                    self.next();
                    return Ok(Some(Literal::lang(s, tag)));
                }
                if self.eat_punct("^^") {
                    return match self.iri()? {
                        Some(dt) => Ok(Some(Literal::typed(s, dt))),
                        None => self.error("a datatype IRI"),
                    };
                }
                Ok(Some(Literal::string(s)))
            }
            Tok::Number(n) => {
                let lit = numeric_literal(&n).ok_or_else(|| Error::Syntax {
                    position: self.tokens[self.pos].0,
                    expected: "a number".into(),
                    found: n.clone(),
                })?;
                self.next();
                Ok(Some(lit))
            }
            t if t.is_keyword("true") || t.is_keyword("false") => {
                self.next();
                Ok(Some(Literal::boolean(t.is_keyword("true"))))
            }
            _ => Ok(None),
        }
    }

    fn verb(&mut self) -> Result<PredicatePattern> {
        if let Tok::Var(v) = self.peek().clone() {
            self.next();
            return Ok(PredicatePattern::Term(TermPattern::Variable(v)));
        }
        let path = self.path()?;
        if self.is_punct("|") {
            return Err(Error::Unsupported("alternative property paths".into()));
        }
        Ok(match path {
            PathExpr::Predicate(iri) => PredicatePattern::Term(TermPattern::Iri(iri)),
            other => PredicatePattern::Path(other),
        })
    }

    fn path(&mut self) -> Result<PathExpr> {
        let mut path = self.path_elt()?;
        while self.eat_punct("/") {
            let next = self.path_elt()?;
            path = PathExpr::sequence(path, next);
        }
        if self.is_punct("|") {
            return Err(Error::Unsupported("alternative property paths".into()));
        }
        Ok(path)
    }

    fn path_elt(&mut self) -> Result<PathExpr> {
        let inverse = self.eat_punct("^");
        let primary = if self.eat_keyword("a") {
            PathExpr::Predicate(RDF_TYPE.to_string())
        } else if let Some(iri) = self.iri()? {
            PathExpr::Predicate(iri)
        } else if self.eat_punct("(") {
            let inner = self.path()?;
            self.expect_punct(")")?;
            inner
        } else if self.is_punct("!") {
            return Err(Error::Unsupported("negated property sets".into()));
        } else {
            return self.error("a predicate");
        };
        let modifier = if self.eat_punct("*") {
            Some("*")
        } else if self.eat_punct("+") {
            Some("+")
        } else if self.eat_punct("?") {
            Some("?")
        } else {
            None
        };
        match (inverse, modifier, primary) {
            (false, None, p) => Ok(p),
            (true, None, PathExpr::Predicate(i)) => Ok(PathExpr::Inverse(i)),
            (false, Some(m), PathExpr::Predicate(i)) => Ok(match m {
                "*" => PathExpr::ZeroOrMore(i),
                "+" => PathExpr::OneOrMore(i),
                _ => PathExpr::ZeroOrOne(i),
            }),
            (true, None, _) => Err(Error::Unsupported("inverse of a compound path".into())),
            (true, Some(_), _) => Err(Error::Unsupported("inverse closure paths".into())),
            (false, Some(_), _) => Err(Error::Unsupported("closure of a compound path".into())),
        }
    }

    fn constraint(&mut self) -> Result<Expr> {
        if self.is_punct("(") {
            self.next();
            let e = self.expr()?;
            self.expect_punct(")")?;
            return Ok(e);
        }
        match self.peek() {
            Tok::Ident(name) => Err(Error::Unsupported(format!(
                "FILTER function {}",
                name.to_ascii_uppercase()
            ))),
            _ => self.error("'(' after FILTER"),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut left = self.and_expr()?;
        while self.eat_punct("||") {
            let right = self.and_expr()?;
            left = Expr::or(left, right);
        }
        Ok(left)
    }

    fn and_expr(&mut self) -> Result<Expr> {
        let mut left = self.rel_expr()?;
        while self.eat_punct("&&") {
            let right = self.rel_expr()?;
            left = Expr::and(left, right);
        }
        Ok(left)
    }

    fn rel_expr(&mut self) -> Result<Expr> {
        let left = self.unary()?;
        let op = match self.peek() {
            Tok::Punct("=") => CompareOp::Eq,
            Tok::Punct("!=") => CompareOp::Ne,
            Tok::Punct("<") => CompareOp::Lt,
            Tok::Punct("<=") => CompareOp::Le,
            Tok::Punct(">") => CompareOp::Gt,
            Tok::Punct(">=") => CompareOp::Ge,
            Tok::Punct("+" | "-" | "*" | "/") => {
                return Err(Error::Unsupported("arithmetic in FILTER".into()))
            }
            Tok::Number(n) if n.starts_with('-') || n.starts_with('+') => {
                return Err(Error::Unsupported("arithmetic in FILTER".into()))
            }
            t if t.is_keyword("IN") || t.is_keyword("NOT") => {
                return Err(Error::Unsupported("IN / NOT IN".into()))
            }
            _ => return Ok(left),
        };
        self.next();
        let right = self.unary()?;
        Ok(Expr::compare(op, left, right))
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_punct("!") {
            return Ok(Expr::not(self.unary()?));
        }
        if self.eat_punct("(") {
            let e = self.expr()?;
            self.expect_punct(")")?;
            return Ok(e);
        }
        if let Tok::Var(v) = self.peek().clone() {
            self.next();
            return Ok(Expr::Var(v));
        }
        if let Some(iri) = self.iri()? {
            if self.is_punct("(") {
                return Err(Error::Unsupported(format!("FILTER function <{iri}>")));
            }
            return Ok(Expr::Const(RdfTerm::Iri(iri)));
        }
        if let Some(lit) = self.literal()? {
            return Ok(Expr::Const(RdfTerm::Literal(lit)));
        }
        match self.peek() {
            Tok::Ident(name) => Err(Error::Unsupported(format!(
                "FILTER function {}",
                name.to_ascii_uppercase()
            ))),
            _ => self.error("an expression"),
        }
    }

    fn solution_modifiers(&mut self, m: &mut SolutionModifiers) -> Result<()> {
        if self.eat_keyword("GROUP") {
            self.expect_keyword("BY")?;
            while matches!(self.peek(), Tok::Var(_)) {
                let v = self.expect_var()?;
                m.group_by.push(v);
            }
            if m.group_by.is_empty() {
                if self.is_punct("(") {
                    return Err(Error::Unsupported("GROUP BY expressions".into()));
                }
                return self.error("a variable");
            }
        }
        if self.peek().is_keyword("HAVING") {
            return Err(Error::Unsupported("HAVING".into()));
        }
        if self.eat_keyword("ORDER") {
            self.expect_keyword("BY")?;
            loop {
                let descending = if self.eat_keyword("DESC") {
                    Some(true)
                } else if self.eat_keyword("ASC") {
                    Some(false)
                } else {
                    None
                };
                let var = match (descending, self.peek().clone()) {
                    (None, Tok::Var(v)) => {
                        self.next();
                        v
                    }
                    (_, Tok::Punct("(")) => {
                        self.next();
                        if !matches!(self.peek(), Tok::Var(_)) {
                            return Err(Error::Unsupported("ORDER BY expressions".into()));
                        }
                        let v = self.expect_var()?;
                        if !self.is_punct(")") {
                            return Err(Error::Unsupported("ORDER BY expressions".into()));
                        }
                        self.next();
                        v
                    }
                    (None, _) if !m.order.is_empty() => break,
                    _ => return self.error("an order condition"),
                };
                m.order.push(OrderKey {
                    var,
                    descending: descending.unwrap_or(false),
                });
            }
        }
        loop {
            if self.eat_keyword("LIMIT") {
                m.limit = Some(self.unsigned()?);
            } else if self.eat_keyword("OFFSET") {
                m.offset = Some(self.unsigned()?);
            } else {
                return Ok(());
            }
        }
    }

    fn unsigned(&mut self) -> Result<u64> {
        match self.peek().clone() {
            Tok::Number(n) => match n.parse() {
                Ok(v) => {
                    self.next();
                    Ok(v)
                }
                Err(_) => self.error("a non-negative integer"),
            },
            _ => self.error("a non-negative integer"),
        }
    }
}

fn join(left: Option<GraphPattern>, right: GraphPattern) -> GraphPattern {
    match left {
        None => right,
        Some(l) => GraphPattern::and(l, right),
    }
}

fn validate(mut q: SparqlQuery) -> Result<SparqlQuery> {
    let vars = q.pattern.variables();
    let m = &mut q.modifiers;
    if m.select_all {
        if !m.group_by.is_empty() {
            return Err(Error::InvalidQuery("SELECT * with GROUP BY".into()));
        }
        m.projection = vars.iter().cloned().map(ProjectionItem::Var).collect();
    }
    let mut names: IndexSet<&str> = IndexSet::new();
    for item in &m.projection {
        match item {
            ProjectionItem::Var(v) => {
                if !vars.contains(v) {
                    return Err(Error::InvalidQuery(format!(
                        "projected variable ?{v} does not occur in the pattern"
                    )));
                }
            }
            ProjectionItem::Aggregate(a) => {
                if vars.contains(&a.alias) {
                    return Err(Error::InvalidQuery(format!(
                        "aggregate alias ?{} is already a pattern variable",
                        a.alias
                    )));
                }
                if let Some(arg) = &a.arg {
                    if !vars.contains(arg) {
                        return Err(Error::InvalidQuery(format!(
                            "aggregated variable ?{arg} does not occur in the pattern"
                        )));
                    }
                }
            }
        }
        if !names.insert(item.name()) {
            return Err(Error::InvalidQuery(format!(
                "?{} is projected twice",
                item.name()
            )));
        }
    }
    for g in &m.group_by {
        if !vars.contains(g) {
            return Err(Error::InvalidQuery(format!(
                "grouping variable ?{g} does not occur in the pattern"
            )));
        }
    }
    let aggregated = m.has_aggregates();
    if aggregated || !m.group_by.is_empty() {
        let plain: Vec<String> = m
            .projection
            .iter()
            .filter_map(|p| match p {
                ProjectionItem::Var(v) => Some(v.clone()),
                ProjectionItem::Aggregate(_) => None,
            })
            .collect();
        if m.group_by.is_empty() {
            m.group_by = plain;
        } else if let Some(v) = plain.iter().find(|v| !m.group_by.contains(v)) {
            return Err(Error::InvalidQuery(format!(
                "?{v} is projected but neither grouped nor aggregated"
            )));
        }
    }
    for key in &m.order {
        if !vars.contains(&key.var) && !names.contains(key.var.as_str()) {
            return Err(Error::InvalidQuery(format!(
                "ORDER BY variable ?{} is not visible",
                key.var
            )));
        }
    }
    Ok(q)
}
