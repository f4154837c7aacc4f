//! RDF terms, triples and graphs, plus a line-oriented N-Triples reader.
//!
//! IRIs are always stored expanded. Inside angle brackets the reader also
//! accepts `prefix:local` forms when `prefix` is known to the supplied
//! [`PrefixMap`], so fixtures can be written as `<bsbm:R1>`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use indexmap::IndexSet;

use crate::error::{Error, Result};

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
pub const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
pub const XSD_BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";

const NUMERIC_TYPES: &[&str] = &[
    XSD_INTEGER,
    XSD_DECIMAL,
    XSD_DOUBLE,
    "http://www.w3.org/2001/XMLSchema#float",
    "http://www.w3.org/2001/XMLSchema#int",
    "http://www.w3.org/2001/XMLSchema#long",
];

/// An RDF literal. Language tags are kept for display but do not take part
/// in equality, hashing or ordering; `xsd:string` and "no datatype" are the
/// same thing.
#[derive(Debug, Clone)]
pub struct Literal {
    lexical: String,
    datatype: Option<String>,
    language: Option<String>,
}

impl Literal {
    pub fn string(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: None,
            language: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        let datatype = datatype.into();
        Literal {
            lexical: lexical.into(),
            datatype: (datatype != XSD_STRING).then_some(datatype),
            language: None,
        }
    }

    pub fn lang(lexical: impl Into<String>, language: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: None,
            language: Some(language.into()),
        }
    }

    pub fn integer(value: i64) -> Self {
        Literal::typed(value.to_string(), XSD_INTEGER)
    }

    pub fn double(value: f64) -> Self {
        Literal::typed(format_double(value), XSD_DOUBLE)
    }

    pub fn boolean(value: bool) -> Self {
        Literal::typed(value.to_string(), XSD_BOOLEAN)
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Option<&str> {
        self.datatype.as_deref()
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    pub fn is_numeric(&self) -> bool {
        self.datatype
            .as_deref()
            .is_some_and(|dt| NUMERIC_TYPES.contains(&dt))
    }

    pub fn is_integer(&self) -> bool {
        self.datatype
            .as_deref()
            .is_some_and(|dt| dt == XSD_INTEGER || dt.ends_with("#int") || dt.ends_with("#long"))
    }

    /// Numeric value for numeric datatypes; `None` for everything else or
    /// an unparsable lexical form.
    pub fn as_f64(&self) -> Option<f64> {
        if self.is_numeric() {
            self.lexical.trim().parse().ok()
        } else {
            None
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match (self.datatype.as_deref(), self.lexical.as_str()) {
            (Some(XSD_BOOLEAN), "true" | "1") => Some(true),
            (Some(XSD_BOOLEAN), "false" | "0") => Some(false),
            _ => None,
        }
    }

    /// A literal without datatype (simple or language-tagged string).
    pub fn is_plain(&self) -> bool {
        self.datatype.is_none()
    }
}

/// Render an `f64` the way the aggregates produce it: integral values keep
/// one decimal place, everything else uses the shortest round-trip form.
pub fn format_double(value: f64) -> String {
    if value.fract() == 0.0 && value.abs() < 1e15 {
        format!("{value:.1}")
    } else {
        format!("{value}")
    }
}

impl PartialEq for Literal {
    fn eq(&self, other: &Self) -> bool {
        self.lexical == other.lexical && self.datatype == other.datatype
    }
}

impl Eq for Literal {}

impl Hash for Literal {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.lexical.hash(state);
        self.datatype.hash(state);
    }
}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.lexical, &self.datatype).cmp(&(&other.lexical, &other.datatype))
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", escape_string(&self.lexical))?;
        if let Some(lang) = &self.language {
            write!(f, "@{lang}")
        } else if let Some(dt) = &self.datatype {
            write!(f, "^^<{dt}>")
        } else {
            Ok(())
        }
    }
}

pub(crate) fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermKind {
    Iri,
    BlankNode,
    Literal,
}

/// An RDF term. Blank node labels keep their `_:` prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RdfTerm {
    Iri(String),
    BlankNode(String),
    Literal(Literal),
}

impl RdfTerm {
    pub fn iri(iri: impl Into<String>) -> Result<Self> {
        let iri = iri.into();
        if iri.is_empty() {
            return Err(Error::InvalidTerm("empty IRI".into()));
        }
        Ok(RdfTerm::Iri(iri))
    }

    pub fn blank(label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if !label.starts_with("_:") || label.len() < 3 {
            return Err(Error::InvalidTerm(format!("blank node label `{label}`")));
        }
        Ok(RdfTerm::BlankNode(label))
    }

    pub fn kind(&self) -> TermKind {
        match self {
            RdfTerm::Iri(_) => TermKind::Iri,
            RdfTerm::BlankNode(_) => TermKind::BlankNode,
            RdfTerm::Literal(_) => TermKind::Literal,
        }
    }

    pub fn lexical(&self) -> &str {
        match self {
            RdfTerm::Iri(s) | RdfTerm::BlankNode(s) => s,
            RdfTerm::Literal(lit) => lit.lexical(),
        }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            RdfTerm::Iri(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            RdfTerm::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn is_resource(&self) -> bool {
        !matches!(self, RdfTerm::Literal(_))
    }

    /// Display form, compacting IRIs against `prefixes`.
    pub fn display(&self, prefixes: &PrefixMap) -> String {
        match self {
            RdfTerm::Iri(iri) => prefixes.compact(iri),
            RdfTerm::BlankNode(label) => label.clone(),
            RdfTerm::Literal(lit) => lit.to_string(),
        }
    }
}

impl From<Literal> for RdfTerm {
    fn from(lit: Literal) -> Self {
        RdfTerm::Literal(lit)
    }
}

impl fmt::Display for RdfTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RdfTerm::Iri(iri) => write!(f, "<{iri}>"),
            RdfTerm::BlankNode(label) => f.write_str(label),
            RdfTerm::Literal(lit) => lit.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RdfTriple {
    pub subject: RdfTerm,
    pub predicate: RdfTerm,
    pub object: RdfTerm,
}

impl RdfTriple {
    pub fn new(subject: RdfTerm, predicate: RdfTerm, object: RdfTerm) -> Result<Self> {
        if !subject.is_resource() {
            return Err(Error::InvalidTerm(format!("literal subject {subject}")));
        }
        if predicate.kind() != TermKind::Iri {
            return Err(Error::InvalidTerm(format!("non-IRI predicate {predicate}")));
        }
        Ok(RdfTriple {
            subject,
            predicate,
            object,
        })
    }

    pub fn predicate_iri(&self) -> &str {
        self.predicate.lexical()
    }
}

impl fmt::Display for RdfTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// Prefix → namespace table used for expansion on input and compaction on
/// display.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixMap {
    entries: BTreeMap<String, String>,
}

impl PrefixMap {
    pub fn new() -> Self {
        PrefixMap::default()
    }

    /// `rdf`, `rdfs` and `xsd`.
    pub fn with_defaults() -> Self {
        let mut map = PrefixMap::new();
        map.insert("rdf", RDF_NS);
        map.insert("rdfs", RDFS_NS);
        map.insert("xsd", XSD_NS);
        map
    }

    pub fn insert(&mut self, prefix: impl Into<String>, namespace: impl Into<String>) {
        self.entries.insert(prefix.into(), namespace.into());
    }

    pub fn get(&self, prefix: &str) -> Option<&str> {
        self.entries.get(prefix).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(p, ns)| (p.as_str(), ns.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn extend(&mut self, other: &PrefixMap) {
        for (p, ns) in other.iter() {
            self.insert(p, ns);
        }
    }

    /// Expand `prefix:local` if `prefix` is known.
    pub fn expand(&self, name: &str) -> Option<String> {
        let (prefix, local) = name.split_once(':')?;
        self.get(prefix).map(|ns| format!("{ns}{local}"))
    }

    /// Shortest `prefix:local` form of `iri`, or the IRI itself when no
    /// namespace matches.
    pub fn compact(&self, iri: &str) -> String {
        self.entries
            .iter()
            .filter_map(|(prefix, ns)| {
                iri.strip_prefix(ns.as_str())
                    .filter(|local| !local.is_empty() && !local.contains(['/', '#']))
                    .map(|local| format!("{prefix}:{local}"))
            })
            .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
            .unwrap_or_else(|| iri.to_string())
    }

    /// Parse the sidecar format: one `prefix namespace` pair per line. A
    /// trailing `:` on the prefix and angle brackets around the namespace
    /// are tolerated; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = PrefixMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(prefix), Some(ns), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::NTriples {
                    line: idx + 1,
                    message: format!("expected `prefix namespace`, got `{line}`"),
                });
            };
            let prefix = prefix.strip_suffix(':').unwrap_or(prefix);
            let ns = ns
                .strip_prefix('<')
                .and_then(|s| s.strip_suffix('>'))
                .unwrap_or(ns);
            map.insert(prefix, ns);
        }
        Ok(map)
    }
}

/// A set of triples in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RdfGraph {
    triples: IndexSet<RdfTriple>,
    pub prefixes: PrefixMap,
}

impl RdfGraph {
    pub fn new() -> Self {
        RdfGraph::default()
    }

    /// Returns `false` when the triple was already present.
    pub fn insert(&mut self, triple: RdfTriple) -> bool {
        self.triples.insert(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &RdfTriple> {
        self.triples.iter()
    }

    pub fn contains(&self, triple: &RdfTriple) -> bool {
        self.triples.contains(triple)
    }

    /// All distinct terms in subject or object position, in first-seen order.
    pub fn nodes(&self) -> IndexSet<RdfTerm> {
        let mut out = IndexSet::new();
        for t in &self.triples {
            out.insert(t.subject.clone());
            out.insert(t.object.clone());
        }
        out
    }

    pub fn to_ntriples(&self) -> String {
        let mut out = String::new();
        for t in &self.triples {
            out.push_str(&t.to_string());
            out.push('\n');
        }
        out
    }
}

impl FromIterator<RdfTriple> for RdfGraph {
    fn from_iter<I: IntoIterator<Item = RdfTriple>>(iter: I) -> Self {
        RdfGraph {
            triples: iter.into_iter().collect(),
            prefixes: PrefixMap::new(),
        }
    }
}

/// Parse N-Triples with only the default `rdf`/`rdfs`/`xsd` prefixes
/// available for bracketed prefixed names.
pub fn parse_ntriples(text: &str) -> Result<RdfGraph> {
    parse_ntriples_with(text, &PrefixMap::with_defaults())
}

/// Parse N-Triples, expanding `<prefix:local>` against `prefixes`. The
/// resulting graph keeps an empty prefix map.
pub fn parse_ntriples_with(text: &str, prefixes: &PrefixMap) -> Result<RdfGraph> {
    let mut graph = RdfGraph::new();
    for (idx, line) in text.lines().enumerate() {
        let mut cursor = LineCursor {
            chars: line.chars().collect(),
            pos: 0,
            prefixes,
        };
        cursor.skip_ws();
        if cursor.at_end() || cursor.peek() == Some('#') {
            continue;
        }
        let triple = cursor.statement().map_err(|message| Error::NTriples {
            line: idx + 1,
            message,
        })?;
        graph.insert(triple);
    }
    Ok(graph)
}

struct LineCursor<'a> {
    chars: Vec<char>,
    pos: usize,
    prefixes: &'a PrefixMap,
}

impl LineCursor<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn statement(&mut self) -> std::result::Result<RdfTriple, String> {
        let subject = self.term()?;
        if !subject.is_resource() {
            return Err("subject must be an IRI or blank node".into());
        }
        self.skip_ws();
        let predicate = self.term()?;
        if predicate.kind() != TermKind::Iri {
            return Err("predicate must be an IRI".into());
        }
        self.skip_ws();
        let object = self.term()?;
        self.skip_ws();
        if self.bump() != Some('.') {
            return Err("expected `.` at end of statement".into());
        }
        self.skip_ws();
        if !self.at_end() && self.peek() != Some('#') {
            return Err("trailing characters after `.`".into());
        }
        Ok(RdfTriple {
            subject,
            predicate,
            object,
        })
    }

    fn term(&mut self) -> std::result::Result<RdfTerm, String> {
        match self.peek() {
            Some('<') => Ok(RdfTerm::Iri(self.iri_ref()?)),
            Some('_') => {
                let start = self.pos;
                self.pos += 1;
                if self.bump() != Some(':') {
                    return Err("malformed blank node label".into());
                }
                while self
                    .peek()
                    .is_some_and(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
                {
                    self.pos += 1;
                }
                // a trailing '.' belongs to the statement terminator
                while self.pos > start + 2 && self.chars[self.pos - 1] == '.' {
                    self.pos -= 1;
                }
                let label: String = self.chars[start..self.pos].iter().collect();
                RdfTerm::blank(label).map_err(|e| e.to_string())
            }
            Some('"') => self.literal(),
            Some(c) => Err(format!("unexpected character `{c}`")),
            None => Err("unexpected end of line".into()),
        }
    }

    fn iri_ref(&mut self) -> std::result::Result<String, String> {
        self.bump();
        let mut iri = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some(c) if c.is_whitespace() => return Err("whitespace inside IRI".into()),
                Some(c) => iri.push(c),
                None => return Err("unterminated IRI".into()),
            }
        }
        if iri.is_empty() {
            return Err("empty IRI".into());
        }
        Ok(self.prefixes.expand(&iri).unwrap_or(iri))
    }

    fn literal(&mut self) -> std::result::Result<RdfTerm, String> {
        self.bump();
        let mut lexical = String::new();
        loop {
            match self.bump() {
                Some('"') => break,
                Some('\\') => lexical.push(self.escape()?),
                Some(c) => lexical.push(c),
                None => return Err("unterminated literal".into()),
            }
        }
        match self.peek() {
            Some('@') => {
                self.bump();
                let mut lang = String::new();
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == '-')
                {
                    lang.push(self.bump().unwrap_or_default());
                }
                if lang.is_empty() {
                    return Err("empty language tag".into());
                }
                Ok(Literal::lang(lexical, lang).into())
            }
            Some('^') => {
                self.bump();
                if self.bump() != Some('^') {
                    return Err("expected `^^`".into());
                }
                if self.peek() != Some('<') {
                    return Err("expected datatype IRI".into());
                }
                let dt = self.iri_ref()?;
                Ok(Literal::typed(lexical, dt).into())
            }
            _ => Ok(Literal::string(lexical).into()),
        }
    }

    fn escape(&mut self) -> std::result::Result<char, String> {
        let c = self.bump().ok_or("dangling escape")?;
        Ok(match c {
            't' => '\t',
            'b' => '\u{8}',
            'n' => '\n',
            'r' => '\r',
            'f' => '\u{c}',
            '"' => '"',
            '\'' => '\'',
            '\\' => '\\',
            'u' | 'U' => {
                let width = if c == 'u' { 4 } else { 8 };
                let hex: String = (0..width).filter_map(|_| self.bump()).collect();
                u32::from_str_radix(&hex, 16)
                    .ok()
                    .and_then(char::from_u32)
                    .ok_or_else(|| format!("bad unicode escape `{hex}`"))?
            }
            other => return Err(format!("unknown escape `\\{other}`")),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefixed_iris_in_brackets_expand() {
        let mut prefixes = PrefixMap::with_defaults();
        prefixes.insert("bsbm", "http://example.org/bsbm/");
        let g = parse_ntriples_with("<bsbm:R1> <rdf:type> <bsbm:Review> .", &prefixes).unwrap();
        let t = g.iter().next().unwrap();
        assert_eq!(t.subject, RdfTerm::Iri("http://example.org/bsbm/R1".into()));
        assert_eq!(t.predicate, RdfTerm::Iri(RDF_TYPE.into()));
        assert_eq!(
            t.object,
            RdfTerm::Iri("http://example.org/bsbm/Review".into())
        );
    }

    #[test]
    fn unknown_prefix_is_kept_verbatim() {
        let g = parse_ntriples("<bsbm:R1> <rdf:type> <bsbm:Review> .").unwrap();
        let t = g.iter().next().unwrap();
        assert_eq!(t.subject, RdfTerm::Iri("bsbm:R1".into()));
        assert_eq!(t.predicate_iri(), RDF_TYPE);
    }

    #[test]
    fn empty_and_comment_only_inputs() {
        assert_eq!(parse_ntriples("").unwrap().len(), 0);
        assert_eq!(parse_ntriples("# nothing\n\n   \n").unwrap().len(), 0);
    }

    #[test]
    fn duplicates_collapse() {
        let text = "<a:x> <a:p> \"v\" .\n<a:x> <a:p> \"v\" .\n";
        assert_eq!(parse_ntriples(text).unwrap().len(), 1);
    }

    #[test]
    fn literal_forms() {
        let text = r#"_:b1 <http://x/p> "12"^^<http://www.w3.org/2001/XMLSchema#integer> .
_:b1 <http://x/q> "chat"@fr .
_:b1 <http://x/r> "a\"bA" ."#;
        let g = parse_ntriples(text).unwrap();
        let objects: Vec<_> = g.iter().map(|t| t.object.clone()).collect();
        let RdfTerm::Literal(n) = &objects[0] else {
            panic!()
        };
        assert_eq!(n.as_f64(), Some(12.0));
        let RdfTerm::Literal(l) = &objects[1] else {
            panic!()
        };
        assert_eq!(l.language(), Some("fr"));
        assert_eq!(l, &Literal::string("chat"));
        let RdfTerm::Literal(e) = &objects[2] else {
            panic!()
        };
        assert_eq!(e.lexical(), "a\"bA");
        assert_eq!(
            g.iter().next().unwrap().subject,
            RdfTerm::BlankNode("_:b1".into())
        );
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_ntriples("<a:x> <a:p> <a:o> .\n<a:x> \"lit\" <a:o> .\n").unwrap_err();
        assert!(matches!(err, Error::NTriples { line: 2, .. }), "{err}");
        let err = parse_ntriples("<a:x> <a:p> <a:o>\n").unwrap_err();
        assert!(matches!(err, Error::NTriples { line: 1, .. }));
        let err = parse_ntriples("\"s\" <a:p> <a:o> .").unwrap_err();
        assert!(matches!(err, Error::NTriples { line: 1, .. }));
    }

    #[test]
    fn blank_node_before_terminator() {
        let g = parse_ntriples("<a:x> <a:p> _:b0.").unwrap();
        assert_eq!(
            g.iter().next().unwrap().object,
            RdfTerm::BlankNode("_:b0".into())
        );
    }

    #[test]
    fn compact_prefers_shortest_display() {
        let mut p = PrefixMap::new();
        p.insert("b", "http://ex.org/voc/");
        p.insert("long", "http://ex.org/");
        assert_eq!(p.compact("http://ex.org/voc/pPN1"), "b:pPN1");
        assert_eq!(p.compact("http://other.org/x"), "http://other.org/x");
        assert_eq!(p.expand("b:R"), Some("http://ex.org/voc/R".into()));
    }

    #[test]
    fn prefix_file_parsing() {
        let p = PrefixMap::parse("# comment\nb http://ex/b/\nb-inst: <http://ex/i/>\n").unwrap();
        assert_eq!(p.get("b"), Some("http://ex/b/"));
        assert_eq!(p.get("b-inst"), Some("http://ex/i/"));
        assert!(PrefixMap::parse("b\n").is_err());
    }

    #[test]
    fn triple_kind_invariants() {
        let lit = RdfTerm::Literal(Literal::string("x"));
        let iri = RdfTerm::Iri("http://x".into());
        assert!(RdfTriple::new(lit.clone(), iri.clone(), iri.clone()).is_err());
        assert!(RdfTriple::new(iri.clone(), lit.clone(), iri.clone()).is_err());
        assert!(RdfTriple::new(iri.clone(), iri.clone(), lit).is_ok());
        assert!(RdfTerm::iri("").is_err());
        assert!(RdfTerm::blank("b1").is_err());
    }

    #[test]
    fn language_tag_ignored_for_equality() {
        assert_eq!(Literal::lang("x", "en"), Literal::string("x"));
        assert_eq!(Literal::typed("x", XSD_STRING), Literal::string("x"));
        assert_ne!(Literal::integer(1), Literal::string("1"));
    }
}
