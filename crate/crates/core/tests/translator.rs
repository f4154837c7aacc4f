mod common;

use common::{bsbm, prefixes, reviews};
use proptest::prelude::*;
use sparql2cypher::catalog::{derive_catalog, SchemaCatalog};
use sparql2cypher::cypher::{
    escape_identifier, render, Clause, Direction, Name, PathPattern, Range,
};
use sparql2cypher::error::Error;
use sparql2cypher::oracle::check_equivalence;
use sparql2cypher::rdf::{Literal, RdfTerm, RDF_TYPE};
use sparql2cypher::sparql::{parse_sparql, PathExpr, TermPattern, TriplePattern};
use sparql2cypher::translate::{map_property_path, pmm, translate, Binding};

fn cat() -> SchemaCatalog {
    derive_catalog(&reviews()).unwrap()
}

fn v(name: &str) -> TermPattern {
    TermPattern::var(name)
}

fn iri(local: &str) -> TermPattern {
    TermPattern::iri(bsbm(local))
}

fn cypher(q: &str) -> Result<String, Error> {
    let q = parse_sparql(&format!("PREFIX : <{}>\n{q}", common::BSBM))?;
    let t = translate(&q, &cat())?;
    render(&t.query, &prefixes())
}

fn single(bgp: &[TriplePattern]) -> (PathPattern, indexmap::IndexMap<String, Binding>) {
    let set = pmm(bgp, &cat()).unwrap();
    assert_eq!(set.patterns.len(), 1);
    (set.patterns.into_iter().next().unwrap(), set.bindings)
}

#[test]
fn class_triple_labels_the_node() {
    let (p, b) = single(&[TriplePattern::new(
        v("x"),
        TermPattern::iri(RDF_TYPE),
        iri("Review"),
    )]);
    assert_eq!(p.start.name, Some(Name::Var("x".into())));
    assert_eq!(p.start.labels, [bsbm("Review")]);
    assert!(p.steps.is_empty());
    assert_eq!(b["x"], Binding::Node("x".into()));
}

#[test]
fn literal_property_becomes_node_property_map() {
    let lit = TermPattern::Literal(Literal::string("review1"));
    let (p, _) = single(&[TriplePattern::new(v("x"), iri("title"), lit)]);
    assert_eq!(
        p.start.properties.get(&bsbm("title")),
        Some(&RdfTerm::Literal(Literal::string("review1")))
    );
    assert!(p.steps.is_empty());
}

#[test]
fn relationship_triple_gets_generated_name() {
    let (p, b) = single(&[TriplePattern::new(v("x"), iri("reviewFor"), v("y"))]);
    let (rel, end) = &p.steps[0];
    assert_eq!(rel.direction, Direction::Out);
    assert_eq!(rel.rel_type.as_deref(), Some(bsbm("reviewFor").as_str()));
    assert!(matches!(rel.name, Some(Name::Generated(_))));
    assert_eq!(end.name_str(), Some("y"));
    assert_eq!(b["y"], Binding::Node("y".into()));
}

#[test]
fn type_variable_unwinds_labels() {
    assert_eq!(
        cypher("SELECT ?x ?t WHERE { ?x a ?t }").unwrap(),
        "MATCH (x) UNWIND labels(x) AS t RETURN x, t"
    );
    let (_, b) = single(&[TriplePattern::new(
        v("x"),
        TermPattern::iri(RDF_TYPE),
        v("t"),
    )]);
    assert!(matches!(b["t"], Binding::Label(_)));
}

#[test]
fn predicate_variable_returns_type() {
    let (p, b) = single(&[TriplePattern::new(v("x"), v("y"), v("z"))]);
    assert_eq!(p.steps[0].0.rel_type, None);
    assert_eq!(b["y"], Binding::Rel("y".into()));
    assert_eq!(
        cypher("SELECT ?x ?y ?z WHERE { ?x ?y ?z }").unwrap(),
        "MATCH (x)-[y]->(z) RETURN x, type(y), z"
    );
}

#[test]
fn property_variable_reads_node_property() {
    let (p, b) = single(&[TriplePattern::new(v("x"), iri("title"), v("y"))]);
    assert!(p.steps.is_empty() && p.start.properties.is_empty());
    assert_eq!(b["y"], Binding::Property("x".into(), bsbm("title")));
    assert_eq!(
        cypher("SELECT ?x ?y WHERE { ?x :title ?y }").unwrap(),
        "MATCH (x) RETURN x, x.`bsbm:title`"
    );
}

fn path(expr: PathExpr) -> PathPattern {
    map_property_path(&TriplePattern::with_path(v("x"), expr, v("y")), &cat()).unwrap()
}

#[test]
fn path_shapes_map_to_direction_and_range() {
    let rf = || bsbm("reviewFor");
    let cases = [
        (PathExpr::Predicate(rf()), Direction::Out, None),
        (PathExpr::Inverse(rf()), Direction::In, None),
        (
            PathExpr::ZeroOrMore(rf()),
            Direction::Out,
            Some(Range { min: 0, max: None }),
        ),
        (
            PathExpr::OneOrMore(rf()),
            Direction::Out,
            Some(Range { min: 1, max: None }),
        ),
        (
            PathExpr::ZeroOrOne(rf()),
            Direction::Out,
            Some(Range {
                min: 0,
                max: Some(1),
            }),
        ),
    ];
    for (expr, direction, range) in cases {
        let p = path(expr.clone());
        assert_eq!(p.steps.len(), 1, "{expr:?}");
        let rel = &p.steps[0].0;
        assert_eq!((rel.direction, rel.range), (direction, range), "{expr:?}");
        assert_eq!(rel.rel_type, Some(rf()));
        assert_eq!(p.start.name_str(), Some("x"));
        assert_eq!(p.end().name_str(), Some("y"));
    }
}

#[test]
fn sequence_path_has_anonymous_middle_node() {
    let seq = PathExpr::sequence(
        PathExpr::Predicate(bsbm("reviewFor")),
        PathExpr::Inverse(bsbm("reviewFor")),
    );
    let p = path(seq);
    assert_eq!(p.steps.len(), 2);
    assert_eq!(p.steps[0].1.name, None);
    assert_eq!(p.steps[0].0.direction, Direction::Out);
    assert_eq!(p.steps[1].0.direction, Direction::In);
    assert_eq!(
        cypher("SELECT ?x ?y WHERE { ?x :reviewFor/^:reviewFor ?y }").unwrap(),
        "MATCH (x)-[reviewFor:`bsbm:reviewFor`]->()<-[reviewFor1:`bsbm:reviewFor`]-(y) RETURN x, y"
    );
}

#[test]
fn path_rendering() {
    for (sparql, rel) in [
        ("^:reviewFor", "<-[reviewFor:`bsbm:reviewFor`]-"),
        (":reviewFor*", "-[reviewFor:`bsbm:reviewFor`*0..]->"),
        (":reviewFor+", "-[reviewFor:`bsbm:reviewFor`*1..]->"),
        (":reviewFor?", "-[reviewFor:`bsbm:reviewFor`*0..1]->"),
    ] {
        let text = cypher(&format!("SELECT ?x ?y WHERE {{ ?x {sparql} ?y }}")).unwrap();
        assert_eq!(text, format!("MATCH (x){rel}(y) RETURN x, y"));
    }
}

#[test]
fn triples_on_one_subject_fold_into_one_path() {
    assert_eq!(
        cypher(r#"SELECT ?x ?y WHERE { ?x a :Review . ?x :title "review1" . ?x :reviewFor ?y }"#)
            .unwrap(),
        "MATCH (x:`bsbm:Review` {`bsbm:title`: 'review1'})-[reviewFor:`bsbm:reviewFor`]->(y) RETURN x, y"
    );
}

#[test]
fn subject_at_path_start_prepends_reversed_step() {
    assert_eq!(
        cypher("SELECT ?x ?y ?w WHERE { ?x :reviewFor ?y . ?x :reviewFor ?w }").unwrap(),
        "MATCH (w)<-[reviewFor1:`bsbm:reviewFor`]-(x)-[reviewFor:`bsbm:reviewFor`]->(y) RETURN x, y, w"
    );
}

#[test]
fn object_at_path_start_gets_comma_pattern() {
    let set = pmm(
        &[
            TriplePattern::new(v("x"), iri("reviewFor"), v("y")),
            TriplePattern::new(v("w"), iri("reviewFor"), v("x")),
        ],
        &cat(),
    )
    .unwrap();
    assert_eq!(set.patterns.len(), 2);
    assert_eq!(set.patterns[1].start.name_str(), Some("w"));
    assert_eq!(set.patterns[1].end().name_str(), Some("x"));
}

#[test]
fn disconnected_triples_give_separate_matches() {
    assert_eq!(
        cypher("SELECT ?x ?y WHERE { ?x a :Review . ?y a :Product }").unwrap(),
        "MATCH (x:`bsbm:Review`) MATCH (y:`bsbm:Product`) RETURN x, y"
    );
}

#[test]
fn optional_filter_stays_on_the_optional_match() {
    let q = parse_sparql(&format!(
        "PREFIX : <{}>\nSELECT ?x ?d WHERE {{ ?x a :Review OPTIONAL {{ ?x :date ?d FILTER(?d = \"20011024\") }} }}",
        common::BSBM
    ))
    .unwrap();
    let t = translate(&q, &cat()).unwrap();
    let matches: Vec<_> = t
        .query
        .clauses
        .iter()
        .filter_map(|c| match c {
            Clause::Match(m) => Some(m),
            _ => None,
        })
        .collect();
    assert_eq!(matches.len(), 2);
    assert!(!matches[0].optional && matches[0].where_.is_none());
    assert!(matches[1].optional && matches[1].where_.is_some());
    let report = check_equivalence(&q, &reviews(), &cat()).unwrap();
    assert!(report.is_equivalent(), "{report}");
}

#[test]
fn union_arms_share_aliases() {
    let text = cypher("SELECT ?x WHERE { { ?x a :Review } UNION { ?x :reviewFor ?y } }").unwrap();
    assert_eq!(
        text,
        "MATCH (x:`bsbm:Review`) RETURN x AS x UNION ALL MATCH (x)-[reviewFor:`bsbm:reviewFor`]->(y) RETURN x AS x"
    );
}

#[test]
fn filter_on_unbound_variable_is_rejected() {
    assert_eq!(
        cypher("SELECT ?x WHERE { ?x a :Review FILTER(?q > 1) }"),
        Err(Error::UnboundFilterVariable("q".into()))
    );
}

#[test]
fn reserved_word_variables_are_renamed() {
    assert_eq!(
        cypher("SELECT ?match WHERE { ?match a :Review }").unwrap(),
        "MATCH (match1:`bsbm:Review`) RETURN match1"
    );
}

#[test]
fn identifier_escaping() {
    assert_eq!(escape_identifier("x"), "x");
    assert_eq!(escape_identifier("_p1"), "_p1");
    assert_eq!(escape_identifier("b:R"), "`b:R`");
    assert_eq!(escape_identifier("1x"), "`1x`");
    assert_eq!(escape_identifier("a`b"), "`a``b`");
    assert_eq!(escape_identifier(""), "``");
}

const ORDER_BGP: [&str; 4] = ["?r a b:R", "?r b:rF ?p", "?p b:pr ?m", "?p b:pPN1 ?n"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn triple_order_does_not_change_answers(order in Just((0..ORDER_BGP.len()).collect::<Vec<_>>()).prop_shuffle()) {
        let g = sparql2cypher::synthetic::generate(&Default::default());
        let cat = derive_catalog(&g).unwrap();
        let body: Vec<&str> = order.iter().map(|&i| ORDER_BGP[i]).collect();
        let text = format!("SELECT ?r ?p ?m ?n WHERE {{ {} }}", body.join(" . "));
        let q = sparql2cypher::sparql::parse_sparql_with(&text, &prefixes()).unwrap();
        let report = check_equivalence(&q, &g, &cat).unwrap();
        prop_assert!(report.is_equivalent(), "{}\n{}", text, report);
        prop_assert_eq!(report.expected_rows, 20);
    }
}
