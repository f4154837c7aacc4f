mod common;

use common::{bsbm, reviews, REVIEW_QUERY};
use sparql2cypher::catalog::derive_catalog;
use sparql2cypher::cypher::{Expr, Name, ReturnItem};
use sparql2cypher::oracle::{check_equivalence, eval_mapping, exec, xi, zeta, Mapping};
use sparql2cypher::pg::{rdf_to_pg, NodeId, RelId};
use sparql2cypher::rdf::{Literal, RdfTerm};
use sparql2cypher::sparql::parse_sparql;
use sparql2cypher::translate::translate;
use sparql2cypher::value::Value;

fn date() -> Value {
    Value::literal(Literal::string("20011024"))
}

#[test]
fn review_chain_through_every_stage() {
    let g = reviews();
    let cat = derive_catalog(&g).unwrap();
    let pg = rdf_to_pg(&g, &cat).unwrap();
    let q = parse_sparql(REVIEW_QUERY).unwrap();
    let t = translate(&q, &cat).unwrap();

    // return the relationship as well, as in the hand-worked example
    let mut query = t.query.clone();
    let rel_name = query
        .match_patterns()
        .iter()
        .flat_map(|p| p.relationships())
        .find_map(|r| r.name.clone())
        .expect("relationship is named");
    assert!(matches!(rel_name, Name::Generated(_)));
    query.return_items = vec![
        ReturnItem::new(Expr::var("x")),
        ReturnItem::new(Expr::var(rel_name.as_str())),
        ReturnItem::new(Expr::var("y")),
        ReturnItem::new(Expr::property("y", bsbm("date"))),
    ];
    let r_prime = exec(&query, &pg).unwrap();
    assert_eq!(
        r_prime.sorted_rows(),
        vec![
            vec![
                Value::Node(NodeId(0)),
                Value::Rel(RelId(0)),
                Value::Node(NodeId(1)),
                date()
            ],
            vec![
                Value::Node(NodeId(3)),
                Value::Rel(RelId(2)),
                Value::Node(NodeId(1)),
                date()
            ],
        ]
    );
    let shown: Vec<String> = r_prime.sorted_rows()[1]
        .iter()
        .map(|v| v.to_string())
        .collect();
    assert_eq!(shown[..3], ["n4", "r3", "n2"]);

    let mut labelled = r_prime;
    for (attr, var) in labelled
        .schema
        .iter_mut()
        .zip([Some("x"), None, Some("y"), Some("z")])
    {
        attr.var = var.map(str::to_string);
    }
    let r = xi(&labelled, &pg).unwrap();
    let y_date = format!("y.{}", bsbm("date"));
    assert_eq!(
        r.column_names(),
        ["x", bsbm("reviewFor").as_str(), "y", y_date.as_str()]
    );
    let iri = |s: &str| Value::Term(RdfTerm::Iri(bsbm(s)));
    assert_eq!(
        r.sorted_rows(),
        vec![
            vec![iri("R1"), iri("reviewFor"), iri("Pr1"), date()],
            vec![iri("R2"), iri("reviewFor"), iri("Pr1"), date()],
        ]
    );

    let mut omega = zeta(&r);
    omega.sort();
    let row = |x: &str| -> Mapping {
        [
            ("x".to_string(), RdfTerm::Iri(bsbm(x))),
            ("y".to_string(), RdfTerm::Iri(bsbm("Pr1"))),
            (
                "z".to_string(),
                RdfTerm::Literal(Literal::string("20011024")),
            ),
        ]
        .into_iter()
        .collect()
    };
    assert_eq!(omega, vec![row("R1"), row("R2")]);

    let mut direct = eval_mapping(&q, &g);
    direct.sort();
    assert_eq!(direct, omega);

    let report = check_equivalence(&q, &g, &cat).unwrap();
    assert!(report.is_equivalent(), "{report}");
    assert_eq!(report.expected_rows, 2);
}

#[test]
fn partition_counts_on_review_graph() {
    let g = reviews();
    let cat = derive_catalog(&g).unwrap();
    let pg = rdf_to_pg(&g, &cat).unwrap();
    assert_eq!(pg.node_count(), 4);
    assert_eq!(pg.relationship_count(), 3);
    assert_eq!(pg.label_assignment_count(), 3);
    assert_eq!(pg.property_value_count(), 4);
    assert_eq!(
        pg.label_assignment_count() + pg.relationship_count() + pg.property_value_count(),
        g.len()
    );
}
