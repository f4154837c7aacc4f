use std::path::Path;

use sparql2cypher::catalog::load_catalog;
use sparql2cypher::cypher::render;
use sparql2cypher::rdf::PrefixMap;
use sparql2cypher::sparql::parse_sparql_with;
use sparql2cypher::translate::translate;

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[test]
fn golden_pairs_render_exactly() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let prefixes =
        PrefixMap::parse(&std::fs::read_to_string(dir.join("prefixes.txt")).unwrap()).unwrap();
    let cat = load_catalog(dir.join("golden.catalog.json")).unwrap();
    let mut stems = Vec::new();
    for entry in std::fs::read_dir(dir.join("golden")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "rq") {
            stems.push(path);
        }
    }
    stems.sort();
    assert_eq!(stems.len(), 4);
    for rq in stems {
        let text = std::fs::read_to_string(&rq).unwrap();
        let expected = std::fs::read_to_string(rq.with_extension("cypher")).unwrap();
        let q = parse_sparql_with(&text, &prefixes).unwrap();
        let t = translate(&q, &cat).unwrap();
        let got = render(&t.query, &prefixes).unwrap();
        assert_eq!(normalize(&got), normalize(&expected), "{}", rq.display());
    }
}
