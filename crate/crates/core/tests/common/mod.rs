#![allow(dead_code)]

use std::path::PathBuf;

use sparql2cypher::rdf::{parse_ntriples, PrefixMap, RdfGraph};

pub const BSBM: &str = "http://example.org/bsbm/";

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn prefixes() -> PrefixMap {
    PrefixMap::parse(&std::fs::read_to_string(fixtures().join("prefixes.txt")).unwrap()).unwrap()
}

pub fn reviews() -> RdfGraph {
    parse_ntriples(&std::fs::read_to_string(fixtures().join("reviews.nt")).unwrap()).unwrap()
}

pub fn bsbm(local: &str) -> String {
    format!("{BSBM}{local}")
}

pub const REVIEW_QUERY: &str = "PREFIX bsbm: <http://example.org/bsbm/>
SELECT ?x ?y ?z WHERE { ?x a bsbm:Review . ?x bsbm:reviewFor ?y . ?y bsbm:date ?z }";

/// `(file stem, query text)` for every query of the equivalence suite.
pub fn suite() -> Vec<(String, String)> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(fixtures().join("suite")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "rq") {
            let stem = path.file_stem().unwrap().to_string_lossy().into_owned();
            out.push((stem, std::fs::read_to_string(&path).unwrap()));
        }
    }
    out.sort();
    out
}
