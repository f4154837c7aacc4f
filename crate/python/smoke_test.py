"""Smoke test for the sparql2cypher_py extension module."""

import json
from pathlib import Path

import sparql2cypher_py as s2c

FIXTURES = Path(__file__).resolve().parent.parent / "crates" / "core" / "tests" / "fixtures"
B = "http://www4.wiwiss.fu-berlin.de/bizer/bsbm/v01/vocabulary/"


def main():
    golden = s2c.Catalog.from_json((FIXTURES / "golden.catalog.json").read_text())
    prefixes = {"b": B}
    cypher = s2c.translate(
        "SELECT (COUNT(?p) AS ?total) WHERE { ?R a b:R . ?R b:rF ?p }",
        golden,
        prefixes=prefixes,
    )
    print(cypher)
    assert cypher == "MATCH (R:`b:R`)-[rF:`b:rF`]->(p) RETURN count(p) AS total", cypher

    reviews = s2c.Graph.from_ntriples((FIXTURES / "reviews.nt").read_text())
    cat = reviews.catalog()
    assert len(reviews) == 10
    assert cat.relationship_types == ["http://example.org/bsbm/reviewFor"]
    report = s2c.check_equivalence(
        "PREFIX bsbm: <http://example.org/bsbm/> "
        "SELECT ?x ?y ?z WHERE { ?x a bsbm:Review . ?x bsbm:reviewFor ?y . ?y bsbm:date ?z }",
        reviews,
    )
    print(report)
    assert report.equivalent and report.sparql_rows == 2

    g = s2c.Graph.synthetic(scale=1.0, seed=7)
    summary = json.loads(
        s2c.check_equivalence(
            "SELECT ?r ?n WHERE { ?r a b:R . ?r b:rating ?n } ORDER BY DESC(?n) LIMIT 5",
            g,
            prefixes=prefixes,
        ).summary_json()
    )
    print(summary)
    assert summary["equivalent"] and summary["sparql_rows"] == 5

    try:
        s2c.translate("SELECT ?x WHERE { ?x a b:R FILTER(?q > 1) }", golden, prefixes=prefixes)
    except s2c.TranslationError as e:
        print("rejected:", e)
    else:
        raise AssertionError("unbound filter variable accepted")
    print("ok")


if __name__ == "__main__":
    main()
