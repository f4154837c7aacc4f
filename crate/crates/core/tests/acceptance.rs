//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use common::{bsbm, fixtures, prefixes, reviews, suite, REVIEW_QUERY};
use sparql2cypher::catalog::{derive_catalog, load_catalog, SchemaCatalog};
use sparql2cypher::cypher::{render, Direction, Name, Range};
use sparql2cypher::oracle::relation::{distinct, join, left_join, outer_union, select, slice, Row};
use sparql2cypher::oracle::{
    check_equivalence, eval_mapping, exec, xi, zeta, Attribute, GraphRelation, Mapping,
};
use sparql2cypher::pg::rdf_to_pg;
use sparql2cypher::rdf::{parse_ntriples, Literal, RdfGraph, RdfTerm, RdfTriple, RDF_TYPE};
use sparql2cypher::sparql::{
    parse_sparql, parse_sparql_with, PathExpr, TermPattern, TriplePattern,
};
use sparql2cypher::synthetic::{generate, SyntheticConfig};
use sparql2cypher::translate::{map_property_path, pmm, translate, Binding};
use sparql2cypher::value::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    ensure(elapsed < budget, || {
        format!("took {elapsed:?}, budget {budget:?}")
    })
}

fn reviews_catalog() -> SchemaCatalog {
    derive_catalog(&reviews()).unwrap()
}

fn triple_patterns() -> Outcome {
    let start = Instant::now();
    let cat = reviews_catalog();
    let v = TermPattern::var;
    let i = |l: &str| TermPattern::iri(bsbm(l));
    let one = |tp: TriplePattern| {
        let set = pmm(&[tp], &cat).map_err(|e| e.to_string())?;
        ensure(set.patterns.len() == 1, || "expected one pattern".into())?;
        Ok::<_, String>((set.patterns[0].clone(), set.bindings))
    };

    let (p, _) = one(TriplePattern::new(
        v("x"),
        TermPattern::iri(RDF_TYPE),
        i("Review"),
    ))?;
    ensure(
        p.start.labels == [bsbm("Review")] && p.steps.is_empty(),
        || "node pattern".into(),
    )?;

    let lit = TermPattern::Literal(Literal::string("review1"));
    let (p, _) = one(TriplePattern::new(v("x"), i("title"), lit))?;
    ensure(
        p.start.properties.get(&bsbm("title"))
            == Some(&RdfTerm::Literal(Literal::string("review1"))),
        || "property node".into(),
    )?;

    let (p, _) = one(TriplePattern::new(v("x"), i("reviewFor"), v("y")))?;
    let rel = &p.steps[0].0;
    ensure(
        rel.direction == Direction::Out
            && rel.rel_type == Some(bsbm("reviewFor"))
            && matches!(rel.name, Some(Name::Generated(_)))
            && p.end().name_str() == Some("y"),
        || "relationship triple".into(),
    )?;

    let (_, b) = one(TriplePattern::new(
        v("x"),
        TermPattern::iri(RDF_TYPE),
        v("t"),
    ))?;
    ensure(matches!(b["t"], Binding::Label(_)), || "labels(x)".into())?;

    let (p, b) = one(TriplePattern::new(v("x"), v("y"), v("z")))?;
    ensure(
        b["y"] == Binding::Rel("y".into()) && p.steps[0].0.rel_type.is_none(),
        || "type(y)".into(),
    )?;

    let (_, b) = one(TriplePattern::new(v("x"), i("title"), v("y")))?;
    ensure(
        b["y"] == Binding::Property("x".into(), bsbm("title")),
        || "x.title".into(),
    )?;

    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("6 rows, {:?}", start.elapsed()))
}

fn property_paths() -> Outcome {
    let start = Instant::now();
    let cat = reviews_catalog();
    let rf = bsbm("reviewFor");
    let path = |e: PathExpr| {
        map_property_path(
            &TriplePattern::with_path(TermPattern::var("x"), e, TermPattern::var("y")),
            &cat,
        )
        .map_err(|e| e.to_string())
    };
    let rows = [
        (PathExpr::Predicate(rf.clone()), Direction::Out, None),
        (PathExpr::Inverse(rf.clone()), Direction::In, None),
        (
            PathExpr::ZeroOrMore(rf.clone()),
            Direction::Out,
            Some(Range { min: 0, max: None }),
        ),
        (
            PathExpr::OneOrMore(rf.clone()),
            Direction::Out,
            Some(Range { min: 1, max: None }),
        ),
        (
            PathExpr::ZeroOrOne(rf.clone()),
            Direction::Out,
            Some(Range {
                min: 0,
                max: Some(1),
            }),
        ),
    ];
    for (expr, dir, range) in rows {
        let p = path(expr.clone())?;
        let rel = &p.steps[0].0;
        ensure(
            p.steps.len() == 1 && rel.direction == dir && rel.range == range,
            || format!("{expr}: got {:?} {:?}", rel.direction, rel.range),
        )?;
    }
    let p = path(PathExpr::sequence(
        PathExpr::Predicate(rf.clone()),
        PathExpr::Inverse(rf),
    ))?;
    ensure(
        p.steps.len() == 2
            && p.steps[0].1.name.is_none()
            && p.steps[0].0.direction == Direction::Out
            && p.steps[1].0.direction == Direction::In,
        || "sequence".into(),
    )?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("6 rows, {:?}", start.elapsed()))
}

fn golden() -> Outcome {
    let dir = fixtures();
    let prefixes = prefixes();
    let cat = load_catalog(dir.join("golden.catalog.json")).map_err(|e| e.to_string())?;
    let norm = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ");
    let mut n = 0;
    for stem in ["count1", "nodefilter2", "relationship1-2", "reltype3"] {
        let rq = dir.join("golden").join(format!("{stem}.rq"));
        let text = std::fs::read_to_string(&rq).map_err(|e| e.to_string())?;
        let expected =
            std::fs::read_to_string(rq.with_extension("cypher")).map_err(|e| e.to_string())?;
        let q = parse_sparql_with(&text, &prefixes).map_err(|e| e.to_string())?;
        let t = translate(&q, &cat).map_err(|e| e.to_string())?;
        let got = render(&t.query, &prefixes).map_err(|e| e.to_string())?;
        ensure(norm(&got) == norm(&expected), || format!("{stem}: {got}"))?;
        n += 1;
    }
    Ok(format!("{n}/4 pairs"))
}

fn worked_example() -> Outcome {
    let g = reviews();
    let cat = derive_catalog(&g).unwrap();
    let pg = rdf_to_pg(&g, &cat).unwrap();
    let q = parse_sparql(REVIEW_QUERY).unwrap();
    let t = translate(&q, &cat).unwrap();
    let r_prime = exec(&t.query, &pg).map_err(|e| e.to_string())?;
    ensure(r_prime.len() == 2, || {
        format!("R' has {} rows", r_prime.len())
    })?;
    let mut labelled = r_prime;
    for (attr, var) in labelled.schema.iter_mut().zip(&t.columns) {
        attr.var = Some(var.clone());
    }
    let r = xi(&labelled, &pg).map_err(|e| e.to_string())?;
    let iri = |s: &str| Value::Term(RdfTerm::Iri(bsbm(s)));
    let date = Value::Term(RdfTerm::Literal(Literal::string("20011024")));
    let expected_r = vec![
        vec![iri("R1"), iri("Pr1"), date.clone()],
        vec![iri("R2"), iri("Pr1"), date],
    ];
    ensure(r.sorted_rows() == expected_r, || format!("R differs:\n{r}"))?;
    let mut omega = zeta(&r);
    omega.sort();
    let mut direct = eval_mapping(&q, &g);
    direct.sort();
    ensure(omega == direct && omega.len() == 2, || {
        format!("omega {omega:?}")
    })?;
    Ok("R', R and omega exact".into())
}

fn semantic_suite() -> Outcome {
    let start = Instant::now();
    let g = parse_ntriples(&std::fs::read_to_string(fixtures().join("synthetic.nt")).unwrap())
        .map_err(|e| e.to_string())?;
    let cat = derive_catalog(&g).map_err(|e| e.to_string())?;
    let prefixes = prefixes();
    let queries = suite();
    ensure(queries.len() >= 40, || {
        format!("only {} queries", queries.len())
    })?;
    let mut failed = Vec::new();
    for (stem, text) in &queries {
        let ok = parse_sparql_with(text, &prefixes)
            .and_then(|q| check_equivalence(&q, &g, &cat))
            .map(|r| r.is_equivalent())
            .unwrap_or(false);
        if !ok {
            failed.push(stem.clone());
        }
    }
    ensure(failed.is_empty(), || {
        format!("not equivalent: {}", failed.join(", "))
    })?;
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "{}/{} equivalent, {:?}",
        queries.len(),
        queries.len(),
        start.elapsed()
    ))
}

/// Every assignment of graph terms (and query constants) to the
/// variables, kept when all instantiated triples are in the graph.
fn enumerate(bgp: &[TriplePattern], vars: &[String], g: &RdfGraph) -> Vec<Mapping> {
    let mut domain: Vec<RdfTerm> = g
        .iter()
        .flat_map(|t| [t.subject.clone(), t.predicate.clone(), t.object.clone()])
        .collect();
    domain.sort();
    domain.dedup();
    let mut out = Vec::new();
    let mut assignment = vec![0usize; vars.len()];
    if domain.is_empty() && !vars.is_empty() {
        return out;
    }
    loop {
        let m: Mapping = vars
            .iter()
            .cloned()
            .zip(assignment.iter().map(|&i| domain[i].clone()))
            .collect();
        let term = |tp: &TermPattern| match tp {
            TermPattern::Variable(v) => Some(m[v].clone()),
            other => other.to_term(),
        };
        let all = bgp.iter().all(|tp| {
            let sparql2cypher::sparql::PredicatePattern::Term(p) = &tp.predicate else {
                unreachable!()
            };
            match (term(&tp.subject), term(p), term(&tp.object)) {
                (Some(s), Some(p), Some(o)) => {
                    RdfTriple::new(s, p, o).is_ok_and(|t| g.contains(&t))
                }
                _ => false,
            }
        });
        if all {
            out.push(m);
        }
        // next assignment, odometer style
        let mut k = 0;
        loop {
            if k == vars.len() {
                return out;
            }
            assignment[k] += 1;
            if assignment[k] < domain.len() {
                break;
            }
            assignment[k] = 0;
            k += 1;
        }
    }
}

fn small_term() -> impl Strategy<Value = RdfTerm> {
    prop_oneof![
        3 => (0..4u8).prop_map(|i| RdfTerm::Iri(format!("http://e/n{i}"))),
        1 => (0..2i64).prop_map(|i| RdfTerm::Literal(Literal::integer(i))),
    ]
}

fn small_graph() -> impl Strategy<Value = RdfGraph> {
    prop::collection::vec(
        (0..4u8, 0..2u8, small_term()).prop_map(|(s, p, o)| {
            RdfTriple::new(
                RdfTerm::Iri(format!("http://e/n{s}")),
                RdfTerm::Iri(format!("http://e/p{p}")),
                o,
            )
            .unwrap()
        }),
        0..=20,
    )
    .prop_map(|ts| ts.into_iter().collect())
}

fn pattern_term(allow_literal: bool) -> impl Strategy<Value = TermPattern> {
    let lit = if allow_literal { 1 } else { 0 };
    prop_oneof![
        4 => (0..3u8).prop_map(|i| TermPattern::var(format!("v{i}"))),
        2 => (0..4u8).prop_map(|i| TermPattern::iri(format!("http://e/n{i}"))),
        lit => (0..2i64).prop_map(|i| TermPattern::Literal(Literal::integer(i))),
    ]
}

fn small_bgp() -> impl Strategy<Value = Vec<TriplePattern>> {
    let predicate = prop_oneof![
        3 => (0..2u8).prop_map(|i| TermPattern::iri(format!("http://e/p{i}"))),
        1 => (0..3u8).prop_map(|i| TermPattern::var(format!("v{i}"))),
    ];
    prop::collection::vec(
        (pattern_term(false), predicate, pattern_term(true))
            .prop_map(|(s, p, o)| TriplePattern::new(s, p, o)),
        1..=3,
    )
}

fn brute_force() -> Outcome {
    let cases = 256;
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&(small_graph(), small_bgp()), |(g, bgp)| {
            let mut vars: Vec<String> = bgp
                .iter()
                .flat_map(|tp| tp.variables())
                .map(str::to_string)
                .collect();
            vars.sort();
            vars.dedup();
            let body: Vec<String> = bgp.iter().map(|tp| tp.to_string()).collect();
            let select = if vars.is_empty() {
                "*".to_string()
            } else {
                vars.iter()
                    .map(|v| format!("?{v}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let text = format!("SELECT {select} WHERE {{ {} }}", body.join(" . "));
            let q = parse_sparql(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
            let mut got = eval_mapping(&q, &g);
            got.sort();
            let mut want = enumerate(&bgp, &vars, &g);
            want.sort();
            prop_assert_eq!(got, want, "{}", text);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("{cases} random BGPs"))
}

fn cell() -> impl Strategy<Value = Value> {
    prop_oneof![
        4 => (0..3i64).prop_map(|i| Value::Term(RdfTerm::Literal(Literal::integer(i)))),
        1 => Just(Value::Null),
    ]
}

fn relation(cols: &'static [&'static str]) -> impl Strategy<Value = GraphRelation> {
    prop::collection::vec(prop::collection::vec(cell(), cols.len()), 0..8).prop_map(move |rows| {
        GraphRelation::with_rows(cols.iter().map(|c| Attribute::var(*c)).collect(), rows)
    })
}

fn count(rows: &[Row]) -> BTreeMap<Row, usize> {
    let mut m = BTreeMap::new();
    for r in rows {
        *m.entry(r.clone()).or_default() += 1;
    }
    m
}

fn is_sub_bag(small: &[Row], big: &[Row]) -> bool {
    let big = count(big);
    count(small)
        .iter()
        .all(|(r, n)| big.get(r).is_some_and(|m| m >= n))
}

fn algebra_laws() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 256,
        failure_persistence: None,
        ..Config::default()
    });
    let ab: &'static [&'static str] = &["a", "b"];
    let cd: &'static [&'static str] = &["c", "d"];
    let bc: &'static [&'static str] = &["b", "c"];

    runner
        .run(&(relation(ab), relation(cd)), |(r1, r2)| {
            prop_assert_eq!(join(&r1, &r2).len(), r1.len() * r2.len());
            prop_assert_eq!(outer_union(&r1, &r2).len(), r1.len() + r2.len());
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    runner
        .run(&(relation(ab), relation(bc)), |(l, r)| {
            let lj = left_join(&l, &r, |_, _| true);
            prop_assert!(lj.len() >= l.len());
            let left_part: Vec<Row> = lj.rows.iter().map(|row| row[..2].to_vec()).collect();
            prop_assert!(is_sub_bag(&l.rows, &left_part));
            // a rejecting condition keeps exactly the left rows
            let none = left_join(&l, &r, |_, _| false);
            prop_assert_eq!(none.len(), l.len());
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    runner
        .run(&(relation(ab), 0..3i64), |(r, k)| {
            let key = Value::Term(RdfTerm::Literal(Literal::integer(k)));
            let s = select(&r, |row| row[0] == key);
            prop_assert!(is_sub_bag(&s.rows, &r.rows));
            prop_assert!(s.rows.iter().all(|row| row[0] == key));

            let d = distinct(&r);
            let unique = count(&r.rows);
            prop_assert_eq!(d.len(), unique.len());
            prop_assert!(count(&d.rows).values().all(|&n| n == 1));
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    runner
        .run(&(relation(ab), 0..10u64, 0..10u64), |(r, skip, limit)| {
            let s = slice(&r, Some(skip), Some(limit));
            let expected = r.len().saturating_sub(skip as usize).min(limit as usize);
            prop_assert_eq!(s.len(), expected);
            prop_assert_eq!(
                &s.rows[..],
                &r.rows[(skip as usize).min(r.len())..][..expected]
            );
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("join, union, left join, filter, distinct, slice".into())
}

fn latency() -> Outcome {
    let prefixes = prefixes();
    let cat = derive_catalog(&generate(&SyntheticConfig::default())).unwrap();
    let mut times = Vec::new();
    for (stem, text) in suite() {
        let q = parse_sparql_with(&text, &prefixes).map_err(|e| format!("{stem}: {e}"))?;
        let start = Instant::now();
        translate(&q, &cat).map_err(|e| format!("{stem}: {e}"))?;
        times.push(start.elapsed());
    }
    times.sort();
    let median = times[times.len() / 2];
    within(median, Duration::from_millis(50))?;
    Ok(format!(
        "median {median:?}, max {:?}",
        times.last().unwrap()
    ))
}

fn partition(g: &RdfGraph) -> Result<(usize, usize, usize), String> {
    let cat = derive_catalog(g).map_err(|e| e.to_string())?;
    let pg = rdf_to_pg(g, &cat).map_err(|e| e.to_string())?;
    let pred = |t: &RdfTriple| match &t.predicate {
        RdfTerm::Iri(p) => p.clone(),
        other => other.to_string(),
    };
    let types = g.iter().filter(|t| pred(t) == RDF_TYPE).count();
    let rels = g
        .iter()
        .filter(|t| pred(t) != RDF_TYPE && cat.is_relationship_type(&pred(t)))
        .count();
    let props = g.iter().filter(|t| cat.is_property_key(&pred(t))).count();
    let got = (
        pg.label_assignment_count(),
        pg.relationship_count(),
        pg.property_value_count(),
    );
    ensure(got == (types, rels, props), || {
        format!(
            "labels/rels/props {got:?}, triples {:?}",
            (types, rels, props)
        )
    })?;
    ensure(types + rels + props == g.len(), || {
        "partition does not cover the graph".into()
    })?;
    Ok(got)
}

fn partition_counts() -> Outcome {
    let small = partition(&reviews())?;
    let big_graph = generate(&SyntheticConfig::default().scaled(3.0));
    ensure(big_graph.len() >= 1000, || {
        format!("synthetic graph has {} triples", big_graph.len())
    })?;
    let big = partition(&big_graph)?;
    Ok(format!(
        "reviews {small:?}, synthetic {} triples {big:?}",
        big_graph.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("triple-pattern table", triple_patterns),
        ("property-path table", property_paths),
        ("golden translations", golden),
        ("worked example chain", worked_example),
        ("semantic preservation suite", semantic_suite),
        ("brute-force BGP oracle", brute_force),
        ("relational algebra laws", algebra_laws),
        ("translation latency", latency),
        ("property graph partition counts", partition_counts),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(reason) => {
                failures += 1;
                println!("FAIL {name}: {reason}");
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
