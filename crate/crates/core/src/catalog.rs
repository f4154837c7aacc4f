//! Relationship-type and property-key sets, and triple-pattern classification.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rdf::{RdfGraph, RDF_TYPE};
use crate::sparql::{PredicatePattern, TermPattern, TriplePattern};

/// The predicate partition driving pattern translation: `T` holds
/// predicates that become relationships, `P` those that become properties.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaCatalog {
    relationship_types: BTreeSet<String>,
    property_keys: BTreeSet<String>,
}

/// Which side a predicate with both literal and resource objects falls on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum MixedPolicy {
    #[default]
    Error,
    Edge,
    Property,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TripleClass {
    Type,
    VarEdge,
    IriEdge,
    Property,
}

impl SchemaCatalog {
    pub fn new<T, P>(relationship_types: T, property_keys: P) -> Result<Self>
    where
        T: IntoIterator,
        T::Item: Into<String>,
        P: IntoIterator,
        P::Item: Into<String>,
    {
        let cat = SchemaCatalog {
            relationship_types: relationship_types.into_iter().map(Into::into).collect(),
            property_keys: property_keys.into_iter().map(Into::into).collect(),
        };
        cat.validate()?;
        Ok(cat)
    }

    fn validate(&self) -> Result<()> {
        if let Some(both) = self
            .relationship_types
            .intersection(&self.property_keys)
            .next()
        {
            return Err(Error::InvalidCatalog(format!(
                "<{both}> is both a relationship type and a property key"
            )));
        }
        if self.relationship_types.contains(RDF_TYPE) || self.property_keys.contains(RDF_TYPE) {
            return Err(Error::InvalidCatalog("rdf:type cannot be listed".into()));
        }
        Ok(())
    }

    pub fn relationship_types(&self) -> impl Iterator<Item = &str> {
        self.relationship_types.iter().map(String::as_str)
    }

    pub fn property_keys(&self) -> impl Iterator<Item = &str> {
        self.property_keys.iter().map(String::as_str)
    }

    pub fn is_relationship_type(&self, iri: &str) -> bool {
        self.relationship_types.contains(iri)
    }

    pub fn is_property_key(&self, iri: &str) -> bool {
        self.property_keys.contains(iri)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cat: SchemaCatalog =
            serde_json::from_str(text).map_err(|e| Error::InvalidCatalog(e.to_string()))?;
        cat.validate()?;
        Ok(cat)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("catalog serializes")
    }
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<SchemaCatalog> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    SchemaCatalog::from_json(&text)
}

pub fn save_catalog(cat: &SchemaCatalog, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, cat.to_json() + "\n")
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Derive the catalog from object kinds: all-literal predicates are
/// property keys, all-resource predicates relationship types.
pub fn derive_catalog(graph: &RdfGraph) -> Result<SchemaCatalog> {
    derive_catalog_with(graph, MixedPolicy::Error)
}

pub fn derive_catalog_with(graph: &RdfGraph, policy: MixedPolicy) -> Result<SchemaCatalog> {
    // (seen literal object, seen resource object) per predicate
    let mut kinds: BTreeMap<&str, (bool, bool)> = BTreeMap::new();
    for triple in graph.iter() {
        let p = triple.predicate_iri();
        if p == RDF_TYPE {
            continue;
        }
        let entry = kinds.entry(p).or_default();
        if triple.object.is_resource() {
            entry.1 = true;
        } else {
            entry.0 = true;
        }
    }
    let mixed: Vec<String> = kinds
        .iter()
        .filter(|(_, (lit, res))| *lit && *res)
        .map(|(p, _)| p.to_string())
        .collect();
    if !mixed.is_empty() && policy == MixedPolicy::Error {
        return Err(Error::MixedPredicate(mixed));
    }
    let mut cat = SchemaCatalog::default();
    for (p, (lit, res)) in kinds {
        let as_edge = match (lit, res) {
            (true, true) => policy == MixedPolicy::Edge,
            (_, res) => res,
        };
        if as_edge {
            cat.relationship_types.insert(p.to_string());
        } else {
            cat.property_keys.insert(p.to_string());
        }
    }
    Ok(cat)
}

/// Classify a triple pattern by its predicate. Property paths are handled
/// by the translator and rejected here.
pub fn classify_triple(tp: &TriplePattern, cat: &SchemaCatalog) -> Result<TripleClass> {
    match &tp.predicate {
        PredicatePattern::Path(p) => Err(Error::Unsupported(format!(
            "property path {p} cannot be classified as a single triple"
        ))),
        PredicatePattern::Term(TermPattern::Variable(_)) => Ok(TripleClass::VarEdge),
        PredicatePattern::Term(TermPattern::Iri(iri)) => {
            if iri == RDF_TYPE {
                Ok(TripleClass::Type)
            } else if cat.is_relationship_type(iri) {
                Ok(TripleClass::IriEdge)
            } else if cat.is_property_key(iri) {
                Ok(TripleClass::Property)
            } else {
                Err(Error::UnknownPredicate(iri.clone()))
            }
        }
        PredicatePattern::Term(TermPattern::Literal(l)) => Err(Error::InvalidQuery(format!(
            "literal {l} in predicate position"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{parse_ntriples_with, Literal, PrefixMap};

    const NS: &str = "http://example.org/bsbm/";

    fn ex(local: &str) -> String {
        format!("{NS}{local}")
    }

    fn graph(text: &str) -> RdfGraph {
        let mut p = PrefixMap::with_defaults();
        p.insert("bsbm", NS);
        parse_ntriples_with(text, &p).unwrap()
    }

    #[test]
    fn derives_title_and_review_for() {
        let g = graph(
            "<bsbm:R1> <bsbm:title> \"review1\" .\n<bsbm:R1> <bsbm:reviewFor> <bsbm:Pr1> .\n\
             <bsbm:R1> <rdf:type> <bsbm:Review> .\n",
        );
        let cat = derive_catalog(&g).unwrap();
        assert_eq!(
            cat.relationship_types().collect::<Vec<_>>(),
            [ex("reviewFor")]
        );
        assert_eq!(cat.property_keys().collect::<Vec<_>>(), [ex("title")]);
        assert_eq!(
            derive_catalog(&RdfGraph::new()).unwrap(),
            SchemaCatalog::default()
        );
    }

    #[test]
    fn mixed_predicate_is_an_error_unless_forced() {
        let g = graph("<bsbm:a> <bsbm:p> <bsbm:b> .\n<bsbm:c> <bsbm:p> \"x\" .\n");
        assert_eq!(
            derive_catalog(&g).unwrap_err(),
            Error::MixedPredicate(vec![ex("p")])
        );
        let edge = derive_catalog_with(&g, MixedPolicy::Edge).unwrap();
        assert!(edge.is_relationship_type(&ex("p")));
        let prop = derive_catalog_with(&g, MixedPolicy::Property).unwrap();
        assert!(prop.is_property_key(&ex("p")));
    }

    #[test]
    fn overlapping_or_rdf_type_entries_are_rejected() {
        assert!(SchemaCatalog::new([ex("p")], [ex("p")]).is_err());
        assert!(SchemaCatalog::new([RDF_TYPE], Vec::<String>::new()).is_err());
        let json = format!(
            "{{\"relationship_types\":[\"{0}\"],\"property_keys\":[\"{0}\"]}}",
            ex("p")
        );
        assert!(matches!(
            SchemaCatalog::from_json(&json),
            Err(Error::InvalidCatalog(_))
        ));
        assert!(SchemaCatalog::from_json("{").is_err());
    }

    #[test]
    fn file_round_trip() {
        let cat = SchemaCatalog::new([ex("reviewFor")], [ex("title"), ex("date")]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cat.json");
        save_catalog(&cat, &path).unwrap();
        assert_eq!(load_catalog(&path).unwrap(), cat);
        assert!(matches!(
            load_catalog(dir.path().join("missing.json")),
            Err(Error::Io(_))
        ));
    }

    #[test]
    fn classification_branches() {
        let cat = SchemaCatalog::new([ex("reviewFor")], [ex("title")]).unwrap();
        let v = TermPattern::var;
        let i = |s: &str| TermPattern::iri(ex(s));
        let ty = TriplePattern::new(v("x"), TermPattern::iri(RDF_TYPE), i("Review"));
        assert_eq!(classify_triple(&ty, &cat).unwrap(), TripleClass::Type);
        let ve = TriplePattern::new(v("x"), v("y"), v("z"));
        assert_eq!(classify_triple(&ve, &cat).unwrap(), TripleClass::VarEdge);
        let ie = TriplePattern::new(v("x"), i("reviewFor"), v("y"));
        assert_eq!(classify_triple(&ie, &cat).unwrap(), TripleClass::IriEdge);
        let pr = TriplePattern::new(
            v("x"),
            i("title"),
            TermPattern::Literal(Literal::string("review1")),
        );
        assert_eq!(classify_triple(&pr, &cat).unwrap(), TripleClass::Property);
        let unknown = TriplePattern::new(v("x"), i("nope"), v("y"));
        assert_eq!(
            classify_triple(&unknown, &cat).unwrap_err(),
            Error::UnknownPredicate(ex("nope"))
        );
    }
}
