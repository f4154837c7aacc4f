//! Seeded generator for small e-commerce style datasets: products typed by
//! a product-type hierarchy, producers, offers, vendors, reviews, persons
//! and countries.
//!
//! Every node of a class carries all of that class's properties exactly
//! once, and the `sub` hierarchy between product types is a tree.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::rdf::{Literal, RdfGraph, RdfTerm, RdfTriple, RDFS_NS, RDF_TYPE, XSD_DECIMAL};

pub const VOCAB: &str = "http://www4.wiwiss.fu-berlin.de/bizer/bsbm/v01/vocabulary/";
pub const INST: &str = "http://www4.wiwiss.fu-berlin.de/bizer/bsbm/v01/instances/";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticConfig {
    pub seed: u64,
    pub countries: usize,
    pub product_types: usize,
    pub producers: usize,
    pub vendors: usize,
    pub products: usize,
    pub offers: usize,
    pub persons: usize,
    pub reviews: usize,
}

impl Default for SyntheticConfig {
    /// About one hundred nodes.
    fn default() -> Self {
        SyntheticConfig {
            seed: 7,
            countries: 4,
            product_types: 6,
            producers: 6,
            vendors: 4,
            products: 30,
            offers: 25,
            persons: 8,
            reviews: 20,
        }
    }
}

impl SyntheticConfig {
    /// Multiply every entity count by `factor` (at least one of each).
    pub fn scaled(&self, factor: f64) -> Self {
        let s = |n: usize| ((n as f64 * factor).round() as usize).max(1);
        SyntheticConfig {
            seed: self.seed,
            countries: s(self.countries),
            product_types: s(self.product_types),
            producers: s(self.producers),
            vendors: s(self.vendors),
            products: s(self.products),
            offers: s(self.offers),
            persons: s(self.persons),
            reviews: s(self.reviews),
        }
    }

    pub fn node_count(&self) -> usize {
        self.countries
            + self.product_types
            + self.producers
            + self.vendors
            + self.products
            + self.offers
            + self.persons
            + self.reviews
    }
}

pub fn vocab(local: &str) -> String {
    format!("{VOCAB}{local}")
}

pub fn inst(local: &str) -> String {
    format!("{INST}{local}")
}

struct Builder {
    graph: RdfGraph,
    rng: StdRng,
}

impl Builder {
    fn add(&mut self, s: &str, p: &str, o: RdfTerm) {
        let t = RdfTriple::new(RdfTerm::Iri(s.to_string()), RdfTerm::Iri(p.to_string()), o)
            .expect("IRI subject and predicate");
        self.graph.insert(t);
    }

    fn typed(&mut self, s: &str, class: &str) {
        self.add(s, RDF_TYPE, RdfTerm::Iri(class.to_string()));
    }

    fn link(&mut self, s: &str, p: &str, o: &str) {
        self.add(s, &vocab(p), RdfTerm::Iri(o.to_string()));
    }

    fn prop(&mut self, s: &str, p: &str, lit: Literal) {
        self.add(s, p, RdfTerm::Literal(lit));
    }

    fn pick<'a>(&mut self, items: &'a [String]) -> &'a str {
        &items[self.rng.random_range(0..items.len())]
    }
}

/// Build the dataset for `cfg`. The same config always gives the same
/// triples in the same order.
pub fn generate(cfg: &SyntheticConfig) -> RdfGraph {
    let mut b = Builder {
        graph: RdfGraph::new(),
        rng: StdRng::seed_from_u64(cfg.seed),
    };
    let label = format!("{RDFS_NS}label");
    let names = |prefix: &str, n: usize| -> Vec<String> {
        (1..=n).map(|i| inst(&format!("{prefix}{i}"))).collect()
    };

    let countries = names("C", cfg.countries);
    for (i, c) in countries.iter().enumerate() {
        b.typed(c, &vocab("C"));
        b.prop(c, &label, Literal::string(format!("country{}", i + 1)));
    }

    let types = names("PT", cfg.product_types);
    for (i, t) in types.iter().enumerate() {
        b.typed(t, &vocab("PT"));
        b.prop(t, &label, Literal::string(format!("type{}", i + 1)));
        if i > 0 {
            // parent of PT(k) is PT(k/2): a binary tree rooted at PT1
            let parent = types[i.div_ceil(2) - 1].clone();
            b.link(t, "sub", &parent);
        }
    }

    let producers = names("Pr", cfg.producers);
    for (i, p) in producers.iter().enumerate() {
        b.typed(p, &vocab("pr"));
        b.prop(p, &label, Literal::string(format!("producer{}", i + 1)));
        let c = b.pick(&countries).to_string();
        b.link(p, "c", &c);
    }

    let vendors = names("V", cfg.vendors);
    for (i, v) in vendors.iter().enumerate() {
        b.typed(v, &vocab("V"));
        b.prop(v, &label, Literal::string(format!("vendor{}", i + 1)));
        let c = b.pick(&countries).to_string();
        b.link(v, "c", &c);
    }

    let products = names("P", cfg.products);
    for (i, p) in products.iter().enumerate() {
        b.typed(p, &vocab("P"));
        let t = b.pick(&types).to_string();
        b.typed(p, &t);
        b.prop(p, &label, Literal::string(format!("product{}", i + 1)));
        let n1 = b.rng.random_range(1..=500);
        let n2 = b.rng.random_range(1..=20);
        b.prop(p, &vocab("pPN1"), Literal::integer(n1));
        b.prop(p, &vocab("pPN2"), Literal::integer(n2));
        let pr = b.pick(&producers).to_string();
        b.link(p, "pr", &pr);
    }

    let offers = names("O", cfg.offers);
    for o in &offers {
        b.typed(o, &vocab("O"));
        let cents = b.rng.random_range(100..=20000);
        let price = format!("{}.{:02}", cents / 100, cents % 100);
        b.prop(o, &vocab("price"), Literal::typed(price, XSD_DECIMAL));
        let p = b.pick(&products).to_string();
        b.link(o, "p", &p);
        let v = b.pick(&vendors).to_string();
        b.link(o, "v", &v);
    }

    let persons = names("Pe", cfg.persons);
    for (i, p) in persons.iter().enumerate() {
        b.typed(p, &vocab("Pe"));
        b.prop(
            p,
            &vocab("name"),
            Literal::string(format!("person{}", i + 1)),
        );
        let c = b.pick(&countries).to_string();
        b.link(p, "c", &c);
    }

    let reviews = names("R", cfg.reviews);
    for (i, r) in reviews.iter().enumerate() {
        b.typed(r, &vocab("R"));
        b.prop(
            r,
            &vocab("title"),
            Literal::string(format!("review{}", i + 1)),
        );
        let rating = b.rng.random_range(1..=10);
        b.prop(r, &vocab("rating"), Literal::integer(rating));
        let p = b.pick(&products).to_string();
        b.link(r, "rF", &p);
        let pe = b.pick(&persons).to_string();
        b.link(r, "rv", &pe);
    }
    b.graph
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_size_and_determinism() {
        let cfg = SyntheticConfig::default();
        assert!((95..=110).contains(&cfg.node_count()));
        let g = generate(&cfg);
        assert_eq!(g.to_ntriples(), generate(&cfg).to_ntriples());
        let subjects: std::collections::HashSet<_> = g.iter().map(|t| &t.subject).collect();
        assert_eq!(subjects.len(), cfg.node_count());
    }

    #[test]
    fn scaling_reaches_a_thousand_triples() {
        let g = generate(&SyntheticConfig::default().scaled(3.0));
        assert!((900..=1400).contains(&g.len()), "{}", g.len());
    }
}
