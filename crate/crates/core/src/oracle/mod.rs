//! Reference evaluators used to check translations: a Cypher executor over
//! property graphs, SPARQL evaluation over RDF graphs, a relational
//! evaluator, and the functions relating their results.

pub mod algebra;
pub mod equivalence;
pub mod exec;
pub mod interp;
pub mod mapping;
pub mod relation;

pub use algebra::{eval_algebra, eval_algebra_query, gen_pr};
pub use equivalence::{
    check_equivalence, check_equivalence_with, check_translation, CheckOptions, EquivalenceReport,
};
pub use exec::{exec, exec_with, ExecOptions};
pub use interp::{xi, zeta};
pub use mapping::{eval_mapping, eval_pattern, Mapping};
pub use relation::{Attribute, GraphRelation};
