//! SPARQL to Cypher query translation with executable oracles for checking
//! that translated queries return the same answers as the originals.

pub mod catalog;
pub mod cli;
pub mod cypher;
pub mod error;
pub mod oracle;
pub mod pg;
pub mod rdf;
pub mod sparql;
pub mod synthetic;
pub mod translate;
pub mod value;

pub use error::{Error, Result};
