//! SPARQL SELECT subset: AST and parser.

mod ast;
mod parser;

pub use ast::*;
pub use parser::{parse_sparql, parse_sparql_with};
