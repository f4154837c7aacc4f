//! Cypher query AST and text rendering.

mod ast;
mod render;

pub use ast::*;
pub use render::{
    column_name, escape_identifier, render, render_expr, render_literal, render_with, RenderStyle,
};
