use indexmap::IndexMap;

use super::pmm::Binding;
use crate::cypher::Expr as CExpr;
use crate::error::{Error, Result};
use crate::sparql::Expr;

/// Translate a FILTER condition. Variables are replaced by the Cypher
/// expression they are bound to; a node compared with anything other than
/// another node is compared through its `uri`.
pub fn map_expression(expr: &Expr, env: &IndexMap<String, Binding>) -> Result<CExpr> {
    match expr {
        Expr::Compare(op, a, b) => {
            let (ea, na) = operand(a, env)?;
            let (eb, nb) = operand(b, env)?;
            let (ea, eb) = match (na, nb) {
                (Some(_), Some(_)) | (None, None) => (ea, eb),
                (Some(n), None) => (n.term_expr(), eb),
                (None, Some(n)) => (ea, n.term_expr()),
            };
            Ok(CExpr::compare(*op, ea, eb))
        }
        Expr::And(a, b) => Ok(CExpr::and(map_expression(a, env)?, map_expression(b, env)?)),
        Expr::Or(a, b) => Ok(CExpr::or(map_expression(a, env)?, map_expression(b, env)?)),
        Expr::Not(inner) => Ok(CExpr::not(map_expression(inner, env)?)),
        Expr::Var(_) | Expr::Const(_) => Err(Error::Unsupported(format!(
            "{expr} used as a boolean condition"
        ))),
    }
}

/// Operand expression plus the node binding it came from, if any.
fn operand<'e>(
    expr: &Expr,
    env: &'e IndexMap<String, Binding>,
) -> Result<(CExpr, Option<&'e Binding>)> {
    match expr {
        Expr::Var(v) => {
            let binding = env
                .get(v)
                .ok_or_else(|| Error::UnboundFilterVariable(v.clone()))?;
            let node = matches!(binding, Binding::Node(_)).then_some(binding);
            Ok((binding.value_expr(), node))
        }
        Expr::Const(term) => Ok((CExpr::Literal(term.clone()), None)),
        Expr::Compare(..) | Expr::And(..) | Expr::Or(..) | Expr::Not(..) => Err(
            Error::Unsupported(format!("boolean value {expr} used as a comparison operand")),
        ),
    }
}
