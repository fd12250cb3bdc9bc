//! Lints over typechecked expressions.

use crate::diag::Diagnostic;
use crate::lang::ast::*;

fn mentions_variable(e: &Expr) -> bool {
    let mut found = false;
    e.walk(&mut |s| {
        if matches!(s.kind, ExprKind::Id(_)) {
            found = true;
        }
    });
    found
}

/// Warns on products whose operands both mention variables and on
/// divisions by a non-constant.
pub fn lint_linearity(e: &Expr) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    e.walk(&mut |s| match &s.kind {
        ExprKind::Binary(BinOp::Mul, a, b) if mentions_variable(a) && mentions_variable(b) => {
            out.push(Diagnostic::warning(
                s.span,
                format!("expression '{s}' is not linear: both factors depend on variables"),
            ));
        }
        ExprKind::Binary(BinOp::Div, _, b) if mentions_variable(b) => {
            out.push(Diagnostic::warning(
                s.span,
                format!("expression '{s}' is not linear: the divisor depends on variables"),
            ));
        }
        _ => {}
    });
    out
}

/// Reports every `pre` that may be evaluated on the first step. The left
/// operand of an arrow only runs on the first step; its right operand only
/// from the second step on, and each `pre` moves one step back.
pub fn check_pre_guards(e: &Expr) -> Vec<Diagnostic> {
    fn go(e: &Expr, min_step: u32, out: &mut Vec<Diagnostic>) {
        match &e.kind {
            ExprKind::Arrow(a, b) => {
                go(a, min_step, out);
                go(b, min_step.max(1), out);
            }
            ExprKind::Pre(a) => {
                if min_step == 0 {
                    out.push(Diagnostic::error(
                        e.span,
                        format!("'{e}' is undefined on the first step; guard it with an arrow, e.g. 'init -> {e}'"),
                    ));
                    go(a, 0, out);
                } else {
                    go(a, min_step - 1, out);
                }
            }
            _ => e.for_each_child(|c| go(c, min_step, out)),
        }
    }
    let mut out = Vec::new();
    go(e, 0, &mut out);
    out
}
