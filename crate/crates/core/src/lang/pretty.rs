//! Pretty-printer producing source text that parses back to the same tree.
//!
//! Parentheses are emitted only where precedence or associativity require
//! them. `if then else` always gets parentheses when nested inside another
//! operator, because its `else` branch would otherwise swallow the rest.

use num_traits::Signed;

use crate::lang::ast::*;
use crate::value::{decimal_string, format_rational};

const ARROW: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const NOT: u8 = 5;
const REL: u8 = 6;
const ADD: u8 = 7;
const MUL: u8 = 8;
const NEG: u8 = 9;
const POSTFIX: u8 = 10;
const ATOM: u8 = 11;

fn binop_level(op: BinOp) -> u8 {
    match op {
        BinOp::Implies => IMPLIES,
        BinOp::Or => OR,
        BinOp::And => AND,
        BinOp::Add | BinOp::Sub => ADD,
        BinOp::Mul | BinOp::Div => MUL,
        _ => REL,
    }
}

fn real_literal(r: &num_rational::BigRational) -> (String, u8) {
    match decimal_string(r) {
        Some(s) if r.is_negative() => (s, NEG),
        Some(s) => (s, ATOM),
        None => {
            let text = format_rational(r);
            let (p, q) = text.split_once('/').expect("non-decimal rational has a denominator");
            (format!("{p}.0 / {q}.0"), MUL)
        }
    }
}

/// Text of `e` together with the precedence level of its outermost operator.
fn render(e: &Expr) -> (String, u8) {
    match &e.kind {
        ExprKind::Bool(b) => (b.to_string(), ATOM),
        ExprKind::Int(i) => (i.to_string(), if i.is_negative() { NEG } else { ATOM }),
        ExprKind::Real(r) => real_literal(r),
        ExprKind::Id(p) => (p.joined(), ATOM),
        ExprKind::Unary(UnOp::Not, a) => (format!("not {}", at(a, NOT)), NOT),
        ExprKind::Unary(UnOp::Neg, a) => {
            let inner = at(a, NEG);
            if inner.starts_with('-') {
                (format!("-({inner})"), NEG)
            } else {
                (format!("-{inner}"), NEG)
            }
        }
        ExprKind::Binary(op, a, b) => {
            let level = binop_level(*op);
            let (l, r) = match op {
                BinOp::Implies => (at(a, level + 1), at(b, level)),
                _ if op.is_relation() => (at(a, level + 1), at(b, level + 1)),
                _ => (at(a, level), at(b, level + 1)),
            };
            (format!("{l} {} {r}", op.symbol()), level)
        }
        ExprKind::Arrow(a, b) => (format!("{} -> {}", at(a, ARROW + 1), at(b, ARROW)), ARROW),
        ExprKind::Ite(c, a, b) => (
            format!("if {} then {} else {}", at(c, 0), at(a, 0), at(b, 0)),
            0,
        ),
        ExprKind::Pre(a) => (format!("pre({})", at(a, 0)), ATOM),
        ExprKind::Floor(a) => (format!("floor({})", at(a, 0)), ATOM),
        ExprKind::ToReal(a) => (format!("real({})", at(a, 0)), ATOM),
        ExprKind::RecordUpdate { base, field, value } => (
            format!("{} {{ {field} := {} }}", at(base, POSTFIX), at(value, 0)),
            POSTFIX,
        ),
        ExprKind::Call { node, args } => {
            let args: Vec<String> = args.iter().map(|a| at(a, 0)).collect();
            (format!("{node}({})", args.join(", ")), ATOM)
        }
    }
}

fn at(e: &Expr, min_level: u8) -> String {
    let (text, level) = render(e);
    if level < min_level {
        format!("({text})")
    } else {
        text
    }
}

pub fn expr_to_string(e: &Expr) -> String {
    at(e, 0)
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&expr_to_string(self))
    }
}

fn params(ps: &[Param]) -> String {
    ps.iter()
        .map(|p| format!("{} : {}", p.name, p.ty))
        .collect::<Vec<_>>()
        .join(", ")
}

fn label(s: &str) -> String {
    format!("\"{s}\"")
}

pub fn node_to_string(n: &NodeDef, indent: &str) -> String {
    let mut out = format!(
        "{indent}node {}({}) returns ({});\n",
        n.name,
        params(&n.inputs),
        params(&n.outputs)
    );
    if !n.locals.is_empty() {
        out.push_str(&format!("{indent}var\n"));
        for p in &n.locals {
            out.push_str(&format!("{indent}  {} : {};\n", p.name, p.ty));
        }
    }
    out.push_str(&format!("{indent}let\n"));
    for eq in &n.equations {
        out.push_str(&format!(
            "{indent}  {} = {};\n",
            eq.lhs.join(", "),
            expr_to_string(&eq.rhs)
        ));
    }
    out.push_str(&format!("{indent}tel\n"));
    out
}

pub fn statement_to_string(s: &Statement, indent: &str) -> String {
    match s {
        Statement::Assume { label: l, expr, .. } => {
            format!("{indent}assume {} : {};\n", label(l), expr)
        }
        Statement::Guarantee { label: l, expr, .. } => {
            format!("{indent}guarantee {} : {};\n", label(l), expr)
        }
        Statement::Assert { expr, .. } => format!("{indent}assert {expr};\n"),
        Statement::Lemma { label: l, expr, .. } => {
            format!("{indent}lemma {} : {};\n", label(l), expr)
        }
        Statement::Eq { vars, def, .. } => match def {
            Some(d) => format!("{indent}eq {} = {d};\n", params(vars)),
            None => format!("{indent}eq {};\n", params(vars)),
        },
        Statement::Node(n) => node_to_string(n, indent),
    }
}

pub fn item_to_string(item: &Item) -> String {
    match item {
        Item::Record(r) => {
            let mut out = format!("record {} {{\n", r.name);
            for f in &r.fields {
                out.push_str(&format!("  {} : {};\n", f.name, f.ty));
            }
            out.push_str("}\n");
            out
        }
        Item::Const(c) => format!("const {} : {} = {};\n", c.name, c.ty, c.value),
        Item::Node(n) => node_to_string(n, ""),
        Item::Component(c) => {
            let mut out = format!("component {}\n", c.name);
            for p in &c.ports {
                let dir = match p.dir {
                    Direction::In => "in",
                    Direction::Out => "out",
                };
                out.push_str(&format!("  {dir} {} : {};\n", p.name, p.ty));
            }
            for s in &c.statements {
                out.push_str(&statement_to_string(s, "  "));
            }
            out.push_str("end\n");
            out
        }
        Item::Implementation(i) => {
            let mut out = format!("implementation {}\n", i.name);
            if !i.subcomponents.is_empty() {
                out.push_str("  subcomponents\n");
                for s in &i.subcomponents {
                    out.push_str(&format!("    {} : {};\n", s.name, s.classifier));
                }
            }
            if !i.connections.is_empty() {
                out.push_str("  connections\n");
                for c in &i.connections {
                    out.push_str(&format!("    {} -> {};\n", c.src, c.dst));
                }
            }
            for s in &i.statements {
                out.push_str(&statement_to_string(s, "  "));
            }
            out.push_str("end\n");
            out
        }
    }
}

pub fn file_to_string(file: &SourceFile) -> String {
    file.items
        .iter()
        .map(item_to_string)
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parser::{parse_expr_str, parse_file};

    fn roundtrip(src: &str) -> String {
        expr_to_string(&parse_expr_str(src).unwrap())
    }

    #[test]
    fn minimal_parentheses() {
        assert_eq!(roundtrip("(a and b) or c"), "a and b or c");
        assert_eq!(roundtrip("a and (b or c)"), "a and (b or c)");
        assert_eq!(roundtrip("(a => b) => c"), "(a => b) => c");
        assert_eq!(roundtrip("a => (b => c)"), "a => b => c");
        assert_eq!(roundtrip("(a -> b) -> c"), "(a -> b) -> c");
        assert_eq!(roundtrip("not (a and b)"), "not (a and b)");
        assert_eq!(roundtrip("(x < y) = (y < z)"), "(x < y) = (y < z)");
    }

    #[test]
    fn nested_ite_is_wrapped() {
        assert_eq!(
            roundtrip("(if a then 1 else 2) + 3"),
            "(if a then 1 else 2) + 3"
        );
        assert_eq!(roundtrip("if a then 1 else 2 + 3"), "if a then 1 else 2 + 3");
    }

    #[test]
    fn double_negation_does_not_become_a_comment() {
        let printed = roundtrip("-(-x)");
        assert_eq!(printed, "-(-x)");
        assert_eq!(roundtrip(&printed), printed);
    }

    #[test]
    fn file_roundtrip_is_fixed_point() {
        let src = r#"
record R { a : int; b : real; }
const k : real = 2.5;
node inc(x : int) returns (y : int);
let
  y = x + 1;
tel
component C
  in i : int;
  out o : int;
  eq n : int = 0 -> pre(n) + 1;
  assume "pos" : i > 0;
  guarantee "g" : o = inc(i);
end
implementation C.impl
  assert o = i + 1;
  lemma "l" : true;
end
"#;
        let (f1, d1) = parse_file(src);
        assert!(d1.is_empty(), "{d1:?}");
        let p1 = file_to_string(&f1);
        let (f2, d2) = parse_file(&p1);
        assert!(d2.is_empty(), "{d2:?}");
        assert_eq!(file_to_string(&f2), p1);
    }
}
