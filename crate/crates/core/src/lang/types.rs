//! Type checking of contract expressions.
//!
//! Checking is bidirectional: an optional expected type flows down so that
//! integer literals written where a real is expected (`fcc_gain = 4/3`) are
//! read as reals. Outside such a context mixing `int` and `real` is an
//! error. Named constants are replaced by their values, and subtrees made
//! only of numeric literals are folded into a single literal.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::diag::{Diagnostic, Span};
use crate::lang::ast::*;
use crate::value::{Type, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordDef {
    pub name: String,
    pub fields: Vec<(String, Type)>,
}

impl RecordDef {
    pub fn field(&self, name: &str) -> Option<&Type> {
        self.fields.iter().find(|(f, _)| f == name).map(|(_, t)| t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSig {
    pub inputs: Vec<Type>,
    pub outputs: Vec<Type>,
}

/// Everything an expression may refer to: variables (dotted names for
/// subcomponent ports), scalar constants, record declarations and nodes.
#[derive(Debug, Clone, Default)]
pub struct TypeEnv {
    pub vars: BTreeMap<String, Type>,
    pub consts: BTreeMap<String, Value>,
    pub records: BTreeMap<String, RecordDef>,
    pub nodes: BTreeMap<String, NodeSig>,
}

impl TypeEnv {
    pub fn new() -> TypeEnv {
        TypeEnv::default()
    }

    pub fn with_var(mut self, name: &str, ty: Type) -> TypeEnv {
        self.vars.insert(name.to_string(), ty);
        self
    }

    /// Resolves a path to its type: the longest prefix naming a variable,
    /// followed by record field accesses. More than one successful reading
    /// is reported as ambiguous.
    pub fn resolve(&self, path: &Path) -> Result<Type, String> {
        let parts = &path.0;
        let mut found: Vec<Type> = Vec::new();
        let mut field_error = None;
        for i in (1..=parts.len()).rev() {
            let prefix = parts[..i].join(".");
            let Some(ty) = self.vars.get(&prefix) else {
                continue;
            };
            match self.project(ty, &parts[i..]) {
                Ok(t) => found.push(t),
                Err(e) => field_error = field_error.or(Some(e)),
            }
        }
        match found.len() {
            1 => Ok(found.pop().unwrap()),
            0 => Err(field_error.unwrap_or_else(|| format!("unresolved identifier '{path}'"))),
            _ => Err(format!(
                "ambiguous identifier '{path}': matches both a record field and a subcomponent variable"
            )),
        }
    }

    pub fn project(&self, ty: &Type, fields: &[String]) -> Result<Type, String> {
        let mut ty = ty.clone();
        for f in fields {
            let Type::Record(r) = &ty else {
                return Err(format!("'{f}' is not a field: value of type {ty} has no fields"));
            };
            let def = self
                .records
                .get(r)
                .ok_or_else(|| format!("unknown record type '{r}'"))?;
            ty = def
                .field(f)
                .cloned()
                .ok_or_else(|| format!("record '{r}' has no field '{f}'"))?;
        }
        Ok(ty)
    }

    /// Converts a written type name into a semantic type.
    pub fn type_of_name(&self, name: &TypeName) -> Result<Type, String> {
        match name {
            TypeName::Bool => Ok(Type::Bool),
            TypeName::Int => Ok(Type::Int),
            TypeName::Real => Ok(Type::Real),
            TypeName::Named(n) if self.records.contains_key(n) => Ok(Type::Record(n.clone())),
            TypeName::Named(n) => Err(format!("unknown type '{n}'")),
        }
    }
}

/// True for trees built only from numeric literals and arithmetic.
pub fn is_literal_const(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Int(_) | ExprKind::Real(_) => true,
        ExprKind::Unary(UnOp::Neg, a) => is_literal_const(a),
        ExprKind::Binary(op, a, b) if op.is_arith() => is_literal_const(a) && is_literal_const(b),
        _ => false,
    }
}

fn literal_value(e: &Expr) -> Option<Value> {
    match &e.kind {
        ExprKind::Int(i) => Some(Value::Int(i.clone())),
        ExprKind::Real(r) => Some(Value::Real(r.clone())),
        ExprKind::Bool(b) => Some(Value::Bool(*b)),
        _ => None,
    }
}

pub fn value_to_expr(v: &Value, span: Span) -> Expr {
    match v {
        Value::Bool(b) => Expr::typed(ExprKind::Bool(*b), span, Type::Bool),
        Value::Int(i) => Expr::typed(ExprKind::Int(i.clone()), span, Type::Int),
        Value::Real(r) => Expr::typed(ExprKind::Real(r.clone()), span, Type::Real),
        Value::Record(_) => unreachable!("constants are scalar"),
    }
}

pub struct Checker<'a> {
    env: &'a TypeEnv,
    pub errors: Vec<Diagnostic>,
}

impl<'a> Checker<'a> {
    pub fn new(env: &'a TypeEnv) -> Checker<'a> {
        Checker {
            env,
            errors: Vec::new(),
        }
    }

    pub fn env(&self) -> &TypeEnv {
        self.env
    }

    fn err(&mut self, span: Span, msg: impl Into<String>) -> Option<Expr> {
        self.errors.push(Diagnostic::error(span, msg));
        None
    }

    /// Checks `e` and requires its type to be `ty`.
    pub fn check_as(&mut self, e: &Expr, ty: &Type) -> Option<Expr> {
        let t = self.check(e, Some(ty))?;
        if t.ty.as_ref() != Some(ty) {
            return self.err(
                e.span,
                format!("type mismatch: expected {ty}, found {}", t.ty.as_ref().unwrap()),
            );
        }
        Some(t)
    }

    /// Infers the type of `e`; `expected` only steers literal coercion.
    pub fn check(&mut self, e: &Expr, expected: Option<&Type>) -> Option<Expr> {
        let span = e.span;
        let typed = |kind, ty| Some(Expr::typed(kind, span, ty));
        match &e.kind {
            ExprKind::Bool(b) => typed(ExprKind::Bool(*b), Type::Bool),
            ExprKind::Int(i) => {
                if expected == Some(&Type::Real) {
                    typed(ExprKind::Real(BigRational::from_integer(i.clone())), Type::Real)
                } else {
                    typed(ExprKind::Int(i.clone()), Type::Int)
                }
            }
            ExprKind::Real(r) => typed(ExprKind::Real(r.clone()), Type::Real),
            ExprKind::Id(path) => {
                if path.0.len() == 1 {
                    if let Some(v) = self.env.consts.get(&path.0[0]) {
                        return Some(value_to_expr(v, span));
                    }
                }
                match self.env.resolve(path) {
                    Ok(ty) => typed(ExprKind::Id(path.clone()), ty),
                    Err(msg) => self.err(span, msg),
                }
            }
            ExprKind::Unary(UnOp::Not, a) => {
                let a = self.check_as(a, &Type::Bool)?;
                typed(ExprKind::Unary(UnOp::Not, Box::new(a)), Type::Bool)
            }
            ExprKind::Unary(UnOp::Neg, a) => {
                let a = self.check(a, expected)?;
                let ty = a.ty.clone().unwrap();
                if !ty.is_numeric() {
                    return self.err(span, format!("unary minus expects int or real, found {ty}"));
                }
                self.fold(Expr::typed(ExprKind::Unary(UnOp::Neg, Box::new(a)), span, ty))
            }
            ExprKind::Binary(op, a, b) if op.is_logical() => {
                let a = self.check_as(a, &Type::Bool);
                let b = self.check_as(b, &Type::Bool);
                typed(ExprKind::Binary(*op, Box::new(a?), Box::new(b?)), Type::Bool)
            }
            ExprKind::Binary(op, a, b) if op.is_arith() => {
                let hint = expected.filter(|t| t.is_numeric());
                let (a, b) = self.pair(a, b, hint)?;
                let (ta, tb) = (a.ty.clone().unwrap(), b.ty.clone().unwrap());
                if ta != tb {
                    return self.err(span, format!("mixed int/real arithmetic: {ta} {} {tb}", op.symbol()));
                }
                if !ta.is_numeric() {
                    return self.err(span, format!("'{}' expects int or real operands, found {ta}", op.symbol()));
                }
                if *op == BinOp::Div && matches!(literal_value(&b), Some(Value::Int(ref z)) if z.is_zero()) {
                    return self.err(span, "division by zero");
                }
                if *op == BinOp::Div && matches!(literal_value(&b), Some(Value::Real(ref z)) if z.is_zero()) {
                    return self.err(span, "division by zero");
                }
                if *op == BinOp::Div && ta == Type::Int {
                    return self.int_division(a, b, span);
                }
                self.fold(Expr::typed(ExprKind::Binary(*op, Box::new(a), Box::new(b)), span, ta))
            }
            ExprKind::Binary(op, a, b) => {
                let (a, b) = self.pair(a, b, None)?;
                let (ta, tb) = (a.ty.clone().unwrap(), b.ty.clone().unwrap());
                if ta != tb {
                    return self.err(
                        span,
                        format!("relation '{}' compares {ta} with {tb}", op.symbol()),
                    );
                }
                let ordering = !matches!(op, BinOp::Eq | BinOp::Ne);
                if ordering && !ta.is_numeric() {
                    return self.err(span, format!("relation '{}' needs int or real operands, found {ta}", op.symbol()));
                }
                typed(ExprKind::Binary(*op, Box::new(a), Box::new(b)), Type::Bool)
            }
            ExprKind::Ite(c, a, b) => {
                let c = self.check_as(c, &Type::Bool);
                let (a, b) = self.pair(a, b, expected)?;
                let c = c?;
                let (ta, tb) = (a.ty.clone().unwrap(), b.ty.clone().unwrap());
                if ta != tb {
                    return self.err(span, format!("if branches have different types: {ta} and {tb}"));
                }
                typed(ExprKind::Ite(Box::new(c), Box::new(a), Box::new(b)), ta)
            }
            ExprKind::Arrow(a, b) => {
                let (a, b) = self.pair(a, b, expected)?;
                let (ta, tb) = (a.ty.clone().unwrap(), b.ty.clone().unwrap());
                if ta != tb {
                    return self.err(span, format!("arrow operands have different types: {ta} and {tb}"));
                }
                typed(ExprKind::Arrow(Box::new(a), Box::new(b)), ta)
            }
            ExprKind::Pre(a) => {
                let a = self.check(a, expected)?;
                let ty = a.ty.clone().unwrap();
                typed(ExprKind::Pre(Box::new(a)), ty)
            }
            ExprKind::Floor(a) => {
                let a = self.check_as(a, &Type::Real)?;
                typed(ExprKind::Floor(Box::new(a)), Type::Int)
            }
            ExprKind::ToReal(a) => {
                let a = self.check_as(a, &Type::Int)?;
                if let Some(Value::Int(i)) = literal_value(&a) {
                    return typed(ExprKind::Real(BigRational::from_integer(i)), Type::Real);
                }
                typed(ExprKind::ToReal(Box::new(a)), Type::Real)
            }
            ExprKind::RecordUpdate { base, field, value } => {
                let base = self.check(base, expected)?;
                let ty = base.ty.clone().unwrap();
                let fty = match self.env.project(&ty, std::slice::from_ref(field)) {
                    Ok(t) => t,
                    Err(msg) => return self.err(span, msg),
                };
                let value = self.check_as(value, &fty)?;
                typed(
                    ExprKind::RecordUpdate {
                        base: Box::new(base),
                        field: field.clone(),
                        value: Box::new(value),
                    },
                    ty,
                )
            }
            ExprKind::Call { node, args } => {
                let name = node.joined();
                let Some(sig) = self.env.nodes.get(&name) else {
                    return self.err(span, format!("unknown node '{name}'"));
                };
                let sig = sig.clone();
                if sig.inputs.len() != args.len() {
                    return self.err(
                        span,
                        format!("node '{name}' takes {} argument(s), {} given", sig.inputs.len(), args.len()),
                    );
                }
                if sig.outputs.len() != 1 {
                    return self.err(
                        span,
                        format!("node '{name}' returns {} values; bind them with a multi-variable equation", sig.outputs.len()),
                    );
                }
                let mut typed_args = Vec::new();
                for (a, t) in args.iter().zip(&sig.inputs) {
                    typed_args.push(self.check_as(a, t));
                }
                let typed_args: Option<Vec<Expr>> = typed_args.into_iter().collect();
                typed(
                    ExprKind::Call {
                        node: node.clone(),
                        args: typed_args?,
                    },
                    sig.outputs[0].clone(),
                )
            }
        }
    }

    /// Checks two sibling operands that must share a type. A pure literal
    /// operand takes its type from a non-literal sibling.
    fn pair(&mut self, a: &Expr, b: &Expr, hint: Option<&Type>) -> Option<(Expr, Expr)> {
        if hint.is_some() {
            let ta = self.check(a, hint);
            let tb = self.check(b, hint);
            return Some((ta?, tb?));
        }
        let (la, lb) = (is_literal_const(a), is_literal_const(b));
        if la && !lb {
            let tb = self.check(b, None)?;
            let ta = self.check(a, tb.ty.as_ref())?;
            Some((ta, tb))
        } else if lb && !la {
            let ta = self.check(a, None)?;
            let tb = self.check(b, ta.ty.as_ref())?;
            Some((ta, tb))
        } else {
            let ta = self.check(a, None);
            let tb = self.check(b, None);
            Some((ta?, tb?))
        }
    }

    fn int_division(&mut self, a: Expr, b: Expr, span: Span) -> Option<Expr> {
        match (literal_value(&a), literal_value(&b)) {
            (Some(Value::Int(x)), Some(Value::Int(y))) => {
                if y.is_zero() {
                    return self.err(span, "division by zero");
                }
                if !(&x % &y).is_zero() {
                    return self.err(
                        span,
                        format!("integer division {x}/{y} is not exact; write real literals ({x}.0/{y}.0) or use it where a real is expected"),
                    );
                }
                Some(Expr::typed(ExprKind::Int(x / y), span, Type::Int))
            }
            _ => self.err(
                span,
                "integer division is only supported between constants; use real operands",
            ),
        }
    }

    /// Folds an arithmetic node whose operands are literals.
    fn fold(&mut self, e: Expr) -> Option<Expr> {
        let span = e.span;
        let folded = match &e.kind {
            ExprKind::Unary(UnOp::Neg, a) => match literal_value(a) {
                Some(Value::Int(i)) => Some(Value::Int(-i)),
                Some(Value::Real(r)) => Some(Value::Real(-r)),
                _ => None,
            },
            ExprKind::Binary(op, a, b) => match (literal_value(a), literal_value(b)) {
                (Some(Value::Int(x)), Some(Value::Int(y))) => match op {
                    BinOp::Add => Some(Value::Int(x + y)),
                    BinOp::Sub => Some(Value::Int(x - y)),
                    BinOp::Mul => Some(Value::Int(x * y)),
                    _ => None,
                },
                (Some(Value::Real(x)), Some(Value::Real(y))) => match op {
                    BinOp::Add => Some(Value::Real(x + y)),
                    BinOp::Sub => Some(Value::Real(x - y)),
                    BinOp::Mul => Some(Value::Real(x * y)),
                    BinOp::Div if y.is_zero() => return self.err(span, "division by zero"),
                    BinOp::Div => Some(Value::Real(x / y)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        };
        Some(match folded {
            Some(v) => value_to_expr(&v, span),
            None => e,
        })
    }
}

/// Type checks an expression, returning the annotated tree.
pub fn typecheck(e: &Expr, env: &TypeEnv) -> Result<Expr, Vec<Diagnostic>> {
    let mut c = Checker::new(env);
    match c.check(e, None) {
        Some(t) if c.errors.is_empty() => Ok(t),
        _ => Err(c.errors),
    }
}

/// Type checks an expression that must have type `ty`.
pub fn typecheck_as(e: &Expr, env: &TypeEnv, ty: &Type) -> Result<Expr, Vec<Diagnostic>> {
    let mut c = Checker::new(env);
    match c.check_as(e, ty) {
        Some(t) if c.errors.is_empty() => Ok(t),
        _ => Err(c.errors),
    }
}

/// Evaluates a constant initializer (literals and other constants only).
pub fn const_value(e: &Expr, ty: &Type, env: &TypeEnv) -> Result<Value, Vec<Diagnostic>> {
    let t = typecheck_as(e, env, ty)?;
    literal_value(&t).ok_or_else(|| {
        vec![Diagnostic::error(
            e.span,
            "constant initializer must be built from literals and other constants",
        )]
    })
}

/// Integer value of a folded literal, if any.
pub fn int_literal(e: &Expr) -> Option<BigInt> {
    match &e.kind {
        ExprKind::Int(i) => Some(i.clone()),
        ExprKind::Unary(UnOp::Neg, a) => int_literal(a).map(|i| -i),
        _ => None,
    }
}

/// Detects recursion in the node call graph. Returns the names on the
/// first cycle found, in call order.
pub fn find_node_cycle(calls: &BTreeMap<String, Vec<String>>) -> Option<Vec<String>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Fresh,
        Active,
        Done,
    }
    fn visit(
        n: &str,
        calls: &BTreeMap<String, Vec<String>>,
        marks: &mut BTreeMap<String, Mark>,
        stack: &mut Vec<String>,
    ) -> Option<Vec<String>> {
        match marks.get(n).copied().unwrap_or(Mark::Fresh) {
            Mark::Done => return None,
            Mark::Active => {
                let start = stack.iter().position(|s| s == n).unwrap_or(0);
                let mut cycle = stack[start..].to_vec();
                cycle.push(n.to_string());
                return Some(cycle);
            }
            Mark::Fresh => {}
        }
        marks.insert(n.to_string(), Mark::Active);
        stack.push(n.to_string());
        for callee in calls.get(n).into_iter().flatten() {
            if let Some(c) = visit(callee, calls, marks, stack) {
                return Some(c);
            }
        }
        stack.pop();
        marks.insert(n.to_string(), Mark::Done);
        None
    }
    let mut marks = BTreeMap::new();
    for n in calls.keys() {
        let mut stack = Vec::new();
        if let Some(c) = visit(n, calls, &mut marks, &mut stack) {
            return Some(c);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parser::parse_expr_str;

    fn env() -> TypeEnv {
        let mut env = TypeEnv::new()
            .with_var("num_valid", Type::Int)
            .with_var("fcc_gain", Type::Real)
            .with_var("x", Type::Real)
            .with_var("y", Type::Real)
            .with_var("n", Type::Int)
            .with_var("b", Type::Bool)
            .with_var("quad", Type::Record("Quad".into()))
            .with_var("sub.out", Type::Int);
        env.records.insert(
            "Quad".into(),
            RecordDef {
                name: "Quad".into(),
                fields: vec![("v1".into(), Type::Real), ("g1".into(), Type::Bool)],
            },
        );
        env.consts.insert("high".into(), Value::real(20, 1));
        env
    }

    fn ty(src: &str) -> Result<Type, String> {
        let e = parse_expr_str(src).unwrap();
        typecheck(&e, &env())
            .map(|t| t.ty.unwrap())
            .map_err(|d| d[0].message.clone())
    }

    #[test]
    fn gain_table_row_is_boolean() {
        assert_eq!(ty("num_valid = 2 => fcc_gain = 4.0/3.0"), Ok(Type::Bool));
    }

    #[test]
    fn integer_literals_in_real_context_are_reals() {
        assert_eq!(ty("num_valid = 2 => fcc_gain = 4/3"), Ok(Type::Bool));
        let e = parse_expr_str("fcc_gain = 4/3").unwrap();
        let t = typecheck(&e, &env()).unwrap();
        let ExprKind::Binary(_, _, rhs) = &t.kind else { panic!() };
        assert_eq!(rhs.kind, ExprKind::Real(BigRational::new(4.into(), 3.into())));
        assert_eq!(ty("x <= (4/3) * high"), Ok(Type::Bool));
    }

    #[test]
    fn mixed_literals_are_rejected() {
        assert!(ty("1 + 2.0").unwrap_err().contains("mixed int/real"));
        assert!(ty("n + x = 1.0").unwrap_err().contains("mixed int/real"));
    }

    #[test]
    fn floor_and_real_casts() {
        assert_eq!(ty("floor(3.7) = 3"), Ok(Type::Bool));
        assert_eq!(ty("real(n) + x"), Ok(Type::Real));
        assert!(ty("floor(n)").is_err());
    }

    #[test]
    fn integer_division_rules() {
        assert_eq!(ty("n = 6/3"), Ok(Type::Bool));
        assert!(ty("n = 4/3").unwrap_err().contains("not exact"));
        assert!(ty("n / 2 = 1").unwrap_err().contains("only supported between constants"));
        assert!(ty("x / 0.0 = 1.0").is_err());
    }

    #[test]
    fn paths_resolve_through_records_and_subcomponents() {
        assert_eq!(ty("quad.v1"), Ok(Type::Real));
        assert_eq!(ty("sub.out"), Ok(Type::Int));
        assert!(ty("quad.v9").unwrap_err().contains("no field"));
        assert!(ty("nope").unwrap_err().contains("unresolved"));
        assert_eq!(ty("quad { v1 := 2 }"), Ok(Type::Record("Quad".into())));
    }

    #[test]
    fn ambiguous_paths_are_errors() {
        let mut e = env();
        e.vars.insert("quad.v1".into(), Type::Real);
        let err = typecheck(&parse_expr_str("quad.v1").unwrap(), &e).unwrap_err();
        assert!(err[0].message.contains("ambiguous"));
    }

    #[test]
    fn relations_and_arrows() {
        assert_eq!(ty("b = (x < y)"), Ok(Type::Bool));
        assert!(ty("b < b").is_err());
        assert_eq!(ty("0 -> pre(n) + 1"), Ok(Type::Int));
        assert!(ty("0 -> x").is_ok());
        assert!(ty("true -> x").is_err());
    }

    #[test]
    fn node_cycles() {
        let mut calls = BTreeMap::new();
        calls.insert("f".to_string(), vec!["g".to_string()]);
        calls.insert("g".to_string(), vec!["f".to_string()]);
        calls.insert("h".to_string(), vec![]);
        assert_eq!(find_node_cycle(&calls), Some(vec!["f".into(), "g".into(), "f".into()]));
        calls.insert("g".to_string(), vec!["h".to_string()]);
        assert_eq!(find_node_cycle(&calls), None);
    }
}
