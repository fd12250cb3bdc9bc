//! Reference interpreter for the synchronous stream semantics of
//! expressions: every variable is a stream indexed by step, `pre` shifts a
//! stream one step back (undefined on step 0) and `a -> b` selects `a` on
//! step 0 and `b` afterwards. Node calls are evaluated as independent
//! stream instances.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::Zero;

use crate::lang::ast::*;
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("pre evaluated on the first step")]
    Undefined,
    #[error("unbound identifier '{0}'")]
    Unbound(String),
    #[error("dynamic type error: {0}")]
    Type(String),
    #[error("division by zero")]
    DivByZero,
    #[error("unknown node '{0}'")]
    UnknownNode(String),
}

/// Source of stream values for identifiers.
pub trait Streams {
    /// Value of the variable `name` at `step`, or `None` when no variable
    /// of that exact name exists.
    fn lookup(&self, name: &str, step: usize) -> Result<Option<Value>, EvalError>;
    fn node(&self, name: &str) -> Option<&NodeDef>;
}

fn resolve(path: &Path, step: usize, env: &dyn Streams) -> Result<Value, EvalError> {
    let parts = &path.0;
    for i in (1..=parts.len()).rev() {
        let prefix = parts[..i].join(".");
        if let Some(mut v) = env.lookup(&prefix, step)? {
            for f in &parts[i..] {
                v = match v {
                    Value::Record(mut fields) => fields
                        .remove(f)
                        .ok_or_else(|| EvalError::Type(format!("no field '{f}' in '{path}'")))?,
                    other => {
                        return Err(EvalError::Type(format!(
                            "field access '{f}' on {} value",
                            other.type_name()
                        )))
                    }
                };
            }
            return Ok(v);
        }
    }
    Err(EvalError::Unbound(path.joined()))
}

fn want_bool(v: Value) -> Result<bool, EvalError> {
    v.as_bool()
        .ok_or_else(|| EvalError::Type(format!("expected bool, found {}", v.type_name())))
}

pub(crate) fn arith(op: BinOp, a: Value, b: Value) -> Result<Value, EvalError> {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => Ok(Value::Int(match op {
            BinOp::Add => x + y,
            BinOp::Sub => x - y,
            BinOp::Mul => x * y,
            BinOp::Div => {
                if y.is_zero() {
                    return Err(EvalError::DivByZero);
                }
                x / y
            }
            _ => unreachable!(),
        })),
        (Value::Real(x), Value::Real(y)) => Ok(Value::Real(match op {
            BinOp::Add => x + y,
            BinOp::Sub => x - y,
            BinOp::Mul => x * y,
            BinOp::Div => {
                if y.is_zero() {
                    return Err(EvalError::DivByZero);
                }
                x / y
            }
            _ => unreachable!(),
        })),
        (a, b) => Err(EvalError::Type(format!(
            "'{}' applied to {} and {}",
            op.symbol(),
            a.type_name(),
            b.type_name()
        ))),
    }
}

pub(crate) fn compare(op: BinOp, a: Value, b: Value) -> Result<bool, EvalError> {
    if matches!(op, BinOp::Eq | BinOp::Ne) {
        if std::mem::discriminant(&a) != std::mem::discriminant(&b) {
            return Err(EvalError::Type(format!(
                "'{}' compares {} with {}",
                op.symbol(),
                a.type_name(),
                b.type_name()
            )));
        }
        let eq = a == b;
        return Ok(if op == BinOp::Eq { eq } else { !eq });
    }
    let ord = match (&a, &b) {
        (Value::Int(x), Value::Int(y)) => x.cmp(y),
        (Value::Real(x), Value::Real(y)) => x.cmp(y),
        _ => {
            return Err(EvalError::Type(format!(
                "'{}' compares {} with {}",
                op.symbol(),
                a.type_name(),
                b.type_name()
            )))
        }
    };
    Ok(match op {
        BinOp::Lt => ord.is_lt(),
        BinOp::Le => ord.is_le(),
        BinOp::Gt => ord.is_gt(),
        BinOp::Ge => ord.is_ge(),
        _ => unreachable!(),
    })
}

/// Evaluates `e` at `step`.
pub fn eval_at(e: &Expr, step: usize, env: &dyn Streams) -> Result<Value, EvalError> {
    match &e.kind {
        ExprKind::Bool(b) => Ok(Value::Bool(*b)),
        ExprKind::Int(i) => Ok(Value::Int(i.clone())),
        ExprKind::Real(r) => Ok(Value::Real(r.clone())),
        ExprKind::Id(p) => resolve(p, step, env),
        ExprKind::Unary(UnOp::Not, a) => Ok(Value::Bool(!want_bool(eval_at(a, step, env)?)?)),
        ExprKind::Unary(UnOp::Neg, a) => match eval_at(a, step, env)? {
            Value::Int(i) => Ok(Value::Int(-i)),
            Value::Real(r) => Ok(Value::Real(-r)),
            v => Err(EvalError::Type(format!("negation of {}", v.type_name()))),
        },
        ExprKind::Binary(op, a, b) => match op {
            BinOp::And => Ok(Value::Bool(
                want_bool(eval_at(a, step, env)?)? && want_bool(eval_at(b, step, env)?)?,
            )),
            BinOp::Or => Ok(Value::Bool(
                want_bool(eval_at(a, step, env)?)? || want_bool(eval_at(b, step, env)?)?,
            )),
            BinOp::Implies => Ok(Value::Bool(
                !want_bool(eval_at(a, step, env)?)? || want_bool(eval_at(b, step, env)?)?,
            )),
            _ if op.is_arith() => arith(*op, eval_at(a, step, env)?, eval_at(b, step, env)?),
            _ => Ok(Value::Bool(compare(
                *op,
                eval_at(a, step, env)?,
                eval_at(b, step, env)?,
            )?)),
        },
        ExprKind::Ite(c, a, b) => {
            if want_bool(eval_at(c, step, env)?)? {
                eval_at(a, step, env)
            } else {
                eval_at(b, step, env)
            }
        }
        ExprKind::Pre(a) => {
            if step == 0 {
                Err(EvalError::Undefined)
            } else {
                eval_at(a, step - 1, env)
            }
        }
        ExprKind::Arrow(a, b) => {
            if step == 0 {
                eval_at(a, step, env)
            } else {
                eval_at(b, step, env)
            }
        }
        ExprKind::Floor(a) => match eval_at(a, step, env)? {
            Value::Real(r) => Ok(Value::Int(r.floor().to_integer())),
            v => Err(EvalError::Type(format!("floor of {}", v.type_name()))),
        },
        ExprKind::ToReal(a) => match eval_at(a, step, env)? {
            Value::Int(i) => Ok(Value::Real(BigRational::from_integer(i))),
            v => Err(EvalError::Type(format!("real() of {}", v.type_name()))),
        },
        ExprKind::RecordUpdate { base, field, value } => match eval_at(base, step, env)? {
            Value::Record(mut fields) => {
                let v = eval_at(value, step, env)?;
                if !fields.contains_key(field) {
                    return Err(EvalError::Type(format!("no field '{field}'")));
                }
                fields.insert(field.clone(), v);
                Ok(Value::Record(fields))
            }
            v => Err(EvalError::Type(format!("record update of {}", v.type_name()))),
        },
        ExprKind::Call { node, args } => {
            let mut outs = eval_call(&node.joined(), args, step, env)?;
            if outs.len() != 1 {
                return Err(EvalError::Type(format!("node '{node}' returns {} values", outs.len())));
            }
            Ok(outs.remove(0))
        }
    }
}

/// Evaluates all outputs of a node call at `step`.
pub fn eval_call(
    name: &str,
    args: &[Expr],
    step: usize,
    env: &dyn Streams,
) -> Result<Vec<Value>, EvalError> {
    let node = env
        .node(name)
        .ok_or_else(|| EvalError::UnknownNode(name.to_string()))?;
    let frame = NodeFrame {
        node,
        args,
        outer: env,
        memo: RefCell::new(HashMap::new()),
    };
    node.outputs
        .iter()
        .map(|o| {
            frame
                .lookup(&o.name, step)?
                .ok_or_else(|| EvalError::Unbound(o.name.clone()))
        })
        .collect()
}

struct NodeFrame<'a> {
    node: &'a NodeDef,
    args: &'a [Expr],
    outer: &'a dyn Streams,
    memo: RefCell<HashMap<(String, usize), Value>>,
}

impl Streams for NodeFrame<'_> {
    fn lookup(&self, name: &str, step: usize) -> Result<Option<Value>, EvalError> {
        if let Some(i) = self.node.inputs.iter().position(|p| p.name == name) {
            return eval_at(&self.args[i], step, self.outer).map(Some);
        }
        let key = (name.to_string(), step);
        if let Some(v) = self.memo.borrow().get(&key) {
            return Ok(Some(v.clone()));
        }
        let Some(eq) = self.node.equations.iter().find(|eq| eq.lhs.iter().any(|l| l == name)) else {
            return Ok(None);
        };
        let v = if eq.lhs.len() == 1 {
            eval_at(&eq.rhs, step, self)?
        } else {
            let ExprKind::Call { node, args } = &eq.rhs.kind else {
                return Err(EvalError::Type("multi-variable equation without a node call".into()));
            };
            let idx = eq.lhs.iter().position(|l| l == name).unwrap();
            eval_call(&node.joined(), args, step, self)?.swap_remove(idx)
        };
        self.memo.borrow_mut().insert(key, v.clone());
        Ok(Some(v))
    }

    fn node(&self, name: &str) -> Option<&NodeDef> {
        self.outer.node(name)
    }
}

/// Streams given by explicit per-step valuations plus optional defining
/// expressions evaluated on demand.
#[derive(Debug, Clone, Default)]
pub struct TraceStreams {
    pub steps: Vec<BTreeMap<String, Value>>,
    pub defs: BTreeMap<String, Expr>,
    pub nodes: BTreeMap<String, NodeDef>,
    memo: RefCell<HashMap<(String, usize), Value>>,
}

impl TraceStreams {
    pub fn new(steps: Vec<BTreeMap<String, Value>>) -> TraceStreams {
        TraceStreams {
            steps,
            ..TraceStreams::default()
        }
    }

    pub fn with_def(mut self, name: &str, def: Expr) -> TraceStreams {
        self.defs.insert(name.to_string(), def);
        self
    }

    pub fn with_node(mut self, node: NodeDef) -> TraceStreams {
        self.nodes.insert(node.name.clone(), node);
        self
    }
}

impl Streams for TraceStreams {
    fn lookup(&self, name: &str, step: usize) -> Result<Option<Value>, EvalError> {
        if let Some(v) = self.steps.get(step).and_then(|m| m.get(name)) {
            return Ok(Some(v.clone()));
        }
        let Some(def) = self.defs.get(name) else {
            return Ok(None);
        };
        let key = (name.to_string(), step);
        if let Some(v) = self.memo.borrow().get(&key) {
            return Ok(Some(v.clone()));
        }
        let v = eval_at(def, step, self)?;
        self.memo.borrow_mut().insert(key, v.clone());
        Ok(Some(v))
    }

    fn node(&self, name: &str) -> Option<&NodeDef> {
        self.nodes.get(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parser::{parse_expr_str, parse_file};

    fn bools(xs: &[bool], name: &str) -> Vec<BTreeMap<String, Value>> {
        xs.iter()
            .map(|b| BTreeMap::from([(name.to_string(), Value::Bool(*b))]))
            .collect()
    }

    #[test]
    fn counter_with_arrow_and_pre() {
        let count = parse_expr_str("0 -> pre(count) + 1").unwrap();
        let env = TraceStreams::new(vec![BTreeMap::new(); 5]).with_def("count", count);
        let e = parse_expr_str("count").unwrap();
        let got: Vec<Value> = (0..5).map(|t| eval_at(&e, t, &env).unwrap()).collect();
        assert_eq!(got, (0..5).map(Value::int).collect::<Vec<_>>());
    }

    #[test]
    fn pre_is_undefined_on_first_step() {
        let env = TraceStreams::new(bools(&[true, false], "x"));
        let e = parse_expr_str("pre(x)").unwrap();
        assert_eq!(eval_at(&e, 0, &env), Err(EvalError::Undefined));
        assert_eq!(eval_at(&e, 1, &env), Ok(Value::Bool(true)));
    }

    #[test]
    fn node_instances_keep_their_own_state() {
        let (file, diags) = parse_file(
            "node acc(x : int) returns (s : int);\nlet\n  s = x -> pre(s) + x;\ntel\n",
        );
        assert!(diags.is_empty());
        let Item::Node(node) = file.items[0].clone() else { panic!() };
        let steps = (1..=3)
            .map(|i| BTreeMap::from([("a".to_string(), Value::int(i))]))
            .collect();
        let env = TraceStreams::new(steps).with_node(node);
        let e = parse_expr_str("acc(a) + acc(2 * a)").unwrap();
        assert_eq!(eval_at(&e, 2, &env), Ok(Value::int(18)));
    }

    #[test]
    fn floor_rounds_down() {
        let env = TraceStreams::new(vec![BTreeMap::new()]);
        let e = parse_expr_str("floor(3.7)").unwrap();
        assert_eq!(eval_at(&e, 0, &env), Ok(Value::int(3)));
        let e = parse_expr_str("floor(-3.5)").unwrap();
        assert_eq!(eval_at(&e, 0, &env), Ok(Value::int(-4)));
    }
}
