//! SMT-LIB v2 encoding of unrolled transition systems.

use std::fmt::Write as _;

use num_bigint::Sign;
use num_rational::BigRational;

use crate::lang::ast::BinOp;
use crate::ts::{sort_of, Term, TransitionSystem, VarId, VarKind};
use crate::value::{Type, Value};

pub fn sort(ty: &Type) -> &'static str {
    match ty {
        Type::Bool => "Bool",
        Type::Int => "Int",
        _ => "Real",
    }
}

/// Quoted symbol for `name` on step `step`.
pub fn symbol(name: &str, step: usize) -> String {
    format!("|{}@{step}|", name.replace(['|', '\\'], "_"))
}

/// Quoted symbol for a quantified copy of `name` on step `step`.
pub fn bound_symbol(name: &str, step: usize) -> String {
    format!("|{}@{step}!q|", name.replace(['|', '\\'], "_"))
}

fn rational(r: &BigRational) -> String {
    let body = if r.is_integer() {
        format!("{}.0", r.numer().magnitude())
    } else {
        format!("(/ {}.0 {}.0)", r.numer().magnitude(), r.denom())
    };
    if r.numer().sign() == Sign::Minus {
        format!("(- {body})")
    } else {
        body
    }
}

/// SMT-LIB literal of a scalar value.
pub fn literal(v: &Value) -> String {
    match v {
        Value::Bool(b) => b.to_string(),
        Value::Int(i) if i.sign() == Sign::Minus => format!("(- {})", i.magnitude()),
        Value::Int(i) => i.to_string(),
        Value::Real(r) => rational(r),
        Value::Record(_) => unreachable!("records are flattened before encoding"),
    }
}

/// Prints `t` using `name` for its variables.
pub fn term(ts: &TransitionSystem, t: &Term, name: &dyn Fn(VarId) -> String) -> String {
    let mut out = String::new();
    write_term(ts, t, name, &mut out);
    out
}

fn write_term(ts: &TransitionSystem, t: &Term, name: &dyn Fn(VarId) -> String, out: &mut String) {
    let app = |op: &str, args: &[&Term], out: &mut String| {
        out.push('(');
        out.push_str(op);
        for a in args {
            out.push(' ');
            write_term(ts, a, name, out);
        }
        out.push(')');
    };
    match t {
        Term::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Term::Int(i) => {
            if i.sign() == Sign::Minus {
                let _ = write!(out, "(- {})", i.magnitude());
            } else {
                let _ = write!(out, "{i}");
            }
        }
        Term::Real(r) => out.push_str(&rational(r)),
        Term::Var(v) => out.push_str(&name(*v)),
        Term::Not(a) => app("not", &[a], out),
        Term::Neg(a) => app("-", &[a], out),
        Term::ToReal(a) => app("to_real", &[a], out),
        Term::Floor(a) => app("to_int", &[a], out),
        Term::Ite(c, a, b) => app("ite", &[c, a, b], out),
        Term::And(xs) => match xs.len() {
            0 => out.push_str("true"),
            1 => write_term(ts, &xs[0], name, out),
            _ => app("and", &xs.iter().collect::<Vec<_>>(), out),
        },
        Term::Bin(op, a, b) => {
            let sym = match op {
                BinOp::Div if sort_of(a, &|v| ts.ty(v).clone()) == Type::Int => "div",
                BinOp::Ne => {
                    out.push_str("(not ");
                    app("=", &[a, b], out);
                    out.push(')');
                    return;
                }
                BinOp::And => "and",
                BinOp::Or => "or",
                BinOp::Implies => "=>",
                op => op.symbol(),
            };
            app(sym, &[a, b], out);
        }
    }
}

/// Logic covering every definition and constraint of `ts`.
pub fn logic(ts: &TransitionSystem, quantified: bool) -> String {
    let mut nonlinear = false;
    for t in ts.defs.iter().flatten().chain(ts.constraints.iter().map(|c| &c.term)) {
        nonlinear |= t.is_nonlinear();
    }
    if nonlinear {
        return "ALL".into();
    }
    let ints = ts.vars.iter().any(|v| v.ty == Type::Int);
    let reals = ts.vars.iter().any(|v| v.ty == Type::Real);
    let arith = match (ints, reals) {
        (true, true) => "LIRA",
        (false, true) => "LRA",
        _ => "LIA",
    };
    if quantified {
        arith.to_string()
    } else {
        format!("QF_{arith}")
    }
}

/// Step-by-step encoding of one transition system.
pub struct Unroller<'a> {
    pub ts: &'a TransitionSystem,
}

impl<'a> Unroller<'a> {
    pub fn new(ts: &'a TransitionSystem) -> Unroller<'a> {
        Unroller { ts }
    }

    pub fn at(&self, v: VarId, step: usize) -> String {
        symbol(self.ts.name(v), step)
    }

    pub fn term_at(&self, t: &Term, step: usize) -> String {
        term(self.ts, t, &|v| self.at(v, step))
    }

    /// `declare-fun` of every variable on `step`.
    pub fn declare(&self, step: usize) -> Vec<String> {
        self.declare_only(step, |_| true)
    }

    pub fn declare_only(&self, step: usize, keep: impl Fn(VarId) -> bool) -> Vec<String> {
        (0..self.ts.vars.len())
            .filter(|v| keep(*v))
            .map(|v| format!("(declare-fun {} () {})", self.at(v, step), sort(self.ts.ty(v))))
            .collect()
    }

    /// Definitions and constraints as separate conjuncts, printed with `name`.
    pub fn body_parts(&self, name: &dyn Fn(VarId) -> String) -> Vec<String> {
        let mut out = Vec::new();
        for (v, d) in self.ts.defs.iter().enumerate() {
            if let Some(t) = d {
                out.push(format!("(= {} {})", name(v), term(self.ts, t, name)));
            }
        }
        for c in &self.ts.constraints {
            out.push(term(self.ts, &c.term, name));
        }
        out
    }

    /// Assertions of every definition and constraint on `step`.
    pub fn body(&self, step: usize) -> Vec<String> {
        self.body_parts(&|v| self.at(v, step))
            .into_iter()
            .map(|p| format!("(assert {p})"))
            .collect()
    }

    /// Links step `from` to the following step `to`: the pre variables of
    /// `to` hold the values of `from`, and `to` is not the first step.
    pub fn link(&self, from: usize, to: usize) -> Vec<String> {
        let mut out: Vec<String> = self
            .ts
            .pre_links
            .iter()
            .map(|&(p, y)| format!("(assert (= {} {}))", self.at(p, to), self.at(y, from)))
            .collect();
        out.push(format!("(assert (not {}))", self.at(self.ts.init(), to)));
        out
    }

    pub fn initial(&self, step: usize) -> String {
        format!("(assert {})", self.at(self.ts.init(), step))
    }

    pub fn assert_var(&self, v: VarId, step: usize, positive: bool) -> String {
        if positive {
            format!("(assert {})", self.at(v, step))
        } else {
            format!("(assert (not {}))", self.at(v, step))
        }
    }

    /// Variables that are free on a step: inputs, state variables and the
    /// first-step flag.
    pub fn is_free(&self, v: VarId) -> bool {
        matches!(self.ts.vars[v].kind, VarKind::Input | VarKind::State | VarKind::Init)
    }

    /// A run of `len` steps from the initial step: declarations, bodies and
    /// links.
    pub fn unroll(&self, len: usize) -> Vec<String> {
        let mut out = Vec::new();
        for t in 0..len {
            out.extend(self.declare(t));
            out.extend(self.body(t));
            if t == 0 {
                out.push(self.initial(0));
            } else {
                out.extend(self.link(t - 1, t));
            }
        }
        out
    }
}

pub fn header(logic: &str) -> Vec<String> {
    vec![
        "(set-option :produce-models true)".to_string(),
        format!("(set-logic {logic})"),
    ]
}
