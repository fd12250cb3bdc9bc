//! Scalar terms of a transition system. Every variable is a scalar; pre,
//! arrow, floor, node calls and records have been lowered away.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::lang::ast::BinOp;
use crate::lang::interp::{arith, compare, EvalError};
use crate::value::{format_rational, Type, Value};

pub type VarId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Bool(bool),
    Int(BigInt),
    Real(BigRational),
    Var(VarId),
    Not(Box<Term>),
    Neg(Box<Term>),
    Bin(BinOp, Box<Term>, Box<Term>),
    /// Conjunction; empty means `true`.
    And(Vec<Term>),
    Ite(Box<Term>, Box<Term>, Box<Term>),
    ToReal(Box<Term>),
    /// Greatest integer not above a real.
    Floor(Box<Term>),
}

impl Term {
    pub fn bin(op: BinOp, a: Term, b: Term) -> Term {
        Term::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn not(a: Term) -> Term {
        match a {
            Term::Bool(b) => Term::Bool(!b),
            Term::Not(inner) => *inner,
            a => Term::Not(Box::new(a)),
        }
    }

    pub fn ite(c: Term, a: Term, b: Term) -> Term {
        match c {
            Term::Bool(true) => a,
            Term::Bool(false) => b,
            _ if a == b => a,
            c => Term::Ite(Box::new(c), Box::new(a), Box::new(b)),
        }
    }

    /// Conjunction with constant folding and flattening.
    pub fn and(parts: impl IntoIterator<Item = Term>) -> Term {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Term::Bool(true) => {}
                Term::Bool(false) => return Term::Bool(false),
                Term::And(xs) => out.extend(xs),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Term::Bool(true),
            1 => out.pop().unwrap(),
            _ => Term::And(out),
        }
    }

    pub fn or(a: Term, b: Term) -> Term {
        match (a, b) {
            (Term::Bool(true), _) | (_, Term::Bool(true)) => Term::Bool(true),
            (Term::Bool(false), x) | (x, Term::Bool(false)) => x,
            (a, b) => Term::bin(BinOp::Or, a, b),
        }
    }

    pub fn implies(a: Term, b: Term) -> Term {
        match (a, b) {
            (Term::Bool(true), x) => x,
            (Term::Bool(false), _) | (_, Term::Bool(true)) => Term::Bool(true),
            (a, b) => Term::bin(BinOp::Implies, a, b),
        }
    }

    pub fn eq(a: Term, b: Term) -> Term {
        Term::bin(BinOp::Eq, a, b)
    }

    pub fn var(&self) -> Option<VarId> {
        match self {
            Term::Var(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Term::Bool(_) | Term::Int(_) | Term::Real(_))
    }

    pub fn for_each_child(&self, mut f: impl FnMut(&Term)) {
        match self {
            Term::Bool(_) | Term::Int(_) | Term::Real(_) | Term::Var(_) => {}
            Term::Not(a) | Term::Neg(a) | Term::ToReal(a) | Term::Floor(a) => f(a),
            Term::Bin(_, a, b) => {
                f(a);
                f(b);
            }
            Term::And(xs) => xs.iter().for_each(f),
            Term::Ite(c, a, b) => {
                f(c);
                f(a);
                f(b);
            }
        }
    }

    /// Variables mentioned by the term.
    pub fn vars(&self, out: &mut Vec<VarId>) {
        if let Term::Var(v) = self {
            out.push(*v);
        }
        self.for_each_child(|c| c.vars(out));
    }

    /// True when some product or quotient has non-constant operands on both
    /// sides, or a non-constant divisor.
    pub fn is_nonlinear(&self) -> bool {
        fn ground(t: &Term) -> bool {
            let mut vs = Vec::new();
            t.vars(&mut vs);
            vs.is_empty()
        }
        let here = match self {
            Term::Bin(BinOp::Mul, a, b) => !ground(a) && !ground(b),
            Term::Bin(BinOp::Div, _, b) => !ground(b),
            _ => false,
        };
        let mut child = false;
        self.for_each_child(|c| child |= c.is_nonlinear());
        here || child
    }

    /// Evaluates the term given the current value of every variable.
    pub fn eval(&self, vals: &dyn Fn(VarId) -> Option<Value>) -> Result<Value, EvalError> {
        let want_bool = |v: Value| {
            v.as_bool()
                .ok_or_else(|| EvalError::Type(format!("expected bool, found {}", v.type_name())))
        };
        Ok(match self {
            Term::Bool(b) => Value::Bool(*b),
            Term::Int(i) => Value::Int(i.clone()),
            Term::Real(r) => Value::Real(r.clone()),
            Term::Var(v) => vals(*v).ok_or_else(|| EvalError::Unbound(format!("v{v}")))?,
            Term::Not(a) => Value::Bool(!want_bool(a.eval(vals)?)?),
            Term::Neg(a) => match a.eval(vals)? {
                Value::Int(i) => Value::Int(-i),
                Value::Real(r) => Value::Real(-r),
                v => return Err(EvalError::Type(format!("negation of {}", v.type_name()))),
            },
            Term::ToReal(a) => match a.eval(vals)? {
                Value::Int(i) => Value::Real(BigRational::from_integer(i)),
                v => return Err(EvalError::Type(format!("real() of {}", v.type_name()))),
            },
            Term::Floor(a) => match a.eval(vals)? {
                Value::Real(r) => Value::Int(r.floor().to_integer()),
                v => return Err(EvalError::Type(format!("floor of {}", v.type_name()))),
            },
            Term::And(xs) => {
                for x in xs {
                    if !want_bool(x.eval(vals)?)? {
                        return Ok(Value::Bool(false));
                    }
                }
                Value::Bool(true)
            }
            Term::Ite(c, a, b) => {
                if want_bool(c.eval(vals)?)? {
                    a.eval(vals)?
                } else {
                    b.eval(vals)?
                }
            }
            Term::Bin(op, a, b) => {
                let (x, y) = (a.eval(vals)?, b.eval(vals)?);
                if op.is_arith() {
                    arith(*op, x, y)?
                } else if op.is_relation() {
                    Value::Bool(compare(*op, x, y)?)
                } else {
                    let (x, y) = (want_bool(x)?, want_bool(y)?);
                    Value::Bool(match op {
                        BinOp::And => x && y,
                        BinOp::Or => x || y,
                        BinOp::Implies => !x || y,
                        _ => unreachable!(),
                    })
                }
            }
        })
    }

    /// Renders the term using `name` for variables.
    pub fn display<'a>(&'a self, name: &'a dyn Fn(VarId) -> String) -> TermDisplay<'a> {
        TermDisplay { term: self, name }
    }
}

pub struct TermDisplay<'a> {
    term: &'a Term,
    name: &'a dyn Fn(VarId) -> String,
}

impl<'a> TermDisplay<'a> {
    fn child<'b>(&'b self, t: &'b Term) -> TermDisplay<'b> {
        TermDisplay { term: t, name: self.name }
    }

    fn wrapped(&self, t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atomic = match t {
            Term::Bool(_) | Term::Int(_) | Term::Var(_) => true,
            Term::Real(r) => r.is_integer(),
            _ => false,
        };
        if atomic {
            write!(f, "{}", self.child(t))
        } else {
            write!(f, "({})", self.child(t))
        }
    }
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Bool(b) => write!(f, "{b}"),
            Term::Int(i) => write!(f, "{i}"),
            Term::Real(r) => {
                if r.is_integer() {
                    write!(f, "{}.0", r.numer())
                } else {
                    write!(f, "{}", format_rational(r))
                }
            }
            Term::Var(v) => f.write_str(&(self.name)(*v)),
            Term::Not(a) => {
                f.write_str("not ")?;
                self.wrapped(a, f)
            }
            Term::Neg(a) => {
                f.write_str("-")?;
                self.wrapped(a, f)
            }
            Term::ToReal(a) => write!(f, "real({})", self.child(a)),
            Term::Floor(a) => write!(f, "floor({})", self.child(a)),
            Term::And(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" and ")?;
                    }
                    self.wrapped(x, f)?;
                }
                Ok(())
            }
            Term::Ite(c, a, b) => write!(f, "if {} then {} else {}", self.child(c), self.child(a), self.child(b)),
            Term::Bin(op, a, b) => {
                self.wrapped(a, f)?;
                write!(f, " {} ", op.symbol())?;
                self.wrapped(b, f)
            }
        }
    }
}

/// The scalar sort of a term, given the sorts of the variables.
pub fn sort_of(t: &Term, var_ty: &dyn Fn(VarId) -> Type) -> Type {
    match t {
        Term::Bool(_) | Term::Not(_) | Term::And(_) => Type::Bool,
        Term::Int(_) | Term::Floor(_) => Type::Int,
        Term::Real(_) | Term::ToReal(_) => Type::Real,
        Term::Var(v) => var_ty(*v),
        Term::Neg(a) => sort_of(a, var_ty),
        Term::Ite(_, a, _) => sort_of(a, var_ty),
        Term::Bin(op, a, _) => {
            if op.is_arith() {
                sort_of(a, var_ty)
            } else {
                Type::Bool
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding() {
        assert_eq!(Term::and([Term::Bool(true), Term::Var(0)]), Term::Var(0));
        assert_eq!(Term::and([Term::Var(1), Term::Bool(false)]), Term::Bool(false));
        assert_eq!(Term::and([]), Term::Bool(true));
        assert_eq!(Term::implies(Term::Bool(true), Term::Var(2)), Term::Var(2));
        assert_eq!(Term::not(Term::not(Term::Var(3))), Term::Var(3));
    }

    #[test]
    fn evaluation() {
        let vals = |v: VarId| Some(Value::int(v as i64 * 2));
        let t = Term::bin(BinOp::Lt, Term::Var(1), Term::bin(BinOp::Add, Term::Var(2), Term::Int(1.into())));
        assert_eq!(t.eval(&vals).unwrap(), Value::Bool(true));
        let r = Term::bin(
            BinOp::Div,
            Term::ToReal(Box::new(Term::Var(2))),
            Term::Real(BigRational::from_integer(3.into())),
        );
        assert_eq!(r.eval(&vals).unwrap(), Value::real(4, 3));
    }

    #[test]
    fn linearity() {
        let x = Term::Var(0);
        assert!(!Term::bin(BinOp::Mul, Term::Int(2.into()), x.clone()).is_nonlinear());
        assert!(Term::bin(BinOp::Mul, x.clone(), Term::Var(1)).is_nonlinear());
    }
}
