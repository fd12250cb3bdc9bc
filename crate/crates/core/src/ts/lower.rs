//! Lowering typechecked expressions into transition-system terms.
//!
//! Records are flattened into one scalar per leaf field, `pre` becomes a
//! state variable, the arrow selects on the first-step flag, `floor`
//! becomes a constrained integer and node calls are inlined with fresh
//! variables `node~n.x`.

use std::collections::BTreeMap;

use crate::lang::ast::{BinOp, Expr, ExprKind, NodeDef, UnOp};
use crate::model::Library;
use crate::ts::system::{TransitionSystem, VarKind};
use crate::ts::term::{Term, VarId};
use crate::value::Type;

/// Leaves of the value bound to a name inside an inlined node.
struct Binding {
    ty: Type,
    leaves: Vec<Term>,
}

type Frame = BTreeMap<String, Binding>;

pub struct Lowerer<'a> {
    pub ts: &'a mut TransitionSystem,
    lib: &'a Library,
    depth: usize,
}

const MAX_INLINE_DEPTH: usize = 64;

impl<'a> Lowerer<'a> {
    pub fn new(ts: &'a mut TransitionSystem, lib: &'a Library) -> Lowerer<'a> {
        Lowerer { ts, lib, depth: 0 }
    }

    /// Declares one variable per scalar leaf of `ty` under `name`.
    pub fn declare(&mut self, name: &str, ty: &Type, kind: VarKind) -> Result<Vec<VarId>, String> {
        self.lib
            .leaves(ty)
            .into_iter()
            .map(|(suffix, lt)| self.ts.declare(&format!("{name}{suffix}"), lt, kind))
            .collect()
    }

    /// The leaf variables of the global name `name` of type `ty`.
    pub fn leaves_of(&self, name: &str, ty: &Type) -> Result<Vec<VarId>, String> {
        self.lib
            .leaves(ty)
            .into_iter()
            .map(|(suffix, _)| {
                let full = format!("{name}{suffix}");
                self.ts.var(&full).ok_or_else(|| format!("unbound variable '{full}'"))
            })
            .collect()
    }

    /// Lowers a scalar expression.
    pub fn scalar(&mut self, e: &Expr) -> Result<Term, String> {
        let mut ls = self.expr(e, None)?;
        if ls.len() != 1 {
            return Err(format!("expected a scalar expression: {e}"));
        }
        Ok(ls.pop().unwrap())
    }

    /// Lowers an expression of any type into its leaves.
    pub fn leaves(&mut self, e: &Expr) -> Result<Vec<Term>, String> {
        self.expr(e, None)
    }

    /// Lowers the right-hand side of an equation defining `n` values.
    pub fn definition(&mut self, e: &Expr, n: usize) -> Result<Vec<Vec<Term>>, String> {
        self.definition_in(e, n, None)
    }

    fn definition_in(&mut self, e: &Expr, n: usize, frame: Option<&Frame>) -> Result<Vec<Vec<Term>>, String> {
        if n == 1 {
            return Ok(vec![self.expr(e, frame)?]);
        }
        match &e.kind {
            ExprKind::Call { node, args } => self.call(&node.joined(), args, frame),
            _ => Err(format!("expected a node call defining {n} values: {e}")),
        }
    }

    fn ty_of(e: &Expr) -> Result<&Type, String> {
        e.ty.as_ref().ok_or_else(|| format!("expression '{e}' has not been typechecked"))
    }

    fn expr(&mut self, e: &Expr, frame: Option<&Frame>) -> Result<Vec<Term>, String> {
        Ok(match &e.kind {
            ExprKind::Bool(b) => vec![Term::Bool(*b)],
            ExprKind::Int(i) => vec![Term::Int(i.clone())],
            ExprKind::Real(r) => vec![Term::Real(r.clone())],
            ExprKind::Id(path) => {
                let ty = Self::ty_of(e)?;
                match frame {
                    None => self.leaves_of(&path.joined(), ty)?.into_iter().map(Term::Var).collect(),
                    Some(fr) => {
                        let b = fr.get(&path.0[0]).ok_or_else(|| format!("unbound name '{}' in node", path.0[0]))?;
                        let prefix: String = path.0[1..].iter().map(|f| format!(".{f}")).collect();
                        self.lib
                            .leaves(&b.ty)
                            .into_iter()
                            .zip(&b.leaves)
                            .filter(|((s, _), _)| {
                                s.starts_with(&prefix) && (s.len() == prefix.len() || s[prefix.len()..].starts_with('.'))
                            })
                            .map(|(_, t)| t.clone())
                            .collect()
                    }
                }
            }
            ExprKind::Unary(op, a) => {
                let t = self.scalar_in(a, frame)?;
                vec![match op {
                    UnOp::Not => Term::not(t),
                    UnOp::Neg => match t {
                        Term::Int(i) => Term::Int(-i),
                        Term::Real(r) => Term::Real(-r),
                        t => Term::Neg(Box::new(t)),
                    },
                }]
            }
            ExprKind::Binary(op, a, b) => {
                let xs = self.expr(a, frame)?;
                let ys = self.expr(b, frame)?;
                match op {
                    BinOp::Eq | BinOp::Ne if xs.len() != 1 => {
                        let all = Term::and(xs.into_iter().zip(ys).map(|(x, y)| Term::eq(x, y)));
                        vec![if *op == BinOp::Eq { all } else { Term::not(all) }]
                    }
                    BinOp::And => vec![Term::and([one(xs), one(ys)])],
                    BinOp::Or => vec![Term::or(one(xs), one(ys))],
                    BinOp::Implies => vec![Term::implies(one(xs), one(ys))],
                    _ => vec![Term::bin(*op, one(xs), one(ys))],
                }
            }
            ExprKind::Ite(c, a, b) => {
                let c = self.scalar_in(c, frame)?;
                let xs = self.expr(a, frame)?;
                let ys = self.expr(b, frame)?;
                xs.into_iter().zip(ys).map(|(x, y)| Term::ite(c.clone(), x, y)).collect()
            }
            ExprKind::Pre(a) => {
                let xs = self.expr(a, frame)?;
                let tys: Vec<Type> = self.lib.leaves(Self::ty_of(a)?).into_iter().map(|(_, t)| t).collect();
                xs.into_iter()
                    .zip(tys)
                    .map(|(x, ty)| {
                        let y = self.ts.name_term("aux", x, ty);
                        Term::Var(self.ts.pre(y))
                    })
                    .collect()
            }
            ExprKind::Arrow(a, b) => {
                let xs = self.expr(a, frame)?;
                let ys = self.expr(b, frame)?;
                let init = Term::Var(self.ts.init());
                xs.into_iter().zip(ys).map(|(x, y)| Term::ite(init.clone(), x, y)).collect()
            }
            ExprKind::Floor(a) => {
                let x = self.scalar_in(a, frame)?;
                let i = self.ts.fresh("floor", Type::Int, VarKind::Defined);
                self.ts.define(i, Term::Floor(Box::new(x.clone())))?;
                let ri = Term::ToReal(Box::new(Term::Var(i)));
                let one = Term::Real(num_rational::BigRational::from_integer(1.into()));
                let lo = Term::bin(BinOp::Le, ri.clone(), x.clone());
                let hi = Term::bin(BinOp::Lt, x, Term::bin(BinOp::Add, ri, one));
                self.ts.constrain(&format!("floor definition of {}", self.ts.name(i)), Term::and([lo, hi]));
                vec![Term::Var(i)]
            }
            ExprKind::ToReal(a) => {
                let x = self.scalar_in(a, frame)?;
                vec![match x {
                    Term::Int(i) => Term::Real(num_rational::BigRational::from_integer(i)),
                    x => Term::ToReal(Box::new(x)),
                }]
            }
            ExprKind::RecordUpdate { base, field, value } => {
                let bs = self.expr(base, frame)?;
                let vs = self.expr(value, frame)?;
                let prefix = format!(".{field}");
                let mut vs = vs.into_iter();
                self.lib
                    .leaves(Self::ty_of(base)?)
                    .into_iter()
                    .zip(bs)
                    .map(|((s, _), b)| {
                        if s == prefix || s.starts_with(&format!("{prefix}.")) {
                            vs.next().unwrap_or(b)
                        } else {
                            b
                        }
                    })
                    .collect()
            }
            ExprKind::Call { node, args } => {
                let mut outs = self.call(&node.joined(), args, frame)?;
                if outs.len() != 1 {
                    return Err(format!("node '{node}' returns {} values in a single-value position", outs.len()));
                }
                outs.pop().unwrap()
            }
        })
    }

    fn scalar_in(&mut self, e: &Expr, frame: Option<&Frame>) -> Result<Term, String> {
        Ok(one(self.expr(e, frame)?))
    }

    /// Inlines one call; returns the leaves of every output.
    fn call(&mut self, name: &str, args: &[Expr], frame: Option<&Frame>) -> Result<Vec<Vec<Term>>, String> {
        let node: NodeDef = self
            .lib
            .nodes
            .get(name)
            .cloned()
            .ok_or_else(|| format!("unknown node '{name}'"))?;
        if self.depth >= MAX_INLINE_DEPTH {
            return Err(format!("node '{name}' cannot be inlined: nesting too deep"));
        }
        if args.len() != node.inputs.len() {
            return Err(format!("node '{name}' expects {} arguments", node.inputs.len()));
        }
        let env = self.lib.base_env();
        let mut inner: Frame = BTreeMap::new();
        for (p, a) in node.inputs.iter().zip(args) {
            let ty = env.type_of_name(&p.ty)?;
            let leaves = self.expr(a, frame)?;
            inner.insert(p.name.clone(), Binding { ty, leaves });
        }
        let instance = self.ts.next_index(name);
        let prefix = format!("{name}~{instance}.");
        let mut outputs_vars = Vec::new();
        let mut defined: BTreeMap<String, Vec<VarId>> = BTreeMap::new();
        for (is_output, p) in node.outputs.iter().map(|p| (true, p)).chain(node.locals.iter().map(|p| (false, p))) {
            let ty = env.type_of_name(&p.ty)?;
            let vs = self.declare(&format!("{prefix}{}", p.name), &ty, VarKind::Defined)?;
            inner.insert(
                p.name.clone(),
                Binding {
                    ty,
                    leaves: vs.iter().map(|v| Term::Var(*v)).collect(),
                },
            );
            if is_output {
                outputs_vars.push(vs.clone());
            }
            defined.insert(p.name.clone(), vs);
        }
        self.depth += 1;
        for eq in &node.equations {
            let values = self.definition_in(&eq.rhs, eq.lhs.len(), Some(&inner))?;
            for (l, val) in eq.lhs.iter().zip(values) {
                let vars = &defined[l];
                for (v, t) in vars.iter().zip(val) {
                    self.ts.define(*v, t)?;
                }
            }
        }
        self.depth -= 1;
        Ok(outputs_vars
            .into_iter()
            .map(|vs| vs.into_iter().map(Term::Var).collect())
            .collect())
    }
}

fn one(mut xs: Vec<Term>) -> Term {
    debug_assert_eq!(xs.len(), 1);
    xs.pop().unwrap_or(Term::Bool(true))
}
