//! Component types, implementations and the instantiated system tree.

mod instance;
mod loader;
mod order;

use std::collections::BTreeMap;
use std::fmt::Write as _;

pub use instance::{instantiate, InstanceNode, SystemInstance};
pub use loader::{load_sources, load_system, LoadError};
pub use order::{order_subcomponents, SubcomponentOrder};

use crate::diag::{Diagnostic, Span};
use crate::lang::ast::{Direction, Expr, NodeDef, Path};
use crate::lang::pretty::node_to_string;
use crate::lang::types::{NodeSig, RecordDef, TypeEnv};
use crate::value::{Type, Value};

/// A named boolean contract statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeled {
    pub label: String,
    pub expr: Expr,
    pub span: Span,
}

/// `eq a : T, b : U [= e];`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqDef {
    pub vars: Vec<(String, Type)>,
    pub def: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Contract {
    pub assumptions: Vec<Labeled>,
    pub guarantees: Vec<Labeled>,
    pub eqs: Vec<EqDef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Port {
    pub name: String,
    pub dir: Direction,
    pub ty: Type,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentType {
    pub name: String,
    pub ports: Vec<Port>,
    pub contract: Contract,
    pub file: String,
    pub span: Span,
}

impl ComponentType {
    pub fn inputs(&self) -> impl Iterator<Item = &Port> {
        self.ports.iter().filter(|p| p.dir == Direction::In)
    }

    pub fn outputs(&self) -> impl Iterator<Item = &Port> {
        self.ports.iter().filter(|p| p.dir == Direction::Out)
    }

    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subcomponent {
    pub name: String,
    pub type_name: String,
    /// Set when the classifier names an implementation (`FCC.impl`).
    pub impl_name: Option<String>,
    pub span: Span,
}

/// `src -> dst`, both as flattened variable names of the parent scope
/// (`x` for a parent port, `sub.p` for a subcomponent port).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connection {
    pub src: String,
    pub dst: String,
    pub ty: Type,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentImpl {
    pub name: String,
    pub type_name: String,
    pub subcomponents: Vec<Subcomponent>,
    pub connections: Vec<Connection>,
    pub assertions: Vec<Labeled>,
    pub lemmas: Vec<Labeled>,
    pub eqs: Vec<EqDef>,
    pub file: String,
    pub span: Span,
}

/// Everything declared by a set of system description files.
#[derive(Debug, Clone, Default)]
pub struct Library {
    pub records: BTreeMap<String, RecordDef>,
    pub consts: BTreeMap<String, Value>,
    /// All nodes, typechecked. Node names are global.
    pub nodes: BTreeMap<String, NodeDef>,
    pub types: BTreeMap<String, ComponentType>,
    pub impls: BTreeMap<String, ComponentImpl>,
    pub warnings: Vec<Diagnostic>,
    pub files: Vec<String>,
}

impl Library {
    pub fn node_sigs(&self) -> BTreeMap<String, NodeSig> {
        let env = self.base_env_without_nodes();
        self.nodes
            .iter()
            .map(|(name, n)| {
                let conv = |ps: &[crate::lang::ast::Param]| {
                    ps.iter()
                        .map(|p| env.type_of_name(&p.ty).unwrap_or(Type::Bool))
                        .collect()
                };
                (
                    name.clone(),
                    NodeSig {
                        inputs: conv(&n.inputs),
                        outputs: conv(&n.outputs),
                    },
                )
            })
            .collect()
    }

    fn base_env_without_nodes(&self) -> TypeEnv {
        TypeEnv {
            records: self.records.clone(),
            consts: self.consts.clone(),
            ..TypeEnv::default()
        }
    }

    /// Environment with records, constants and nodes but no variables.
    pub fn base_env(&self) -> TypeEnv {
        let mut env = self.base_env_without_nodes();
        env.nodes = self.node_sigs();
        env
    }

    /// Scope of a component type's contract: its ports and eq variables.
    pub fn type_env(&self, ty: &ComponentType) -> TypeEnv {
        let mut env = self.base_env();
        add_type_scope(&mut env, ty, "");
        env
    }

    /// Scope of an implementation: the parent type's scope, the
    /// implementation's own eq variables and every subcomponent's ports and
    /// eq variables under `sub.`.
    pub fn impl_env(&self, imp: &ComponentImpl) -> TypeEnv {
        let mut env = self.base_env();
        if let Some(ty) = self.types.get(&imp.type_name) {
            add_type_scope(&mut env, ty, "");
        }
        for eq in &imp.eqs {
            for (v, t) in &eq.vars {
                env.vars.insert(v.clone(), t.clone());
            }
        }
        for sub in &imp.subcomponents {
            if let Some(ty) = self.types.get(&sub.type_name) {
                add_type_scope(&mut env, ty, &format!("{}.", sub.name));
            }
        }
        env
    }

    /// Scalar leaves of a type: `("", Int)` for scalars, one entry per
    /// (nested) field for records, with `.field` suffixes.
    pub fn leaves(&self, ty: &Type) -> Vec<(String, Type)> {
        match ty {
            Type::Record(r) => {
                let mut out = Vec::new();
                if let Some(def) = self.records.get(r) {
                    for (f, ft) in &def.fields {
                        for (suffix, lt) in self.leaves(ft) {
                            out.push((format!(".{f}{suffix}"), lt));
                        }
                    }
                }
                out
            }
            t => vec![(String::new(), t.clone())],
        }
    }

    /// Deterministic textual rendering of the library.
    pub fn elaborate(&self) -> String {
        let mut out = String::new();
        for r in self.records.values() {
            let fields: Vec<String> = r.fields.iter().map(|(f, t)| format!("{f} : {t}")).collect();
            let _ = writeln!(out, "record {} {{ {} }}", r.name, fields.join("; "));
        }
        for (c, v) in &self.consts {
            let _ = writeln!(out, "const {c} = {v}");
        }
        for n in self.nodes.values() {
            out.push_str(&node_to_string(n, ""));
        }
        for t in self.types.values() {
            let _ = writeln!(out, "component {}", t.name);
            for p in &t.ports {
                let dir = if p.dir == Direction::In { "in" } else { "out" };
                let _ = writeln!(out, "  {dir} {} : {}", p.name, p.ty);
            }
            write_contract(&mut out, &t.contract);
        }
        for i in self.impls.values() {
            let _ = writeln!(out, "implementation {}", i.name);
            for s in &i.subcomponents {
                let cls = s.impl_name.clone().unwrap_or_else(|| s.type_name.clone());
                let _ = writeln!(out, "  sub {} : {}", s.name, cls);
            }
            for c in &i.connections {
                let _ = writeln!(out, "  connect {} = {} : {}", c.dst, c.src, c.ty);
            }
            for eq in &i.eqs {
                write_eq(&mut out, eq);
            }
            for a in &i.assertions {
                let _ = writeln!(out, "  assert {}", a.expr);
            }
            for l in &i.lemmas {
                let _ = writeln!(out, "  lemma \"{}\" : {}", l.label, l.expr);
            }
        }
        out
    }
}

fn write_eq(out: &mut String, eq: &EqDef) {
    let vars: Vec<String> = eq.vars.iter().map(|(v, t)| format!("{v} : {t}")).collect();
    match &eq.def {
        Some(d) => {
            let _ = writeln!(out, "  eq {} = {}", vars.join(", "), d);
        }
        None => {
            let _ = writeln!(out, "  eq {}", vars.join(", "));
        }
    }
}

fn write_contract(out: &mut String, c: &Contract) {
    for eq in &c.eqs {
        write_eq(out, eq);
    }
    for a in &c.assumptions {
        let _ = writeln!(out, "  assume \"{}\" : {}", a.label, a.expr);
    }
    for g in &c.guarantees {
        let _ = writeln!(out, "  guarantee \"{}\" : {}", g.label, g.expr);
    }
}

fn add_type_scope(env: &mut TypeEnv, ty: &ComponentType, prefix: &str) {
    for p in &ty.ports {
        env.vars.insert(format!("{prefix}{}", p.name), p.ty.clone());
    }
    for eq in &ty.contract.eqs {
        for (v, t) in &eq.vars {
            env.vars.insert(format!("{prefix}{v}"), t.clone());
        }
    }
}

/// Rewrites every variable of `e` into the namespace of subcomponent
/// `prefix`.
pub fn prefix_expr(e: &Expr, prefix: &str) -> Expr {
    e.map_ids(&|p: &Path| {
        let mut parts = vec![prefix.to_string()];
        parts.extend(p.0.iter().cloned());
        Path(parts)
    })
}

impl Contract {
    /// The contract as seen from the parent, with all variables under
    /// `prefix.`.
    pub fn renamed(&self, prefix: &str) -> Contract {
        let lab = |l: &Labeled| Labeled {
            label: l.label.clone(),
            expr: prefix_expr(&l.expr, prefix),
            span: l.span,
        };
        Contract {
            assumptions: self.assumptions.iter().map(lab).collect(),
            guarantees: self.guarantees.iter().map(lab).collect(),
            eqs: self
                .eqs
                .iter()
                .map(|eq| EqDef {
                    vars: eq
                        .vars
                        .iter()
                        .map(|(v, t)| (format!("{prefix}.{v}"), t.clone()))
                        .collect(),
                    def: eq.def.as_ref().map(|d| prefix_expr(d, prefix)),
                    span: eq.span,
                })
                .collect(),
        }
    }
}
