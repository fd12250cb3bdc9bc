//! Compiling one parent/children layer of the instance tree.

use crate::lang::ast::Direction;
use crate::model::{EqDef, Library, SubcomponentOrder};
use crate::ts::lower::Lowerer;
use crate::ts::system::{StreamRole, TransitionSystem, VarKind};
use crate::ts::term::{Term, VarId};

/// The streams of one component's contract inside a layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractStreams {
    /// Subcomponent name, or the type name for the parent.
    pub component: String,
    pub assumptions: Vec<(String, VarId)>,
    pub guarantees: Vec<(String, VarId)>,
}

/// One parent with the contracts of its direct subcomponents.
#[derive(Debug, Clone)]
pub struct Layer {
    pub type_name: String,
    pub impl_name: Option<String>,
    pub ts: TransitionSystem,
    pub parent: ContractStreams,
    /// In declaration order.
    pub children: Vec<ContractStreams>,
    pub order: SubcomponentOrder,
    pub assertions: Vec<(String, VarId)>,
    pub lemmas: Vec<(String, VarId)>,
    /// Scalar leaves of the parent's input ports.
    pub inputs: Vec<VarId>,
}

impl Layer {
    pub fn child(&self, name: &str) -> Option<&ContractStreams> {
        self.children.iter().find(|c| c.component == name)
    }
}

/// Compiles component type `type_name`, with the implementation
/// `impl_name` when given. Without an implementation only the type's ports,
/// equations and contract are compiled.
pub fn compile_layer(lib: &Library, type_name: &str, impl_name: Option<&str>) -> Result<Layer, String> {
    let ty = lib.types.get(type_name).ok_or_else(|| format!("unknown component '{type_name}'"))?;
    let imp = match impl_name {
        Some(i) => Some(lib.impls.get(i).ok_or_else(|| format!("unknown implementation '{i}'"))?),
        None => None,
    };
    let mut ts = TransitionSystem::new();
    let mut lw = Lowerer::new(&mut ts, lib);

    let mut inputs = Vec::new();
    for p in &ty.ports {
        let vs = lw.declare(&p.name, &p.ty, VarKind::Input)?;
        if p.dir == Direction::In {
            inputs.extend(vs);
        }
    }
    let mut eqs: Vec<EqDef> = ty.contract.eqs.clone();
    let mut children = Vec::new();
    if let Some(imp) = imp {
        eqs.extend(imp.eqs.iter().cloned());
        for s in &imp.subcomponents {
            let sty = &lib.types[&s.type_name];
            for p in &sty.ports {
                lw.declare(&format!("{}.{}", s.name, p.name), &p.ty, VarKind::Input)?;
            }
            let renamed = sty.contract.renamed(&s.name);
            eqs.extend(renamed.eqs.iter().cloned());
            children.push((s.name.clone(), renamed));
        }
    }
    for eq in &eqs {
        let kind = if eq.def.is_some() { VarKind::Defined } else { VarKind::Input };
        for (v, t) in &eq.vars {
            lw.declare(v, t, kind)?;
        }
    }
    for eq in &eqs {
        let Some(def) = &eq.def else { continue };
        let values = lw.definition(def, eq.vars.len())?;
        for ((v, t), val) in eq.vars.iter().zip(values) {
            for (var, term) in lw.leaves_of(v, t)?.into_iter().zip(val) {
                lw.ts.define(var, term)?;
            }
        }
    }

    let streams = |lw: &mut Lowerer, items: &[crate::model::Labeled], role: StreamRole, owner: &str| {
        let mut out = Vec::new();
        for l in items {
            let t = lw.scalar(&l.expr)?;
            let prefix = match role {
                StreamRole::Assumption => "assume",
                StreamRole::Guarantee => "guarantee",
                StreamRole::Assertion => "assert",
                StreamRole::Lemma => "lemma",
                StreamRole::Property => "prop",
            };
            let v = lw.ts.name_term(prefix, t, crate::value::Type::Bool);
            lw.ts.add_stream(&l.label, role, owner, v);
            out.push((l.label.clone(), v));
        }
        Ok::<_, String>(out)
    };

    let parent = ContractStreams {
        component: type_name.to_string(),
        assumptions: streams(&mut lw, &ty.contract.assumptions, StreamRole::Assumption, "")?,
        guarantees: streams(&mut lw, &ty.contract.guarantees, StreamRole::Guarantee, "")?,
    };
    let mut child_streams = Vec::new();
    for (name, c) in &children {
        child_streams.push(ContractStreams {
            component: name.clone(),
            assumptions: streams(&mut lw, &c.assumptions, StreamRole::Assumption, name)?,
            guarantees: streams(&mut lw, &c.guarantees, StreamRole::Guarantee, name)?,
        });
    }
    let mut assertions = Vec::new();
    let mut lemmas = Vec::new();
    let mut order = SubcomponentOrder {
        order: Vec::new(),
        sccs: Vec::new(),
    };
    if let Some(imp) = imp {
        for c in &imp.connections {
            let src = lw.leaves_of(&c.src, &c.ty)?;
            let dst = lw.leaves_of(&c.dst, &c.ty)?;
            let eq = Term::and(src.into_iter().zip(dst).map(|(s, d)| Term::eq(Term::Var(d), Term::Var(s))));
            lw.ts.constrain(&format!("{} = {}", c.dst, c.src), eq);
        }
        assertions = streams(&mut lw, &imp.assertions, StreamRole::Assertion, "")?;
        for (label, v) in &assertions {
            lw.ts.constrain(label, Term::Var(*v));
        }
        lemmas = streams(&mut lw, &imp.lemmas, StreamRole::Lemma, "")?;
        order = crate::model::order_subcomponents(imp);
    }
    ts.finish()?;
    Ok(Layer {
        type_name: type_name.to_string(),
        impl_name: impl_name.map(str::to_string),
        ts,
        parent,
        children: child_streams,
        order,
        assertions,
        lemmas,
        inputs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::load_sources;
    use crate::value::Value;
    use std::collections::BTreeMap;

    fn lib(src: &str) -> Library {
        load_sources(&[("t.agv".into(), src.into())]).unwrap()
    }

    #[test]
    fn counter_has_one_state_variable() {
        let l = lib("component C out count : int; eq c : int = 0 -> pre(c) + 1; guarantee \"g\" : count = c; end");
        let layer = compile_layer(&l, "C", None).unwrap();
        assert_eq!(layer.ts.count(VarKind::State), 1);
        let c = layer.ts.var("c").unwrap();
        let rows = layer.ts.simulate(&vec![BTreeMap::new(); 4]).unwrap();
        let vals: Vec<Value> = rows.iter().map(|r| r[c].clone()).collect();
        assert_eq!(vals, [Value::int(0), Value::int(1), Value::int(2), Value::int(3)]);
    }

    #[test]
    fn no_temporal_operators_means_no_state() {
        let l = lib("component C in x : int; out y : int; guarantee \"g\" : y = 2 * x; end");
        let layer = compile_layer(&l, "C", None).unwrap();
        assert_eq!(layer.ts.count(VarKind::State), 0);
        assert_eq!(layer.ts.count(VarKind::Init), 1);
        assert_eq!(layer.inputs.len(), 1);
    }

    #[test]
    fn floor_is_the_greatest_integer_below() {
        let l = lib("component C in x : real; out y : int; eq f : int = floor(x); end");
        let layer = compile_layer(&l, "C", None).unwrap();
        let x = layer.ts.var("x").unwrap();
        let f = layer.ts.var("f").unwrap();
        let rows = layer
            .ts
            .simulate(&[BTreeMap::from([(x, Value::real(37, 10))])])
            .unwrap();
        assert_eq!(rows[0][f], Value::int(3));
        assert_eq!(layer.ts.violated_constraint(&rows[0]).unwrap(), None);
    }

    #[test]
    fn nodes_are_inlined_per_call() {
        let l = lib("node acc(x : int) returns (s : int); let s = x -> pre(s) + x; tel
component C in a : int; out y : int; eq p : int = acc(a); eq q : int = acc(1); end");
        let layer = compile_layer(&l, "C", None).unwrap();
        assert!(layer.ts.var("acc~0.s").is_some());
        assert!(layer.ts.var("acc~1.s").is_some());
        let a = layer.ts.var("a").unwrap();
        let q = layer.ts.var("q").unwrap();
        let p = layer.ts.var("p").unwrap();
        let free: Vec<_> = [5, 7].iter().map(|v| BTreeMap::from([(a, Value::int(*v))])).collect();
        let rows = layer.ts.simulate(&free).unwrap();
        assert_eq!(rows[1][p], Value::int(12));
        assert_eq!(rows[1][q], Value::int(2));
    }

    #[test]
    fn records_are_flattened() {
        let l = lib("record P { x : int; y : bool; }
component C in a : P; out b : P; guarantee \"g\" : b = a { x := a.x + 1 }; end");
        let layer = compile_layer(&l, "C", None).unwrap();
        assert!(layer.ts.var("a.x").is_some());
        assert!(layer.ts.var("b.y").is_some());
        assert_eq!(layer.inputs.len(), 2);
    }

    #[test]
    fn layer_contains_children_and_connections() {
        let l = lib("component A in x : int; out y : int; assume \"pos\" : x > 0; guarantee \"g\" : y > x; end
component S in x : int; out y : int; guarantee \"top\" : y > 0; end
implementation S.impl subcomponents a : A; connections x -> a.x; a.y -> y; assert y >= 0; end");
        let layer = compile_layer(&l, "S", Some("S.impl")).unwrap();
        assert_eq!(layer.children.len(), 1);
        assert_eq!(layer.child("a").unwrap().assumptions.len(), 1);
        assert_eq!(layer.assertions.len(), 1);
        assert_eq!(layer.ts.constraints.len(), 3);
    }
}
