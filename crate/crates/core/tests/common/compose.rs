//! Random one-layer systems over small integer domains, and an exhaustive
//! bounded search for runs of their composition that violate
//! `H(parent assumptions) => parent guarantees`.
//!
//! A run of the composition assigns every parent input and every
//! subcomponent output freely on each step, subject to the connections.
//! A subcomponent is only constrained while its assumptions have held on
//! every step so far: then its guarantees hold.

use std::collections::{BTreeMap, HashSet};

use agv_core::lang::{eval_at, Expr, ExprKind, TraceStreams};
use agv_core::model::Labeled;
use agv_core::{Library, Type, Value};
use rand::seq::SliceRandom;
use rand::Rng;

/// Values enumerated for every free integer variable.
pub const INTS: [i64; 4] = [0, 1, 2, 3];

const CHILD_ASSUME: &[&str] = &[
    "x >= 0",
    "x <= 2",
    "x >= 0 and x <= 2",
    "x <> 1",
    "x >= 1",
    "true -> x >= pre(x)",
];

const CHILD_GUARANTEE: &[&str] = &[
    "y >= 0 and y <= 2",
    "y = x",
    "y <= x",
    "y >= x",
    "y = 2 - x",
    "y >= 0",
    "y <= 2",
    "y = (0 -> pre(y))",
    "true -> y >= pre(y)",
    "x >= 1 => y >= 1",
    "y = (if x > 1 then 2 else x)",
];

const PARENT_GUARANTEE: &[&str] = &[
    "o >= 0",
    "o <= 2",
    "o = i",
    "o <= i",
    "o >= i",
    "b => o >= 0",
    "true -> o >= pre(o)",
    "o <> 3",
    "o >= 0 and o <= 2",
];

/// Source text of a random parent `P` with implementation `P.impl` and two
/// or three subcomponents, possibly wired in a cycle.
pub fn random_system<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(2..=3);
    let mut out = String::new();
    for c in 1..=n {
        out.push_str(&format!("component C{c}\n  in x : int;\n  out y : int;\n"));
        if rng.gen_bool(0.7) {
            out.push_str(&format!("  assume \"a\" : {};\n", CHILD_ASSUME.choose(rng).unwrap()));
        }
        if rng.gen_bool(0.6) {
            out.push_str("  guarantee \"range\" : y >= 0 and y <= 2;\n");
        }
        for g in 0..rng.gen_range(1..=2) {
            out.push_str(&format!("  guarantee \"g{g}\" : {};\n", CHILD_GUARANTEE.choose(rng).unwrap()));
        }
        out.push_str("end\n\n");
    }
    out.push_str("component P\n  in i : int;\n  in b : bool;\n  out o : int;\n");
    out.push_str("  assume \"input range\" : 0 <= i and i <= 2;\n");
    if rng.gen_bool(0.3) {
        out.push_str("  assume \"flag\" : b => i >= 1;\n");
    }
    out.push_str(&format!("  guarantee \"g\" : {};\nend\n\n", PARENT_GUARANTEE.choose(rng).unwrap()));
    out.push_str("implementation P.impl\n  subcomponents\n");
    for c in 1..=n {
        out.push_str(&format!("    c{c} : C{c};\n"));
    }
    out.push_str("  connections\n");
    for c in 1..=n {
        let sources: Vec<String> = std::iter::once("i".to_string())
            .chain((1..=n).filter(|&d| d != c).map(|d| format!("c{d}.y")))
            .collect();
        out.push_str(&format!("    {} -> c{c}.x;\n", sources.choose(rng).unwrap()));
    }
    out.push_str(&format!("    c{}.y -> o;\nend\n", rng.gen_range(1..=n)));
    out
}

fn pre_ids(e: &Expr, inside: bool, out: &mut HashSet<String>) {
    match &e.kind {
        ExprKind::Id(p) if inside => {
            out.insert(p.joined());
        }
        ExprKind::Pre(a) => pre_ids(a, true, out),
        _ => e.for_each_child(|c| pre_ids(c, inside, out)),
    }
}

fn holds_all(items: &[Labeled], s: &TraceStreams, t: usize) -> Result<bool, String> {
    for l in items {
        match eval_at(&l.expr, t, s).map_err(|e| e.to_string())? {
            Value::Bool(true) => {}
            Value::Bool(false) => return Ok(false),
            v => return Err(format!("'{}' evaluates to {v}", l.label)),
        }
    }
    Ok(true)
}

#[derive(Clone)]
struct Node {
    history: Vec<BTreeMap<String, Value>>,
    /// Per subcomponent: its assumptions have held on every step so far.
    assumed: Vec<bool>,
}

/// Searches every run of the composition of `imp` up to `depth` steps for
/// a step where the parent assumptions have always held but a parent
/// guarantee fails. Returns the offending run.
pub fn formula_one_violation(lib: &Library, imp: &str, depth: usize) -> Result<Option<Vec<BTreeMap<String, Value>>>, String> {
    let imp = lib.impls.get(imp).ok_or("unknown implementation")?;
    let ty = &lib.types[&imp.type_name];
    if !imp.eqs.is_empty() || !imp.assertions.is_empty() || !ty.contract.eqs.is_empty() {
        return Err("equations and assertions are not supported".into());
    }
    let children: Vec<(String, agv_core::model::Contract)> = imp
        .subcomponents
        .iter()
        .map(|c| (c.name.clone(), lib.types[&c.type_name].contract.renamed(&c.name)))
        .collect();

    let mut free: Vec<(String, Type)> = ty.inputs().map(|p| (p.name.clone(), p.ty.clone())).collect();
    for c in &imp.subcomponents {
        for p in lib.types[&c.type_name].outputs() {
            free.push((format!("{}.{}", c.name, p.name), p.ty.clone()));
        }
    }
    let links: Vec<(String, String)> = imp.connections.iter().map(|c| (c.dst.clone(), c.src.clone())).collect();

    let mut under_pre = HashSet::new();
    let mut statements: Vec<&Labeled> = ty.contract.assumptions.iter().chain(&ty.contract.guarantees).collect();
    for (_, c) in &children {
        statements.extend(c.assumptions.iter().chain(&c.guarantees));
    }
    for l in &statements {
        pre_ids(&l.expr, false, &mut under_pre);
    }
    let mut under_pre: Vec<String> = under_pre.into_iter().collect();
    under_pre.sort();

    let mut valuations: Vec<BTreeMap<String, Value>> = vec![lib.consts.clone()];
    for (name, ty) in &free {
        let dom: Vec<Value> = match ty {
            Type::Bool => vec![Value::Bool(false), Value::Bool(true)],
            Type::Int => INTS.iter().map(|&i| Value::int(i)).collect(),
            other => return Err(format!("unsupported type {other}")),
        };
        valuations = valuations
            .into_iter()
            .flat_map(|v| {
                dom.iter().map(move |d| {
                    let mut next = v.clone();
                    next.insert(name.clone(), d.clone());
                    next
                })
            })
            .collect();
    }
    for v in &mut valuations {
        for (dst, src) in &links {
            let val = v.get(src).cloned().ok_or_else(|| format!("connection source '{src}' is not free"))?;
            v.insert(dst.clone(), val);
        }
    }

    let mut frontier = vec![Node {
        history: Vec::new(),
        assumed: vec![true; children.len()],
    }];
    for t in 0..depth {
        let mut next = Vec::new();
        let mut seen = HashSet::new();
        for node in &frontier {
            for cur in &valuations {
                let mut steps: Vec<BTreeMap<String, Value>> = node.history.last().cloned().into_iter().collect();
                steps.push(cur.clone());
                let at = steps.len() - 1;
                let s = TraceStreams::new(steps);
                if !holds_all(&ty.contract.assumptions, &s, at)? {
                    continue;
                }
                let mut assumed = node.assumed.clone();
                let mut behaves = true;
                for (i, (_, c)) in children.iter().enumerate() {
                    assumed[i] = assumed[i] && holds_all(&c.assumptions, &s, at)?;
                    if assumed[i] && !holds_all(&c.guarantees, &s, at)? {
                        behaves = false;
                        break;
                    }
                }
                if !behaves {
                    continue;
                }
                let mut history = node.history.clone();
                history.push(cur.clone());
                if !holds_all(&ty.contract.guarantees, &s, at)? {
                    return Ok(Some(history));
                }
                if t + 1 < depth {
                    let key: (Vec<Option<Value>>, Vec<bool>) =
                        (under_pre.iter().map(|n| cur.get(n).cloned()).collect(), assumed.clone());
                    if seen.insert(key) {
                        next.push(Node { history, assumed });
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(None)
}
