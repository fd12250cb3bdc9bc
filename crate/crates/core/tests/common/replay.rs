//! Replays counterexamples of layer obligations through the expression
//! interpreter, against the source contracts rather than the lowered
//! transition system.

use std::collections::BTreeMap;

use agv_core::analyses::{LayerResult, ObligationResult};
use agv_core::lang::{eval_at, Expr, TraceStreams};
use agv_core::model::{Contract, Labeled};
use agv_core::ts::{is_internal, ObligationKind};
use agv_core::{Library, Trace, Value};

pub fn streams(lib: &Library, trace: &Trace) -> TraceStreams {
    let mut steps = Vec::with_capacity(trace.len());
    for t in 0..trace.len() {
        let mut row: BTreeMap<String, Value> = lib.consts.clone();
        for (i, name) in trace.vars.iter().map(|(n, _)| n).enumerate() {
            if !is_internal(name) {
                row.insert(name.clone(), trace.steps[t][i].clone());
            }
        }
        steps.push(row);
    }
    let mut s = TraceStreams::new(steps);
    for n in lib.nodes.values() {
        s = s.with_node(n.clone());
    }
    s
}

fn holds(e: &Expr, t: usize, s: &TraceStreams) -> Result<bool, String> {
    match eval_at(e, t, s).map_err(|err| format!("step {t}: {err}"))? {
        Value::Bool(b) => Ok(b),
        v => Err(format!("step {t}: contract statement evaluates to {v}")),
    }
}

fn all_hold(items: &[Labeled], t: usize, s: &TraceStreams) -> Result<bool, String> {
    for l in items {
        if !holds(&l.expr, t, s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn require(items: &[Labeled], steps: std::ops::Range<usize>, s: &TraceStreams, what: &str) -> Result<(), String> {
    for t in steps {
        for l in items {
            if !holds(&l.expr, t, s)? {
                return Err(format!("{what} '{}' fails on step {t}", l.label));
            }
        }
    }
    Ok(())
}

/// Checks that `ob`, reported falsified with `trace` in `layer`, is really
/// violated by the trace: connections, equations and assertions hold on
/// every step, the antecedent of the obligation holds and its conclusion
/// fails on the last step.
pub fn replay_counterexample(lib: &Library, layer: &LayerResult, ob: &ObligationResult, trace: &Trace) -> Result<(), String> {
    let imp = lib
        .impls
        .get(&layer.implementation)
        .ok_or_else(|| format!("unknown implementation '{}'", layer.implementation))?;
    let ty = &lib.types[&imp.type_name];
    let s = streams(lib, trace);
    let n = trace.len();
    if n == 0 {
        return Err("empty trace".into());
    }
    let last = n - 1;
    let children: Vec<(String, Contract)> = imp
        .subcomponents
        .iter()
        .map(|c| (c.name.clone(), lib.types[&c.type_name].contract.renamed(&c.name)))
        .collect();

    let column = |name: &str| trace.index(name);
    for c in &imp.connections {
        let dsts: Vec<&String> = trace
            .vars
            .iter()
            .map(|(v, _)| v)
            .filter(|v| *v == &c.dst || v.starts_with(&format!("{}.", c.dst)))
            .collect();
        if dsts.is_empty() {
            return Err(format!("trace has no column for '{}'", c.dst));
        }
        for d in dsts {
            let src = format!("{}{}", c.src, &d[c.dst.len()..]);
            let (di, si) = (column(d).unwrap(), column(&src).ok_or(format!("trace has no column for '{src}'"))?);
            for t in 0..n {
                if trace.steps[t][di] != trace.steps[t][si] {
                    return Err(format!("step {t}: connection {} -> {} does not hold", c.src, c.dst));
                }
            }
        }
    }

    let mut eqs = ty.contract.eqs.clone();
    eqs.extend(imp.eqs.iter().cloned());
    for (_, c) in &children {
        eqs.extend(c.eqs.iter().cloned());
    }
    for eq in &eqs {
        let (Some(def), [(var, _)]) = (&eq.def, eq.vars.as_slice()) else { continue };
        let Some(i) = column(var) else { continue };
        for t in 0..n {
            let v = eval_at(def, t, &s).map_err(|e| format!("step {t}: {e}"))?;
            if v != trace.steps[t][i] {
                return Err(format!("step {t}: '{var}' is {} but its equation gives {v}", trace.steps[t][i]));
            }
        }
    }
    require(&imp.assertions, 0..n, &s, "assertion")?;
    require(&ty.contract.assumptions, 0..n, &s, "parent assumption")?;

    match &ob.kind {
        ObligationKind::Assumption { subcomponent } => {
            let rank = layer.order.iter().position(|c| c == subcomponent).ok_or("subcomponent not ordered")?;
            for (name, c) in &children {
                let before = layer.order[..rank].contains(name);
                let upto = if before { n } else { last };
                require(&c.guarantees, 0..upto, &s, &format!("guarantee of {name}"))?;
            }
            let (_, c) = children.iter().find(|(nm, _)| nm == subcomponent).ok_or("unknown subcomponent")?;
            if all_hold(&c.assumptions, last, &s)? {
                return Err(format!("assumptions of {subcomponent} hold on the last step"));
            }
        }
        ObligationKind::Guarantee | ObligationKind::Lemma { .. } => {
            for (name, c) in &children {
                require(&c.guarantees, 0..n, &s, &format!("guarantee of {name}"))?;
            }
            let conclusion: Vec<Labeled> = match &ob.kind {
                ObligationKind::Lemma { label } => imp.lemmas.iter().filter(|l| &l.label == label).cloned().collect(),
                _ => ty.contract.guarantees.clone(),
            };
            if all_hold(&conclusion, last, &s)? {
                return Err("the conclusion holds on the last step".into());
            }
        }
        other => return Err(format!("not a layer obligation: {}", other.tag())),
    }
    Ok(())
}
