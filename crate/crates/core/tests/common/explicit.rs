//! Random finite-domain transition systems and an explicit-state
//! reachability oracle for their invariants.
//!
//! Integer inputs are constrained to `0..=BOUND` and every integer state
//! variable is clamped into that range, so enumerating `0..=BOUND` covers
//! every reachable state. State variables read `pre` only under a
//! first-step guard, so the free values of `pre` on step 0 never matter.

use std::collections::HashSet;

use agv_core::lang::ast::BinOp;
use agv_core::ts::{default_value, Term, TransitionSystem, VarId, VarKind};
use agv_core::{Trace, Type, Value};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

pub const BOUND: i64 = 3;

pub struct RandomTs {
    pub ts: TransitionSystem,
    pub property: VarId,
}

fn int(v: i64) -> Term {
    Term::Int(BigInt::from(v))
}

fn var(v: VarId) -> Term {
    Term::Var(v)
}

fn pick<T: Clone, R: Rng>(rng: &mut R, xs: &[T]) -> T {
    xs.choose(rng).expect("non-empty choice").clone()
}

/// Keeps `t` within `0..=BOUND`, saturating or wrapping to 0.
fn clamp<R: Rng>(rng: &mut R, t: Term) -> Term {
    let high = if rng.gen_bool(0.5) { int(BOUND) } else { int(0) };
    Term::ite(
        Term::bin(BinOp::Gt, t.clone(), int(BOUND)),
        high,
        Term::ite(Term::bin(BinOp::Lt, t.clone(), int(0)), int(0), t),
    )
}

fn cmp_atom<R: Rng>(rng: &mut R, a: Term) -> Term {
    let op = pick(rng, &[BinOp::Le, BinOp::Lt, BinOp::Ge, BinOp::Ne, BinOp::Eq]);
    Term::bin(op, a, int(rng.gen_range(0..=BOUND)))
}

pub fn random_ts<R: Rng>(rng: &mut R) -> RandomTs {
    let mut ts = TransitionSystem::new();
    let init = ts.init();
    let bools: Vec<VarId> = (0..rng.gen_range(1..=2))
        .map(|k| ts.declare(&format!("in_b{k}"), Type::Bool, VarKind::Input).unwrap())
        .collect();
    let ints: Vec<VarId> = (0..rng.gen_range(0..=1))
        .map(|k| ts.declare(&format!("in_i{k}"), Type::Int, VarKind::Input).unwrap())
        .collect();
    for &i in &ints {
        let range = Term::and([Term::bin(BinOp::Ge, var(i), int(0)), Term::bin(BinOp::Le, var(i), int(BOUND))]);
        let label = format!("{} in range", ts.name(i));
        ts.constrain(&label, range);
    }
    let counters: Vec<VarId> = (0..rng.gen_range(1..=2))
        .map(|k| ts.declare(&format!("s{k}"), Type::Int, VarKind::Defined).unwrap())
        .collect();
    let flags: Vec<VarId> = (0..rng.gen_range(0..=1))
        .map(|k| ts.declare(&format!("f{k}"), Type::Bool, VarKind::Defined).unwrap())
        .collect();
    let pre_counters: Vec<VarId> = counters.iter().map(|&c| ts.pre(c)).collect();
    let pre_flags: Vec<VarId> = flags.iter().map(|&f| ts.pre(f)).collect();

    for &c in &counters {
        let p = var(pick(rng, &pre_counters));
        let b = var(pick(rng, &bools));
        let step = match rng.gen_range(0..7) {
            0 => Term::bin(BinOp::Add, p, int(1)),
            1 => Term::bin(BinOp::Sub, p, int(1)),
            2 if !ints.is_empty() => Term::bin(BinOp::Add, p, var(ints[0])),
            3 => Term::ite(b, Term::bin(BinOp::Add, p.clone(), int(1)), p),
            4 => Term::ite(b, int(0), p),
            5 if !ints.is_empty() => Term::ite(b, var(ints[0]), p),
            _ => Term::bin(BinOp::Add, p, var(pick(rng, &pre_counters))),
        };
        let step = clamp(rng, step);
        let def = Term::ite(var(init), int(rng.gen_range(0..=BOUND)), step);
        ts.define(c, def).unwrap();
    }
    for &f in &flags {
        let p = var(pick(rng, &pre_flags));
        let b = var(pick(rng, &bools));
        let step = match rng.gen_range(0..5) {
            0 => Term::not(p),
            1 => Term::or(p, b),
            2 => Term::and([p, b]),
            3 => {
                let c = var(pick(rng, &pre_counters));
                cmp_atom(rng, c)
            }
            _ => p,
        };
        ts.define(f, Term::ite(var(init), Term::Bool(rng.gen_bool(0.5)), step)).unwrap();
    }

    let mut atoms: Vec<Term> = Vec::new();
    for &c in &counters {
        atoms.push(cmp_atom(rng, var(c)));
    }
    if counters.len() > 1 {
        atoms.push(Term::bin(BinOp::Ne, var(counters[0]), var(counters[1])));
        atoms.push(Term::bin(BinOp::Le, var(counters[0]), var(counters[1])));
    }
    atoms.extend(flags.iter().map(|&f| var(f)));
    atoms.extend(flags.iter().map(|&f| Term::not(var(f))));
    atoms.extend(bools.iter().map(|&b| var(b)));
    let a = pick(rng, &atoms);
    let body = match rng.gen_range(0..4) {
        0 => a,
        1 => Term::or(a, pick(rng, &atoms)),
        2 => Term::implies(a, pick(rng, &atoms)),
        _ => Term::and([a, pick(rng, &atoms)]),
    };
    let property = ts.declare("p", Type::Bool, VarKind::Defined).unwrap();
    ts.define(property, body).unwrap();
    if rng.gen_bool(0.3) {
        let (b, s) = (var(pick(rng, &bools)), var(pick(rng, &counters)));
        let c = Term::not(Term::and([b, cmp_atom(rng, s)]));
        ts.constrain("environment", c);
    }
    ts.finish().unwrap();
    RandomTs { ts, property }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expected {
    Holds,
    /// Shortest counterexample ends on this step.
    ViolatedAt(usize),
}

fn domain(ty: &Type) -> Vec<Value> {
    match ty {
        Type::Bool => vec![Value::Bool(false), Value::Bool(true)],
        _ => (0..=BOUND).map(Value::int).collect(),
    }
}

fn input_valuations(ts: &TransitionSystem) -> Vec<Vec<(VarId, Value)>> {
    let mut out: Vec<Vec<(VarId, Value)>> = vec![Vec::new()];
    for (v, d) in ts.vars.iter().enumerate() {
        if d.kind != VarKind::Input {
            continue;
        }
        out = out
            .into_iter()
            .flat_map(|partial| {
                domain(&d.ty).into_iter().map(move |val| {
                    let mut next = partial.clone();
                    next.push((v, val));
                    next
                })
            })
            .collect();
    }
    out
}

/// Computes one step from the values of the `pre` variables (in the order
/// of `pre_links`) and of the inputs.
pub fn step_row(ts: &TransitionSystem, first: bool, pre: &[Value], inputs: &[(VarId, Value)]) -> Vec<Value> {
    let mut row: Vec<Option<Value>> = vec![None; ts.vars.len()];
    row[ts.init()] = Some(Value::Bool(first));
    for (v, val) in inputs {
        row[*v] = Some(val.clone());
    }
    for (i, &(p, _)) in ts.pre_links.iter().enumerate() {
        row[p] = Some(pre[i].clone());
    }
    for &v in ts.def_order() {
        let val = ts.defs[v].as_ref().unwrap().eval(&|w| row[w].clone()).expect("well-typed random system");
        row[v] = Some(val);
    }
    row.into_iter().map(|x| x.expect("every variable valued")).collect()
}

fn state_of(ts: &TransitionSystem, row: &[Value]) -> Vec<Value> {
    ts.pre_links.iter().map(|&(_, y)| row[y].clone()).collect()
}

/// Breadth-first exploration of every reachable state.
pub fn explore(ts: &TransitionSystem, property: VarId) -> Expected {
    let inputs = input_valuations(ts);
    let mut seen: HashSet<Vec<Value>> = HashSet::new();
    let initial: Vec<Value> = ts.pre_links.iter().map(|&(p, _)| default_value(ts.ty(p))).collect();
    let mut frontier: Vec<(bool, Vec<Value>)> = vec![(true, initial)];
    let mut depth = 0;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (first, pre) in &frontier {
            for inp in &inputs {
                let row = step_row(ts, *first, pre, inp);
                if ts.violated_constraint(&row).unwrap().is_some() {
                    continue;
                }
                if row[property] != Value::Bool(true) {
                    return Expected::ViolatedAt(depth);
                }
                let s = state_of(ts, &row);
                if seen.insert(s.clone()) {
                    next.push((false, s));
                }
            }
        }
        frontier = next;
        depth += 1;
    }
    Expected::Holds
}

/// Re-executes the inputs of `trace`, starting from its step-0 values of
/// the `pre` variables, and compares every value.
pub fn resimulate(ts: &TransitionSystem, trace: &Trace) -> Result<(), String> {
    let mut pre: Vec<Value> = match trace.steps.first() {
        Some(row) => ts.pre_links.iter().map(|&(p, _)| row[p].clone()).collect(),
        None => return Err("empty trace".into()),
    };
    for (t, row) in trace.steps.iter().enumerate() {
        let inputs: Vec<(VarId, Value)> = ts
            .vars
            .iter()
            .enumerate()
            .filter(|(_, d)| d.kind == VarKind::Input)
            .map(|(v, _)| (v, row[v].clone()))
            .collect();
        let again = step_row(ts, t == 0, &pre, &inputs);
        if let Some(bad) = (0..row.len()).find(|&v| again[v] != row[v]) {
            return Err(format!("step {t}: '{}' is {} but re-executes to {}", ts.name(bad), row[bad], again[bad]));
        }
        if let Some(i) = ts.violated_constraint(row).map_err(|e| e.to_string())? {
            return Err(format!("step {t}: constraint '{}' fails", ts.constraints[i].label));
        }
        pre = state_of(ts, row);
    }
    Ok(())
}
