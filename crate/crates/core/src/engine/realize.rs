//! Bounded search for unrealizability witnesses.
//!
//! A witness of length `n + 1` is a run whose first `n` steps satisfy the
//! assumptions and guarantees, followed by a step `n` whose inputs satisfy
//! some valuation of the assumptions while no valuation of the remaining
//! variables satisfies the guarantees. The search first looks for a witness
//! that fixes only the boolean inputs of step `n` and works for every
//! assumption-satisfying choice of its numeric inputs; only when none
//! exists does it fix every input.

use std::time::Instant;

use crate::engine::config::CheckConfig;
use crate::engine::session::{SatResult, Session, SolverError};
use crate::engine::sexp::Sexp;
use crate::engine::smt::{bound_symbol, header, literal, logic, sort, Unroller};
use crate::engine::verdict::Verdict;
use crate::engine::{read_trace, replay};
use crate::ts::{Trace, TransitionSystem, VarId, VarKind};
use crate::value::{Type, Value};

pub struct RealizabilityQuery<'a> {
    pub ts: &'a TransitionSystem,
    pub inputs: &'a [VarId],
    pub assumption: VarId,
    pub guarantee: VarId,
    pub depth: usize,
}

pub fn check_realizability(q: &RealizabilityQuery, cfg: &CheckConfig) -> Verdict {
    let deadline = Instant::now() + cfg.timeout;
    for n in 0..=q.depth {
        match witness_at(q, n, cfg, deadline) {
            Ok(Some(v)) => return v,
            Ok(None) => {}
            Err(e) => return Verdict::unknown(e.to_string()),
        }
    }
    Verdict::NoWitnessUpTo { depth: q.depth }
}

/// Which variables of the last step are fixed by the witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Boolean inputs, state variables and the first-step flag.
    BooleanInputs,
    /// Every input, state variable and the first-step flag.
    AllInputs,
}

fn fixed(q: &RealizabilityQuery, mode: Mode, v: VarId) -> bool {
    match q.ts.vars[v].kind {
        VarKind::State | VarKind::Init => true,
        VarKind::Input if q.inputs.contains(&v) => mode == Mode::AllInputs || q.ts.vars[v].ty == Type::Bool,
        _ => false,
    }
}

/// Commands for the query of length `n + 1` in `mode`.
pub fn script(q: &RealizabilityQuery, n: usize) -> Vec<String> {
    query(q, n, Mode::AllInputs)
}

fn query(q: &RealizabilityQuery, n: usize, mode: Mode) -> Vec<String> {
    let ts = q.ts;
    let u = Unroller::new(ts);
    let mut cmds = header(&logic(ts, true));
    cmds.extend(u.unroll(n));
    for t in 0..n {
        cmds.push(u.assert_var(q.assumption, t, true));
        cmds.push(u.assert_var(q.guarantee, t, true));
    }
    cmds.extend(u.declare_only(n, |v| fixed(q, mode, v)));
    if n == 0 {
        cmds.push(u.initial(0));
    } else {
        cmds.extend(u.link(n - 1, n));
    }
    let name = |v: VarId| {
        if fixed(q, mode, v) {
            u.at(v, n)
        } else {
            bound_symbol(ts.name(v), n)
        }
    };
    let binders: Vec<String> = (0..ts.vars.len())
        .filter(|v| !fixed(q, mode, *v))
        .map(|v| format!("({} {})", name(v), sort(ts.ty(v))))
        .collect();
    let mut body = u.body_parts(&name);
    body.push(name(q.assumption));
    let body = format!("(and {})", body.join(" "));
    let g = name(q.guarantee);
    if binders.is_empty() {
        cmds.push(format!("(assert {body})"));
        cmds.push(format!("(assert (not {g}))"));
    } else {
        let binders = binders.join(" ");
        cmds.push(format!("(assert (exists ({binders}) {body}))"));
        cmds.push(format!("(assert (forall ({binders}) (=> {body} (not {g}))))"));
    }
    cmds
}

fn has_numeric_inputs(q: &RealizabilityQuery) -> bool {
    q.inputs.iter().any(|v| q.ts.vars[*v].ty != Type::Bool)
}

fn open(cfg: &CheckConfig, deadline: Instant) -> Result<Session, SolverError> {
    let mut s = Session::spawn(&cfg.solver)?;
    s.set_deadline(deadline);
    Ok(s)
}

/// Values of the free variables of step `n` in the current model.
fn fixed_values(
    s: &mut Session,
    q: &RealizabilityQuery,
    mode: Mode,
    n: usize,
) -> Result<Vec<(VarId, Sexp)>, SolverError> {
    let u = Unroller::new(q.ts);
    let vars: Vec<VarId> = (0..q.ts.vars.len()).filter(|v| fixed(q, mode, *v)).collect();
    let names: Vec<String> = vars.iter().map(|v| u.at(*v, n)).collect();
    Ok(vars.into_iter().zip(s.get_values(&names)?).collect())
}

fn witness_at(
    q: &RealizabilityQuery,
    n: usize,
    cfg: &CheckConfig,
    deadline: Instant,
) -> Result<Option<Verdict>, SolverError> {
    let u = Unroller::new(q.ts);
    let modes: &[Mode] = if has_numeric_inputs(q) {
        &[Mode::BooleanInputs, Mode::AllInputs]
    } else {
        &[Mode::AllInputs]
    };
    for &mode in modes {
        let mut s = open(cfg, deadline)?;
        s.commands(&query(q, n, mode))?;
        match s.check_sat()? {
            SatResult::Unsat => continue,
            SatResult::Unknown(r) => {
                return Ok(Some(Verdict::unknown(format!(
                    "solver cannot decide the quantified query at depth {n}: {r}"
                ))))
            }
            SatResult::Sat => {}
        }
        let prefix = if n == 0 {
            Trace::new(q.ts, Vec::new())
        } else {
            match read_trace(&mut s, &u, n) {
                Ok(t) => t,
                Err(e) => return Ok(Some(Verdict::unknown(format!("unreadable witness: {e}")))),
            }
        };
        let mut last = fixed_values(&mut s, q, mode, n)?;
        if mode == Mode::BooleanInputs {
            let mut pin = query(q, n, Mode::AllInputs);
            pin.extend(prefix_pins(&u, &prefix));
            pin.extend(last.iter().map(|(v, val)| format!("(assert (= {} {val}))", u.at(*v, n))));
            let mut s2 = open(cfg, deadline)?;
            s2.commands(&pin)?;
            if s2.check_sat()? != SatResult::Sat {
                return Ok(Some(Verdict::unknown("witness over boolean inputs has no concrete input")));
            }
            last = fixed_values(&mut s2, q, Mode::AllInputs, n)?;
        }
        return Ok(Some(complete(q, n, &prefix, &last, cfg, deadline)?));
    }
    Ok(None)
}

fn prefix_pins(u: &Unroller, prefix: &Trace) -> Vec<String> {
    let mut out = Vec::new();
    for (t, row) in prefix.steps.iter().enumerate() {
        for (v, val) in row.iter().enumerate() {
            out.push(format!("(assert (= {} {}))", u.at(v, t), literal(val)));
        }
    }
    out
}

/// Extends the prefix by a full last step: the fixed inputs, and some
/// valuation of the rest that satisfies the assumptions. The guarantees
/// must then be unsatisfiable on that step.
fn complete(
    q: &RealizabilityQuery,
    n: usize,
    prefix: &Trace,
    last: &[(VarId, Sexp)],
    cfg: &CheckConfig,
    deadline: Instant,
) -> Result<Verdict, SolverError> {
    let ts = q.ts;
    let u = Unroller::new(ts);
    let mut cmds = header(&logic(ts, false));
    cmds.extend(u.unroll(n + 1));
    cmds.extend(prefix_pins(&u, prefix));
    cmds.extend(last.iter().map(|(v, val)| format!("(assert (= {} {val}))", u.at(*v, n))));
    cmds.push(u.assert_var(q.assumption, n, true));
    let mut s = open(cfg, deadline)?;
    s.commands(&cmds)?;
    if s.check_sat()? != SatResult::Sat {
        return Ok(Verdict::unknown("witness inputs admit no assumption-satisfying step"));
    }
    let trace = match read_trace(&mut s, &u, n + 1) {
        Ok(t) => t,
        Err(e) => return Ok(Verdict::unknown(format!("unreadable witness: {e}"))),
    };
    s.push()?;
    s.command(&u.assert_var(q.guarantee, n, true))?;
    if s.check_sat()? != SatResult::Unsat {
        return Ok(Verdict::unknown("witness inputs admit a guarantee-satisfying output"));
    }
    if let Err(e) = replay(ts, &trace) {
        return Ok(Verdict::unknown(format!("witness failed replay: {e}")));
    }
    let (ai, gi) = (trace.index(ts.name(q.assumption)), trace.index(ts.name(q.guarantee)));
    let (ai, gi) = (ai.expect("assumption column"), gi.expect("guarantee column"));
    let ok = trace.steps.iter().all(|row| row[ai] == Value::Bool(true))
        && trace.steps[..n].iter().all(|row| row[gi] == Value::Bool(true));
    if !ok {
        return Ok(Verdict::unknown("witness prefix violates the contract"));
    }
    Ok(Verdict::UnrealizableWitness(trace))
}
