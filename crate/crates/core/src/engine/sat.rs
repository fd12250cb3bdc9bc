//! Bounded satisfiability of a constraint stream.

use std::time::Instant;

use crate::engine::config::CheckConfig;
use crate::engine::session::{SatResult, Session, SolverError};
use crate::engine::smt::{header, logic, Unroller};
use crate::engine::verdict::Verdict;
use crate::engine::{read_trace, replay};
use crate::ts::{TransitionSystem, VarId};
use crate::value::Value;

/// Searches for a run of `depth` steps (at least one) on which
/// `constraint` holds throughout.
pub fn check_satisfiable(ts: &TransitionSystem, constraint: VarId, depth: usize, cfg: &CheckConfig) -> Verdict {
    match run(ts, constraint, depth.max(1), cfg) {
        Ok(v) => v,
        Err(e) => Verdict::unknown(e.to_string()),
    }
}

/// Commands asserting a run of `depth` steps satisfying `constraint`.
pub fn script(ts: &TransitionSystem, constraint: VarId, depth: usize) -> Vec<String> {
    let u = Unroller::new(ts);
    let mut cmds = header(&logic(ts, false));
    cmds.extend(u.unroll(depth));
    cmds.extend((0..depth).map(|t| u.assert_var(constraint, t, true)));
    cmds
}

fn run(ts: &TransitionSystem, constraint: VarId, depth: usize, cfg: &CheckConfig) -> Result<Verdict, SolverError> {
    let mut s = Session::spawn(&cfg.solver)?;
    s.set_deadline(Instant::now() + cfg.timeout);
    s.commands(&script(ts, constraint, depth))?;
    match s.check_sat()? {
        SatResult::Unsat => Ok(Verdict::Inconsistent { depth }),
        SatResult::Unknown(r) => Ok(Verdict::unknown(format!("solver returned unknown: {r}"))),
        SatResult::Sat => {
            let u = Unroller::new(ts);
            let trace = match read_trace(&mut s, &u, depth) {
                Ok(t) => t,
                Err(e) => return Ok(Verdict::unknown(format!("unreadable witness: {e}"))),
            };
            if let Err(e) = replay(ts, &trace) {
                return Ok(Verdict::unknown(format!("witness failed replay: {e}")));
            }
            let ci = trace.index(ts.name(constraint)).expect("constraint column");
            if trace.steps.iter().any(|row| row[ci] != Value::Bool(true)) {
                return Ok(Verdict::unknown("witness violates the contract"));
            }
            Ok(Verdict::ConsistentWitness(trace))
        }
    }
}
