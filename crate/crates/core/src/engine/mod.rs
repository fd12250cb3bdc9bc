//! Discharging proof obligations with an external SMT-LIB v2 solver.
//!
//! Invariants are checked by bounded model checking interleaved with
//! k-induction, consistency by a bounded satisfiability query and
//! realizability by a bounded search over quantified queries. Every
//! obligation owns its solver processes, so obligations run in parallel.

mod config;
mod kind;
mod realize;
mod sat;
pub mod session;
pub mod sexp;
pub mod smt;
mod verdict;

use std::time::{Duration, Instant};

use rayon::prelude::*;

pub use crate::ts::Trace;
pub use config::{default_solver, split_command, CheckConfig, DEFAULT_SOLVER, SOLVER_ENV};
pub use kind::check_invariant;
pub use realize::{check_realizability, RealizabilityQuery};
pub use sat::check_satisfiable;
pub use verdict::Verdict;

use crate::ts::{ProofObligation, Query, TransitionSystem};
use session::Session;
use smt::Unroller;

/// Reads every variable on steps `0..len` from the current model.
pub(crate) fn read_trace(s: &mut Session, u: &Unroller, len: usize) -> Result<Trace, String> {
    let ts = u.ts;
    let n = ts.vars.len();
    let names: Vec<String> = (0..len).flat_map(|t| (0..n).map(move |v| u.at(v, t))).collect();
    let values = s.get_values(&names).map_err(|e| e.to_string())?;
    let mut steps = Vec::with_capacity(len);
    for t in 0..len {
        let mut row = Vec::with_capacity(n);
        for v in 0..n {
            let raw = &values[t * n + v];
            let val = sexp::to_value(raw, ts.ty(v))
                .ok_or_else(|| format!("cannot read value '{raw}' of '{}'", ts.name(v)))?;
            row.push(val);
        }
        steps.push(row);
    }
    Ok(Trace::new(ts, steps))
}

/// Re-executes a trace against the system before it is reported.
pub(crate) fn replay(ts: &TransitionSystem, trace: &Trace) -> Result<(), String> {
    ts.validate_trace(trace)
}

/// Discharges one obligation.
pub fn check(ob: &ProofObligation, cfg: &CheckConfig) -> Verdict {
    let ts = &ob.ts;
    match &ob.query {
        Query::Invariant { property, invariants } => check_invariant(ts, *property, invariants, cfg),
        Query::Satisfiable { constraint, depth } => check_satisfiable(ts, *constraint, *depth, cfg),
        Query::Realizable {
            inputs,
            assumption,
            guarantee,
            depth,
        } => check_realizability(
            &RealizabilityQuery {
                ts,
                inputs,
                assumption: *assumption,
                guarantee: *guarantee,
                depth: *depth,
            },
            cfg,
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub verdict: Verdict,
    pub time: Duration,
}

/// Discharges `obs` with at most `cfg.jobs` running at once. Results come
/// back in the order of `obs`.
pub fn check_all(obs: &[ProofObligation], cfg: &CheckConfig) -> Vec<Outcome> {
    let one = |ob: &ProofObligation| {
        let start = Instant::now();
        let verdict = check(ob, cfg);
        tracing::debug!(obligation = %ob.name, verdict = %verdict, "checked");
        Outcome {
            verdict,
            time: start.elapsed(),
        }
    };
    if cfg.jobs <= 1 || obs.len() <= 1 {
        return obs.iter().map(one).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build() {
        Ok(pool) => pool.install(|| obs.par_iter().map(one).collect()),
        Err(_) => obs.iter().map(one).collect(),
    }
}

/// A standalone SMT-LIB script for `ob`: for an invariant, the search for a
/// counterexample of length `depth`; for consistency, the satisfiability
/// query of its depth; for realizability, the witness query of length
/// `depth`.
pub fn dump_smt(ob: &ProofObligation, depth: usize) -> String {
    let ts = &ob.ts;
    let mut cmds = match &ob.query {
        Query::Invariant { property, .. } => {
            let len = depth.max(1);
            let u = Unroller::new(ts);
            let mut cmds = smt::header(&smt::logic(ts, false));
            cmds.extend(u.unroll(len));
            cmds.extend((0..len - 1).map(|t| u.assert_var(*property, t, true)));
            cmds.push(u.assert_var(*property, len - 1, false));
            cmds
        }
        Query::Satisfiable { constraint, depth } => sat::script(ts, *constraint, (*depth).max(1)),
        Query::Realizable {
            inputs,
            assumption,
            guarantee,
            ..
        } => realize::script(
            &RealizabilityQuery {
                ts,
                inputs,
                assumption: *assumption,
                guarantee: *guarantee,
                depth,
            },
            depth.saturating_sub(1),
        ),
    };
    cmds.insert(0, format!("; {}", ob.name));
    cmds.push("(check-sat)".into());
    let mut out = cmds.join("\n");
    out.push('\n');
    out
}
