//! Bounded model checking interleaved with k-induction.

use std::time::Instant;

use crate::engine::config::CheckConfig;
use crate::engine::session::{SatResult, Session, SolverError};
use crate::engine::smt::{header, logic, Unroller};
use crate::engine::verdict::Verdict;
use crate::engine::{read_trace, replay};
use crate::ts::{TransitionSystem, VarId};
use crate::value::Value;

/// Checks that `property` holds on every reachable step of `ts`.
/// `invariants` are streams already known to hold on every reachable step;
/// they strengthen the inductive step.
pub fn check_invariant(ts: &TransitionSystem, property: VarId, invariants: &[VarId], cfg: &CheckConfig) -> Verdict {
    match run(ts, property, invariants, cfg) {
        Ok(v) => v,
        Err(e) => Verdict::unknown(e.to_string()),
    }
}

fn open(ts: &TransitionSystem, cfg: &CheckConfig, deadline: Instant) -> Result<Session, SolverError> {
    let mut s = Session::spawn(&cfg.solver)?;
    s.set_deadline(deadline);
    s.commands(&header(&logic(ts, false)))?;
    Ok(s)
}

fn run(ts: &TransitionSystem, property: VarId, invariants: &[VarId], cfg: &CheckConfig) -> Result<Verdict, SolverError> {
    let deadline = Instant::now() + cfg.timeout;
    let u = Unroller::new(ts);
    let mut base = open(ts, cfg, deadline)?;
    base.commands(&u.unroll(1))?;

    // The inductive step is unrolled backwards: position 0 is the newest
    // step, where the property fails, and position i + 1 precedes i.
    let mut step = Some(open(ts, cfg, deadline)?);
    if let Some(s) = step.as_mut() {
        let mut cmds = u.declare(0);
        cmds.extend(u.body(0));
        cmds.extend(invariants.iter().map(|v| u.assert_var(*v, 0, true)));
        s.commands(&cmds)?;
    }
    let mut step_unknown: Option<String> = None;

    let last = cfg.max_k.max(cfg.bmc_depth.saturating_sub(1));
    for k in 0..=last {
        if k > 0 {
            let mut cmds = u.declare(k);
            cmds.extend(u.body(k));
            cmds.extend(u.link(k - 1, k));
            cmds.push(u.assert_var(property, k - 1, true));
            base.commands(&cmds)?;
        }
        base.push()?;
        base.command(&u.assert_var(property, k, false))?;
        match base.check_sat()? {
            SatResult::Sat => {
                let trace = match read_trace(&mut base, &u, k + 1) {
                    Ok(t) => t,
                    Err(e) => return Ok(Verdict::unknown(format!("unreadable counterexample: {e}"))),
                };
                if let Err(e) = replay(ts, &trace) {
                    return Ok(Verdict::unknown(format!("counterexample failed replay: {e}")));
                }
                let pi = trace.index(ts.name(property)).expect("property column");
                if trace.steps[k][pi] != Value::Bool(false) {
                    return Ok(Verdict::unknown("counterexample does not violate the property"));
                }
                return Ok(Verdict::Falsified(trace));
            }
            SatResult::Unsat => base.pop()?,
            SatResult::Unknown(r) => return Ok(Verdict::unknown(format!("solver returned unknown: {r}"))),
        }

        if k > cfg.max_k {
            continue;
        }
        let Some(s) = step.as_mut() else { continue };
        if k > 0 {
            let mut cmds = u.declare(k);
            cmds.extend(u.body(k));
            for &(p, y) in &ts.pre_links {
                cmds.push(format!("(assert (= {} {}))", u.at(p, k - 1), u.at(y, k)));
            }
            cmds.push(u.assert_var(ts.init(), k - 1, false));
            cmds.push(u.assert_var(property, k, true));
            cmds.extend(invariants.iter().map(|v| u.assert_var(*v, k, true)));
            s.commands(&cmds)?;
        }
        s.push()?;
        s.command(&u.assert_var(property, 0, false))?;
        match s.check_sat()? {
            SatResult::Unsat => return Ok(Verdict::Proved { k }),
            SatResult::Sat => s.pop()?,
            SatResult::Unknown(r) => {
                step_unknown = Some(r);
                step = None;
            }
        }
    }
    let why = match step_unknown {
        Some(r) => format!("inductive step returned unknown ({r}); no counterexample up to depth {}", last + 1),
        None => format!(
            "not {}-inductive; no counterexample up to depth {}",
            cfg.max_k,
            last + 1
        ),
    };
    Ok(Verdict::unknown(why))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::ast::BinOp;
    use crate::ts::{Term, VarKind};
    use crate::value::Type;
    use num_bigint::BigInt;

    fn int(i: i64) -> Term {
        Term::Int(BigInt::from(i))
    }

    /// `count = 0 -> pre(count) + 1` and a property `op(count, n)`.
    fn counter(op: BinOp, n: i64) -> (TransitionSystem, VarId) {
        let mut ts = TransitionSystem::new();
        let c = ts.declare("count", Type::Int, VarKind::Defined).unwrap();
        let p = ts.pre(c);
        let init = ts.init();
        ts.define(c, Term::ite(Term::Var(init), int(0), Term::bin(BinOp::Add, Term::Var(p), int(1))))
            .unwrap();
        let prop = ts.name_term("prop", Term::bin(op, Term::Var(c), int(n)), Type::Bool);
        ts.finish().unwrap();
        (ts, prop)
    }

    #[test]
    fn counter_is_nonnegative_by_one_induction() {
        let (ts, p) = counter(BinOp::Ge, 0);
        assert_eq!(check_invariant(&ts, p, &[], &CheckConfig::default()), Verdict::Proved { k: 1 });
    }

    #[test]
    fn counter_reaches_three() {
        let (ts, p) = counter(BinOp::Ne, 3);
        let Verdict::Falsified(t) = check_invariant(&ts, p, &[], &CheckConfig::default()) else {
            panic!("expected a counterexample")
        };
        assert_eq!(t.len(), 4);
        assert_eq!(t.value("count", 3), Some(&Value::int(3)));
    }

    #[test]
    fn true_is_zero_inductive() {
        let mut ts = TransitionSystem::new();
        let p = ts.name_term("prop", Term::Bool(true), Type::Bool);
        ts.finish().unwrap();
        assert_eq!(check_invariant(&ts, p, &[], &CheckConfig::default()), Verdict::Proved { k: 0 });
    }

    #[test]
    fn invariants_strengthen_the_step() {
        let mut ts = TransitionSystem::new();
        let c = ts.declare("count", Type::Int, VarKind::Defined).unwrap();
        let p = ts.pre(c);
        let init = ts.init();
        ts.define(c, Term::ite(Term::Var(init), int(0), Term::bin(BinOp::Add, Term::Var(p), int(1))))
            .unwrap();
        let inv = ts.name_term("inv", Term::bin(BinOp::Ge, Term::Var(c), int(0)), Type::Bool);
        let prop = ts.name_term("prop", Term::bin(BinOp::Ne, Term::Var(c), int(-1)), Type::Bool);
        ts.finish().unwrap();
        let cfg = CheckConfig {
            max_k: 3,
            bmc_depth: 4,
            ..CheckConfig::default()
        };
        assert!(check_invariant(&ts, prop, &[], &cfg).is_unknown());
        assert_eq!(check_invariant(&ts, prop, &[inv], &cfg), Verdict::Proved { k: 0 });
    }

    #[test]
    fn missing_solver_is_unknown() {
        let (ts, p) = counter(BinOp::Ge, 0);
        let cfg = CheckConfig {
            solver: vec!["/nonexistent/solver".into()],
            ..CheckConfig::default()
        };
        assert!(check_invariant(&ts, p, &[], &cfg).is_unknown());
    }
}
