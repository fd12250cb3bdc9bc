//! Flat synchronous transition systems over scalar variables.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::lang::interp::EvalError;
use crate::ts::term::{Term, VarId};
use crate::ts::trace::Trace;
use crate::value::{Type, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    /// Unconstrained except by the constraints of the system.
    Input,
    /// Equal to its defining term at every step.
    Defined,
    /// Carries the previous value of another variable; free on step 0.
    State,
    /// The first-step flag: true on step 0 only.
    Init,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub ty: Type,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StreamRole {
    Assumption,
    Guarantee,
    Assertion,
    Lemma,
    Property,
}

/// A boolean stream with a meaning in the source contract.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedStream {
    pub label: String,
    pub role: StreamRole,
    /// Instance path of the component the statement belongs to.
    pub owner: String,
    pub var: VarId,
}

/// A step constraint that must hold on every step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub label: String,
    pub term: Term,
}

#[derive(Debug, Clone, Default)]
pub struct TransitionSystem {
    pub vars: Vec<VarDecl>,
    /// Defining term of each `Defined` variable.
    pub defs: Vec<Option<Term>>,
    /// `(p, y)`: `p` holds the previous value of `y` from step 1 on.
    pub pre_links: Vec<(VarId, VarId)>,
    pub constraints: Vec<Constraint>,
    pub streams: Vec<NamedStream>,
    init: Option<VarId>,
    names: HashMap<String, VarId>,
    counters: BTreeMap<String, usize>,
    pre_cache: HashMap<VarId, VarId>,
    h_cache: HashMap<VarId, VarId>,
    z_cache: HashMap<VarId, VarId>,
    def_order: Vec<VarId>,
}

impl TransitionSystem {
    pub fn new() -> TransitionSystem {
        let mut ts = TransitionSystem::default();
        let init = ts.push_var("~init", Type::Bool, VarKind::Init);
        ts.init = Some(init);
        ts
    }

    pub fn init(&self) -> VarId {
        self.init.expect("transition system without init flag")
    }

    pub fn var(&self, name: &str) -> Option<VarId> {
        self.names.get(name).copied()
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.vars[v].name
    }

    pub fn ty(&self, v: VarId) -> &Type {
        &self.vars[v].ty
    }

    fn push_var(&mut self, name: &str, ty: Type, kind: VarKind) -> VarId {
        let id = self.vars.len();
        self.vars.push(VarDecl {
            name: name.to_string(),
            ty,
            kind,
        });
        self.defs.push(None);
        self.names.insert(name.to_string(), id);
        id
    }

    /// Declares a named variable. Fails when the name is taken.
    pub fn declare(&mut self, name: &str, ty: Type, kind: VarKind) -> Result<VarId, String> {
        if self.names.contains_key(name) {
            return Err(format!("variable '{name}' declared twice"));
        }
        Ok(self.push_var(name, ty, kind))
    }

    /// Declares a variable named `prefix~n` with a per-prefix counter.
    pub fn fresh(&mut self, prefix: &str, ty: Type, kind: VarKind) -> VarId {
        let n = self.next_index(prefix);
        self.push_var(&format!("{prefix}~{n}"), ty, kind)
    }

    /// Next value of the deterministic counter for `prefix`.
    pub fn next_index(&mut self, prefix: &str) -> usize {
        let n = self.counters.entry(prefix.to_string()).or_insert(0);
        *n += 1;
        *n - 1
    }

    /// Sets the defining term of a `Defined` variable.
    pub fn define(&mut self, v: VarId, t: Term) -> Result<(), String> {
        if self.vars[v].kind != VarKind::Defined {
            return Err(format!("'{}' is not a defined variable", self.vars[v].name));
        }
        if self.defs[v].is_some() {
            return Err(format!("'{}' defined twice", self.vars[v].name));
        }
        self.defs[v] = Some(t);
        Ok(())
    }

    /// A variable equal to `t`: `t` itself when it already is one.
    pub fn name_term(&mut self, prefix: &str, t: Term, ty: Type) -> VarId {
        if let Term::Var(v) = t {
            return v;
        }
        let v = self.fresh(prefix, ty, VarKind::Defined);
        self.defs[v] = Some(t);
        v
    }

    /// State variable holding the previous value of `y`.
    pub fn pre(&mut self, y: VarId) -> VarId {
        if let Some(p) = self.pre_cache.get(&y) {
            return *p;
        }
        let p = self.fresh("pre", self.vars[y].ty.clone(), VarKind::State);
        self.pre_links.push((p, y));
        self.pre_cache.insert(y, p);
        p
    }

    /// `H(x)`: true while `x` has held on every step so far.
    pub fn historically(&mut self, x: VarId) -> VarId {
        if let Some(h) = self.h_cache.get(&x) {
            return *h;
        }
        let h = self.fresh("H", Type::Bool, VarKind::Defined);
        let ph = self.pre(h);
        let init = self.init();
        self.defs[h] = Some(Term::and([Term::Var(x), Term::or(Term::Var(init), Term::Var(ph))]));
        self.h_cache.insert(x, h);
        h
    }

    /// `Z(x)`: true on step 0, afterwards the previous value of `x`.
    pub fn z(&mut self, x: VarId) -> VarId {
        if let Some(z) = self.z_cache.get(&x) {
            return *z;
        }
        let px = self.pre(x);
        let init = self.init();
        let z = self.fresh("Z", Type::Bool, VarKind::Defined);
        self.defs[z] = Some(Term::or(Term::Var(init), Term::Var(px)));
        self.z_cache.insert(x, z);
        z
    }

    pub fn constrain(&mut self, label: &str, term: Term) {
        if term != Term::Bool(true) {
            self.constraints.push(Constraint {
                label: label.to_string(),
                term,
            });
        }
    }

    pub fn add_stream(&mut self, label: &str, role: StreamRole, owner: &str, var: VarId) {
        self.streams.push(NamedStream {
            label: label.to_string(),
            role,
            owner: owner.to_string(),
            var,
        });
    }

    /// Checks that every defined variable has a definition and computes an
    /// evaluation order for the definitions.
    pub fn finish(&mut self) -> Result<(), String> {
        for (v, d) in self.vars.iter().zip(&self.defs) {
            if v.kind == VarKind::Defined && d.is_none() {
                return Err(format!("'{}' has no definition", v.name));
            }
        }
        let n = self.vars.len();
        let mut deps: Vec<Vec<VarId>> = vec![Vec::new(); n];
        for (v, d) in self.defs.iter().enumerate() {
            if let Some(t) = d {
                let mut vs = Vec::new();
                t.vars(&mut vs);
                vs.retain(|w| self.defs[*w].is_some());
                deps[v] = vs;
            }
        }
        let mut state = vec![0u8; n];
        let mut order = Vec::new();
        for root in 0..n {
            if self.defs[root].is_none() || state[root] == 2 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            state[root] = 1;
            while let Some((v, i)) = stack.pop() {
                if i < deps[v].len() {
                    stack.push((v, i + 1));
                    let w = deps[v][i];
                    match state[w] {
                        0 => {
                            state[w] = 1;
                            stack.push((w, 0));
                        }
                        1 => {
                            return Err(format!(
                                "algebraic loop through '{}' and '{}'",
                                self.vars[v].name, self.vars[w].name
                            ))
                        }
                        _ => {}
                    }
                } else {
                    state[v] = 2;
                    order.push(v);
                }
            }
        }
        self.def_order = order;
        Ok(())
    }

    /// Defined variables in an order where every definition only reads
    /// variables that come earlier or are not defined.
    pub fn def_order(&self) -> &[VarId] {
        &self.def_order
    }

    pub fn count(&self, kind: VarKind) -> usize {
        self.vars.iter().filter(|v| v.kind == kind).count()
    }

    /// Runs the system on concrete values. `free[t]` supplies step `t`
    /// values for input variables and, on step 0, for state variables;
    /// missing ones default to false / zero. Constraints are not checked.
    pub fn simulate(&self, free: &[BTreeMap<VarId, Value>]) -> Result<Vec<Vec<Value>>, EvalError> {
        let mut rows: Vec<Vec<Value>> = Vec::with_capacity(free.len());
        for (t, given) in free.iter().enumerate() {
            let mut row: Vec<Option<Value>> = vec![None; self.vars.len()];
            for (v, decl) in self.vars.iter().enumerate() {
                match decl.kind {
                    VarKind::Init => row[v] = Some(Value::Bool(t == 0)),
                    VarKind::Input => row[v] = Some(given.get(&v).cloned().unwrap_or_else(|| default_value(&decl.ty))),
                    VarKind::State if t == 0 => {
                        row[v] = Some(given.get(&v).cloned().unwrap_or_else(|| default_value(&decl.ty)))
                    }
                    _ => {}
                }
            }
            if t > 0 {
                for &(p, y) in &self.pre_links {
                    row[p] = Some(rows[t - 1][y].clone());
                }
            }
            for &v in &self.def_order {
                let val = {
                    let lookup = |w: VarId| row[w].clone();
                    self.defs[v].as_ref().unwrap().eval(&lookup)?
                };
                row[v] = Some(val);
            }
            rows.push(row.into_iter().map(|x| x.expect("every variable valued")).collect());
        }
        Ok(rows)
    }

    /// Index of the first constraint violated on `row`, if any.
    pub fn violated_constraint(&self, row: &[Value]) -> Result<Option<usize>, EvalError> {
        let lookup = |w: VarId| row.get(w).cloned();
        for (i, c) in self.constraints.iter().enumerate() {
            if c.term.eval(&lookup)? != Value::Bool(true) {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Replays `trace` against the system: the first-step flag, every pre
    /// link, every definition and every constraint must hold exactly.
    pub fn validate_trace(&self, trace: &Trace) -> Result<(), String> {
        if trace.vars.len() != self.vars.len() {
            return Err("trace does not cover every variable".into());
        }
        for (i, (name, ty)) in trace.vars.iter().enumerate() {
            if *name != self.vars[i].name || *ty != self.vars[i].ty {
                return Err(format!("trace column {i} is '{name}', expected '{}'", self.vars[i].name));
            }
        }
        for (t, row) in trace.steps.iter().enumerate() {
            if row.len() != self.vars.len() {
                return Err(format!("step {t} has {} values", row.len()));
            }
            for (v, val) in row.iter().enumerate() {
                let ok = matches!(
                    (&self.vars[v].ty, val),
                    (Type::Bool, Value::Bool(_)) | (Type::Int, Value::Int(_)) | (Type::Real, Value::Real(_))
                );
                if !ok {
                    return Err(format!("step {t}: '{}' has a {} value", self.vars[v].name, val.type_name()));
                }
            }
            if row[self.init()] != Value::Bool(t == 0) {
                return Err(format!("step {t}: first-step flag is wrong"));
            }
            if t > 0 {
                for &(p, y) in &self.pre_links {
                    if row[p] != trace.steps[t - 1][y] {
                        return Err(format!(
                            "step {t}: '{}' is not the previous value of '{}'",
                            self.vars[p].name, self.vars[y].name
                        ));
                    }
                }
            }
            let lookup = |w: VarId| row.get(w).cloned();
            for &v in &self.def_order {
                let expect = self.defs[v].as_ref().unwrap().eval(&lookup).map_err(|e| e.to_string())?;
                if expect != row[v] {
                    return Err(format!(
                        "step {t}: '{}' is {} but its definition gives {}",
                        self.vars[v].name, row[v], expect
                    ));
                }
            }
            if let Some(i) = self.violated_constraint(row).map_err(|e| e.to_string())? {
                return Err(format!("step {t}: constraint '{}' does not hold", self.constraints[i].label));
            }
        }
        Ok(())
    }

    /// Lustre-like listing, one equation per line.
    pub fn dump(&self) -> String {
        let name = |v: VarId| self.vars[v].name.clone();
        let mut out = String::new();
        let _ = writeln!(out, "system");
        for v in &self.vars {
            let kind = match v.kind {
                VarKind::Input => "input",
                VarKind::Defined => "defined",
                VarKind::State => "state",
                VarKind::Init => "init",
            };
            let _ = writeln!(out, "  var {} : {}; -- {kind}", v.name, v.ty);
        }
        let _ = writeln!(out, "let");
        let _ = writeln!(out, "  {} = true -> false;", self.vars[self.init()].name);
        for &(p, y) in &self.pre_links {
            let _ = writeln!(out, "  {} = pre({});", name(p), name(y));
        }
        for (v, d) in self.defs.iter().enumerate() {
            if let Some(t) = d {
                let _ = writeln!(out, "  {} = {};", name(v), t.display(&name));
            }
        }
        for c in &self.constraints {
            let _ = writeln!(out, "  assert {}; -- {}", c.term.display(&name), c.label);
        }
        for s in &self.streams {
            let role = serde_json::to_value(s.role).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
            let owner = if s.owner.is_empty() { String::new() } else { format!("{} ", s.owner) };
            let _ = writeln!(out, "  --%{role} {owner}\"{}\" : {};", s.label, name(s.var));
        }
        let _ = writeln!(out, "tel");
        out
    }
}

pub fn default_value(ty: &Type) -> Value {
    match ty {
        Type::Bool => Value::Bool(false),
        Type::Int => Value::int(0),
        _ => Value::real(0, 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bools(ts: &TransitionSystem, x: VarId, xs: &[bool]) -> Vec<BTreeMap<VarId, Value>> {
        let _ = ts;
        xs.iter().map(|b| BTreeMap::from([(x, Value::Bool(*b))])).collect()
    }

    fn column(rows: &[Vec<Value>], v: VarId) -> Vec<bool> {
        rows.iter().map(|r| r[v].as_bool().unwrap()).collect()
    }

    #[test]
    fn historically() {
        let mut ts = TransitionSystem::new();
        let x = ts.declare("x", Type::Bool, VarKind::Input).unwrap();
        let h = ts.historically(x);
        assert_eq!(ts.historically(x), h);
        ts.finish().unwrap();
        let run = |xs: &[bool]| column(&ts.simulate(&bools(&ts, x, xs)).unwrap(), h);
        assert_eq!(run(&[true, true, false, true]), [true, true, false, false]);
        assert_eq!(run(&[true, true, true]), [true, true, true]);
        assert_eq!(run(&[false, true, true]), [false, false, false]);
    }

    #[test]
    fn z_operator() {
        let mut ts = TransitionSystem::new();
        let x = ts.declare("x", Type::Bool, VarKind::Input).unwrap();
        let z = ts.z(x);
        let h = ts.historically(x);
        let zh = ts.z(h);
        ts.finish().unwrap();
        let rows = ts.simulate(&bools(&ts, x, &[false, true, true])).unwrap();
        assert_eq!(column(&rows, z), [true, false, true]);
        let rows = ts.simulate(&bools(&ts, x, &[true, false, true, true])).unwrap();
        assert_eq!(column(&rows, zh), [true, true, false, false]);
    }

    #[test]
    fn simulated_runs_validate() {
        let mut ts = TransitionSystem::new();
        let x = ts.declare("x", Type::Bool, VarKind::Input).unwrap();
        ts.historically(x);
        ts.finish().unwrap();
        let rows = ts.simulate(&bools(&ts, x, &[true, false])).unwrap();
        let mut trace = Trace::new(&ts, rows);
        ts.validate_trace(&trace).unwrap();
        trace.steps[1][0] = Value::Bool(true);
        assert!(ts.validate_trace(&trace).is_err());
    }

    #[test]
    fn loops_are_reported() {
        let mut ts = TransitionSystem::new();
        let a = ts.declare("a", Type::Bool, VarKind::Defined).unwrap();
        let b = ts.declare("b", Type::Bool, VarKind::Defined).unwrap();
        ts.define(a, Term::Var(b)).unwrap();
        ts.define(b, Term::not(Term::Var(a))).unwrap();
        assert!(ts.finish().unwrap_err().contains("algebraic loop"));
    }
}
