//! Proof obligations of a layer: the assumption and guarantee rules,
//! lemmas, consistency and bounded realizability.

use std::sync::Arc;

use serde::Serialize;

use crate::ts::layer::Layer;
use crate::ts::system::{StreamRole, TransitionSystem};
use crate::ts::term::{Term, VarId};
use crate::value::Type;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObligationKind {
    /// The assumptions of one subcomponent.
    Assumption { subcomponent: String },
    /// The parent's guarantees.
    Guarantee,
    Lemma { label: String },
    Consistency { depth: usize },
    Realizability { depth: usize },
}

impl ObligationKind {
    pub fn tag(&self) -> &'static str {
        match self {
            ObligationKind::Assumption { .. } => "assumption",
            ObligationKind::Guarantee => "guarantee",
            ObligationKind::Lemma { .. } => "lemma",
            ObligationKind::Consistency { .. } => "consistency",
            ObligationKind::Realizability { .. } => "realizability",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    /// `property` holds on every reachable step. `invariants` are streams
    /// already proved invariant that may strengthen the induction.
    Invariant { property: VarId, invariants: Vec<VarId> },
    /// Some run of `depth` steps keeps `constraint` true throughout.
    Satisfiable { constraint: VarId, depth: usize },
    /// Search for an input history after which no output satisfies the
    /// guarantees, up to `depth`.
    Realizable {
        inputs: Vec<VarId>,
        assumption: VarId,
        guarantee: VarId,
        depth: usize,
    },
}

#[derive(Debug, Clone)]
pub struct ProofObligation {
    pub name: String,
    pub kind: ObligationKind,
    pub ts: Arc<TransitionSystem>,
    pub query: Query,
    /// Source component followed by the contract statements involved.
    pub provenance: Vec<String>,
    /// Human-readable conjuncts of the antecedent, e.g. `H(fcc1.G)`.
    pub antecedent: Vec<String>,
}

/// Variable for the conjunction of `parts`.
fn conj(ts: &mut TransitionSystem, prefix: &str, parts: &[(String, VarId)]) -> Option<VarId> {
    if parts.is_empty() {
        return None;
    }
    let t = Term::and(parts.iter().map(|(_, v)| Term::Var(*v)));
    Some(ts.name_term(prefix, t, Type::Bool))
}

fn labels(parts: &[(String, VarId)]) -> Vec<String> {
    parts.iter().map(|(l, _)| l.clone()).collect()
}

/// Obligations of a layer: one per subcomponent with assumptions, the
/// parent guarantees, and one per lemma, in that order. Each antecedent is
///
/// * assumptions of `c`: `H(A) and Z(H(w_g)) for every w and H(v_g) for
///   every v ordered before c`;
/// * guarantees and lemmas: `H(A) and H(c_g) for every c`.
pub fn layer_obligations(mut layer: Layer) -> Vec<ProofObligation> {
    let ts = &mut layer.ts;
    let title = layer.impl_name.clone().unwrap_or_else(|| layer.type_name.clone());
    let sa = conj(ts, "A", &layer.parent.assumptions);
    let hsa = sa.map(|a| ts.historically(a));
    let mut hg = Vec::new();
    for c in &layer.children {
        let g = conj(ts, "G", &c.guarantees);
        hg.push(g.map(|g| (c.component.clone(), ts.historically(g))));
    }
    let zhg: Vec<Option<(String, VarId)>> = hg
        .iter()
        .map(|x| x.as_ref().map(|(n, h)| (n.clone(), ts.z(*h))))
        .collect();
    let base: Vec<(String, VarId)> = hsa.map(|h| ("H(A)".to_string(), h)).into_iter().collect();

    let mut out: Vec<(String, ObligationKind, VarId, Vec<String>, Vec<String>)> = Vec::new();
    for (rank, name) in layer.order.order.iter().enumerate() {
        let c = layer.children.iter().find(|c| &c.component == name).expect("ordered subcomponent");
        let Some(ca) = conj(ts, "A", &c.assumptions) else { continue };
        let mut ante = base.clone();
        for z in zhg.iter().flatten() {
            ante.push((format!("Z(H({}.G))", z.0), z.1));
        }
        for before in &layer.order.order[..rank] {
            let i = layer.children.iter().position(|x| &x.component == before).unwrap();
            if let Some((n, h)) = &hg[i] {
                ante.push((format!("H({n}.G)"), *h));
            }
        }
        let prop = Term::implies(Term::and(ante.iter().map(|(_, v)| Term::Var(*v))), Term::Var(ca));
        let pv = ts.name_term("prop", prop, Type::Bool);
        let mut prov = vec![name.clone()];
        prov.extend(labels(&c.assumptions));
        out.push((
            format!("{title}: assumptions of {name}"),
            ObligationKind::Assumption {
                subcomponent: name.clone(),
            },
            pv,
            prov,
            ante.into_iter().map(|(l, _)| l).collect(),
        ));
    }

    let mut ante = base.clone();
    for (n, h) in hg.iter().flatten() {
        ante.push((format!("H({n}.G)"), *h));
    }
    let ante_term = Term::and(ante.iter().map(|(_, v)| Term::Var(*v)));
    let ante_labels: Vec<String> = ante.iter().map(|(l, _)| l.clone()).collect();
    let sg = Term::and(layer.parent.guarantees.iter().map(|(_, v)| Term::Var(*v)));
    let gp = ts.name_term("prop", Term::implies(ante_term.clone(), sg), Type::Bool);
    let mut prov = vec![layer.type_name.clone()];
    prov.extend(labels(&layer.parent.guarantees));
    out.push((
        format!("{title}: guarantees"),
        ObligationKind::Guarantee,
        gp,
        prov,
        ante_labels.clone(),
    ));
    for (label, lv) in &layer.lemmas {
        let p = ts.name_term("prop", Term::implies(ante_term.clone(), Term::Var(*lv)), Type::Bool);
        out.push((
            format!("{title}: lemma \"{label}\""),
            ObligationKind::Lemma { label: label.clone() },
            p,
            vec![layer.type_name.clone(), label.clone()],
            ante_labels.clone(),
        ));
    }
    for (name, _, p, _, _) in &out {
        ts.add_stream(name, StreamRole::Property, "", *p);
    }
    ts.finish().expect("obligation streams keep the system well formed");
    let ts = Arc::new(layer.ts);
    out.into_iter()
        .map(|(name, kind, property, provenance, antecedent)| ProofObligation {
            name,
            kind,
            ts: ts.clone(),
            query: Query::Invariant {
                property,
                invariants: Vec::new(),
            },
            provenance,
            antecedent,
        })
        .collect()
}

/// Does a run of `depth` steps satisfy every assumption, guarantee and
/// assertion of the component on every step?
pub fn consistency_query(mut layer: Layer, depth: usize) -> ProofObligation {
    let ts = &mut layer.ts;
    let mut all = layer.parent.assumptions.clone();
    all.extend(layer.parent.guarantees.iter().cloned());
    let c = conj(ts, "C", &all).unwrap_or_else(|| ts.name_term("C", Term::Bool(true), Type::Bool));
    ts.finish().expect("consistency stream keeps the system well formed");
    let title = layer.impl_name.clone().unwrap_or_else(|| layer.type_name.clone());
    let mut prov = vec![layer.type_name.clone()];
    prov.extend(labels(&all));
    ProofObligation {
        name: format!("{title}: consistency"),
        kind: ObligationKind::Consistency { depth },
        ts: Arc::new(layer.ts),
        query: Query::Satisfiable { constraint: c, depth },
        provenance: prov,
        antecedent: Vec::new(),
    }
}

/// Bounded search for an unrealizability witness of the component's
/// contract.
pub fn realizability_query(mut layer: Layer, depth: usize) -> ProofObligation {
    let ts = &mut layer.ts;
    let t = Term::Bool(true);
    let a = conj(ts, "A", &layer.parent.assumptions).unwrap_or_else(|| ts.name_term("A", t.clone(), Type::Bool));
    let g = conj(ts, "G", &layer.parent.guarantees).unwrap_or_else(|| ts.name_term("G", t, Type::Bool));
    ts.finish().expect("realizability streams keep the system well formed");
    let mut prov = vec![layer.type_name.clone()];
    prov.extend(labels(&layer.parent.guarantees));
    ProofObligation {
        name: format!("{}: realizability", layer.type_name),
        kind: ObligationKind::Realizability { depth },
        ts: Arc::new(layer.ts),
        query: Query::Realizable {
            inputs: layer.inputs.clone(),
            assumption: a,
            guarantee: g,
            depth,
        },
        provenance: prov,
        antecedent: Vec::new(),
    }
}
