//! Whole-system verification: every implementation layer of an instance
//! tree, plus consistency and realizability of single contracts.

mod report;

use std::collections::BTreeMap;
use std::time::Duration;

use crate::diag::Diagnostic;
use crate::engine::{check_all, CheckConfig, Outcome, Verdict};
use crate::model::{Library, SystemInstance};
use crate::ts::{
    compile_layer, consistency_query, layer_obligations, realizability_query, ObligationKind, ProofObligation, Query,
};

pub use report::{render_report, ReportFormat};

/// Pass/fail summary of a verdict, a layer or a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Passed,
    Failed,
    Unknown,
}

impl Status {
    pub fn of(v: &Verdict) -> Status {
        if v.is_failure() {
            Status::Failed
        } else if v.is_unknown() {
            Status::Unknown
        } else {
            Status::Passed
        }
    }

    /// Failed if any part failed, otherwise unknown if any part is.
    pub fn combine(parts: impl IntoIterator<Item = Status>) -> Status {
        let mut out = Status::Passed;
        for s in parts {
            match s {
                Status::Failed => return Status::Failed,
                Status::Unknown => out = Status::Unknown,
                Status::Passed => {}
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct ObligationResult {
    pub name: String,
    pub kind: ObligationKind,
    pub verdict: Verdict,
    pub time: Duration,
    pub provenance: Vec<String>,
    pub antecedent: Vec<String>,
}

impl ObligationResult {
    fn new(ob: &ProofObligation, out: Outcome) -> ObligationResult {
        ObligationResult {
            name: ob.name.clone(),
            kind: ob.kind.clone(),
            verdict: out.verdict,
            time: out.time,
            provenance: ob.provenance.clone(),
            antecedent: ob.antecedent.clone(),
        }
    }

    fn failed_to_build(name: String, kind: ObligationKind, reason: String) -> ObligationResult {
        ObligationResult {
            name,
            kind,
            verdict: Verdict::Unknown { reason },
            time: Duration::ZERO,
            provenance: Vec::new(),
            antecedent: Vec::new(),
        }
    }
}

/// Results of one implementation layer. Instances sharing an
/// implementation share one layer.
#[derive(Debug, Clone)]
pub struct LayerResult {
    pub implementation: String,
    pub instances: Vec<String>,
    pub order: Vec<String>,
    pub cyclic: bool,
    pub assumptions: Vec<ObligationResult>,
    pub guarantee: ObligationResult,
    pub lemmas: Vec<ObligationResult>,
}

impl LayerResult {
    /// Passed when every assumption obligation and the guarantee
    /// obligation are proved. Lemmas do not count.
    pub fn status(&self) -> Status {
        let main = self.assumptions.iter().chain([&self.guarantee]);
        if main.clone().all(|o| o.verdict.is_proved()) {
            return Status::Passed;
        }
        match Status::combine(main.map(|o| Status::of(&o.verdict))) {
            Status::Passed => Status::Unknown,
            s => s,
        }
    }

    /// The guarantee proof is sound only when every assumption obligation
    /// of the layer is proved too.
    pub fn sound(&self) -> bool {
        self.assumptions.iter().all(|o| o.verdict.is_proved())
    }

    pub fn obligations(&self) -> impl Iterator<Item = &ObligationResult> {
        self.assumptions.iter().chain([&self.guarantee]).chain(&self.lemmas)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub root: Option<String>,
    pub layers: Vec<LayerResult>,
    /// Consistency and realizability checks.
    pub checks: Vec<ObligationResult>,
    pub lints: Vec<Diagnostic>,
}

impl Report {
    pub fn obligations(&self) -> impl Iterator<Item = &ObligationResult> {
        self.layers.iter().flat_map(|l| l.obligations()).chain(&self.checks)
    }

    /// Failed when any obligation or check failed, lemmas included;
    /// otherwise unknown when a layer is not fully proved or a check is
    /// unknown.
    pub fn status(&self) -> Status {
        if self.obligations().any(|o| o.verdict.is_failure()) {
            return Status::Failed;
        }
        Status::combine(
            self.layers
                .iter()
                .map(|l| l.status())
                .chain(self.checks.iter().map(|c| Status::of(&c.verdict))),
        )
    }

    pub fn layer(&self, implementation: &str) -> Option<&LayerResult> {
        self.layers.iter().find(|l| l.implementation == implementation)
    }
}

struct PendingLayer {
    implementation: String,
    instances: Vec<String>,
    order: Vec<String>,
    cyclic: bool,
    obligations: Vec<ProofObligation>,
    error: Option<String>,
}

/// Verifies every implementation layer of `system`. Assumption and lemma
/// obligations are checked first; proved lemmas then strengthen the
/// induction of the guarantee obligation of their layer.
pub fn verify_all(system: &SystemInstance, cfg: &CheckConfig) -> Report {
    let lib = &system.library;
    let mut pending: Vec<PendingLayer> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    for (node, order) in system.layers() {
        let imp = node.impl_name.clone().expect("layers have implementations");
        if let Some(&i) = index.get(&imp) {
            pending[i].instances.push(node.display_name().to_string());
            continue;
        }
        index.insert(imp.clone(), pending.len());
        let (obligations, error) = match compile_layer(lib, &node.type_name, Some(&imp)) {
            Ok(layer) => (layer_obligations(layer), None),
            Err(e) => (Vec::new(), Some(e)),
        };
        pending.push(PendingLayer {
            implementation: imp,
            instances: vec![node.display_name().to_string()],
            cyclic: order.is_cyclic(),
            order: order.order,
            obligations,
            error,
        });
    }

    let first: Vec<(usize, usize)> = pending
        .iter()
        .enumerate()
        .flat_map(|(li, l)| {
            l.obligations
                .iter()
                .enumerate()
                .filter(|(_, o)| o.kind != ObligationKind::Guarantee)
                .map(move |(oi, _)| (li, oi))
        })
        .collect();
    let batch: Vec<ProofObligation> = first.iter().map(|&(li, oi)| pending[li].obligations[oi].clone()).collect();
    let mut results: BTreeMap<(usize, usize), ObligationResult> = BTreeMap::new();
    for (&(li, oi), out) in first.iter().zip(check_all(&batch, cfg)) {
        results.insert((li, oi), ObligationResult::new(&pending[li].obligations[oi], out));
    }

    let mut second = Vec::new();
    let mut batch = Vec::new();
    for (li, l) in pending.iter().enumerate() {
        let proved_lemmas: Vec<usize> = l
            .obligations
            .iter()
            .enumerate()
            .filter(|(oi, o)| matches!(o.kind, ObligationKind::Lemma { .. }) && results[&(li, *oi)].verdict.is_proved())
            .filter_map(|(_, o)| match o.query {
                Query::Invariant { property, .. } => Some(property),
                _ => None,
            })
            .collect();
        for (oi, o) in l.obligations.iter().enumerate() {
            if o.kind != ObligationKind::Guarantee {
                continue;
            }
            let mut o = o.clone();
            if let Query::Invariant { invariants, .. } = &mut o.query {
                invariants.extend(proved_lemmas.iter().copied());
            }
            second.push((li, oi));
            batch.push(o);
        }
    }
    for (&(li, oi), out) in second.iter().zip(check_all(&batch, cfg)) {
        results.insert((li, oi), ObligationResult::new(&pending[li].obligations[oi], out));
    }

    let mut layers = Vec::new();
    for (li, l) in pending.into_iter().enumerate() {
        let mut assumptions = Vec::new();
        let mut lemmas = Vec::new();
        let mut guarantee = None;
        for (oi, o) in l.obligations.iter().enumerate() {
            let r = results.remove(&(li, oi)).expect("every obligation checked");
            match o.kind {
                ObligationKind::Assumption { .. } => assumptions.push(r),
                ObligationKind::Lemma { .. } => lemmas.push(r),
                _ => guarantee = Some(r),
            }
        }
        let guarantee = guarantee.unwrap_or_else(|| {
            ObligationResult::failed_to_build(
                format!("{}: guarantees", l.implementation),
                ObligationKind::Guarantee,
                l.error.clone().unwrap_or_else(|| "no guarantee obligation".into()),
            )
        });
        layers.push(LayerResult {
            implementation: l.implementation,
            instances: l.instances,
            order: l.order,
            cyclic: l.cyclic,
            assumptions,
            guarantee,
            lemmas,
        });
    }
    Report {
        root: Some(system.root.impl_name.clone().unwrap_or_else(|| system.root.type_name.clone())),
        layers,
        checks: Vec::new(),
        lints: lib.warnings.clone(),
    }
}

/// Resolves a component type or implementation name to its type.
fn component_type<'a>(lib: &'a Library, component: &'a str) -> Result<&'a str, String> {
    if lib.types.contains_key(component) {
        return Ok(component);
    }
    if let Some(i) = lib.impls.get(component) {
        return Ok(&i.type_name);
    }
    Err(format!("unknown component '{component}'"))
}

fn single_check(lib: &Library, component: &str, depth: usize, cfg: &CheckConfig, consistency: bool) -> ObligationResult {
    let (title, kind) = if consistency {
        ("consistency", ObligationKind::Consistency { depth })
    } else {
        ("realizability", ObligationKind::Realizability { depth })
    };
    let layer = component_type(lib, component).and_then(|ty| compile_layer(lib, ty, None));
    let layer = match layer {
        Ok(l) => l,
        Err(e) => return ObligationResult::failed_to_build(format!("{component}: {title}"), kind, e),
    };
    let ob = if consistency {
        consistency_query(layer, depth)
    } else {
        realizability_query(layer, depth)
    };
    let out = check_all(std::slice::from_ref(&ob), cfg).pop().expect("one outcome");
    ObligationResult::new(&ob, out)
}

/// Searches for a run of `depth` steps satisfying the contract of
/// `component` (a type or implementation name).
pub fn check_component_consistency(lib: &Library, component: &str, depth: usize, cfg: &CheckConfig) -> ObligationResult {
    single_check(lib, component, depth, cfg, true)
}

/// Searches for an unrealizability witness of the contract of `component`
/// up to `depth`.
pub fn check_component_realizability(
    lib: &Library,
    component: &str,
    depth: usize,
    cfg: &CheckConfig,
) -> ObligationResult {
    single_check(lib, component, depth, cfg, false)
}
