//! Human-readable and JSON renderings of a report.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value as Json;

use crate::analyses::{LayerResult, ObligationResult, Report, Status};
use crate::diag::{Diagnostic, Severity};
use crate::engine::Verdict;
use crate::ts::ObligationKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Human,
    Json,
}

pub fn render_report(report: &Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Human => human(report),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&JsonReport::from(report)).expect("report serializes");
            s.push('\n');
            s
        }
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Passed => "passed",
        Status::Failed => "failed",
        Status::Unknown => "unknown",
    }
}

fn indent(text: &str, by: usize) -> String {
    let pad = " ".repeat(by);
    text.lines().map(|l| format!("{pad}{l}\n")).collect()
}

fn human_obligation(out: &mut String, o: &ObligationResult) {
    let _ = writeln!(out, "  [{}] {} ({} ms)", o.verdict, o.name, o.time.as_millis());
    if let Some(t) = o.verdict.trace() {
        let title = match o.verdict {
            Verdict::Falsified(_) => "counterexample",
            Verdict::UnrealizableWitness(_) => "unrealizability witness",
            _ => "witness",
        };
        let _ = writeln!(out, "    {title}:");
        out.push_str(&indent(&t.render_table(), 6));
    }
}

fn human(report: &Report) -> String {
    let mut out = String::new();
    if let Some(root) = &report.root {
        let _ = writeln!(out, "system {root}");
    }
    for d in &report.lints {
        let _ = writeln!(out, "{d}");
    }
    for l in &report.layers {
        let _ = writeln!(
            out,
            "layer {} [{}]: {}",
            l.implementation,
            l.instances.join(", "),
            status_word(l.status())
        );
        if !l.order.is_empty() {
            let cyc = if l.cyclic { " (cyclic connections)" } else { "" };
            let _ = writeln!(out, "  order: {}{cyc}", l.order.join(", "));
        }
        for o in l.obligations() {
            human_obligation(&mut out, o);
        }
        if l.guarantee.verdict.is_proved() && !l.sound() {
            let _ = writeln!(out, "  note: guarantees proved, but not every assumption obligation is");
        }
    }
    for c in &report.checks {
        human_obligation(&mut out, c);
    }
    let _ = writeln!(out, "status: {}", status_word(report.status()));
    out
}

#[derive(Serialize)]
struct JsonReport {
    root: Option<String>,
    status: Status,
    layers: Vec<JsonLayer>,
    obligations: Vec<JsonObligation>,
    lints: Vec<JsonLint>,
}

#[derive(Serialize)]
struct JsonLayer {
    implementation: String,
    instances: Vec<String>,
    order: Vec<String>,
    cyclic: bool,
    status: Status,
    sound: bool,
    obligations: Vec<JsonObligation>,
}

#[derive(Serialize)]
struct JsonObligation {
    name: String,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    subcomponent: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    verdict: &'static str,
    k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    depth: Option<usize>,
    time_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    provenance: Vec<String>,
    antecedent: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Json>,
}

#[derive(Serialize)]
struct JsonLint {
    severity: &'static str,
    file: Option<String>,
    line: u32,
    col: u32,
    message: String,
}

impl From<&ObligationResult> for JsonObligation {
    fn from(o: &ObligationResult) -> JsonObligation {
        let (subcomponent, label) = match &o.kind {
            ObligationKind::Assumption { subcomponent } => (Some(subcomponent.clone()), None),
            ObligationKind::Lemma { label } => (None, Some(label.clone())),
            _ => (None, None),
        };
        let depth = match &o.verdict {
            Verdict::Inconsistent { depth } | Verdict::NoWitnessUpTo { depth } => Some(*depth),
            _ => None,
        };
        JsonObligation {
            name: o.name.clone(),
            kind: o.kind.tag(),
            subcomponent,
            label,
            verdict: o.verdict.tag(),
            k: match o.verdict {
                Verdict::Proved { k } => Some(k),
                _ => None,
            },
            depth,
            time_ms: o.time.as_millis() as u64,
            reason: match &o.verdict {
                Verdict::Unknown { reason } => Some(reason.clone()),
                _ => None,
            },
            provenance: o.provenance.clone(),
            antecedent: o.antecedent.clone(),
            trace: o.verdict.trace().map(|t| t.to_json()),
        }
    }
}

impl From<&LayerResult> for JsonLayer {
    fn from(l: &LayerResult) -> JsonLayer {
        JsonLayer {
            implementation: l.implementation.clone(),
            instances: l.instances.clone(),
            order: l.order.clone(),
            cyclic: l.cyclic,
            status: l.status(),
            sound: l.sound(),
            obligations: l.obligations().map(JsonObligation::from).collect(),
        }
    }
}

impl From<&Diagnostic> for JsonLint {
    fn from(d: &Diagnostic) -> JsonLint {
        JsonLint {
            severity: match d.severity {
                Severity::Warning => "warning",
                Severity::Error => "error",
            },
            file: d.file.clone(),
            line: d.span.line,
            col: d.span.col,
            message: d.message.clone(),
        }
    }
}

impl From<&Report> for JsonReport {
    fn from(r: &Report) -> JsonReport {
        JsonReport {
            root: r.root.clone(),
            status: r.status(),
            layers: r.layers.iter().map(JsonLayer::from).collect(),
            obligations: r.checks.iter().map(JsonObligation::from).collect(),
            lints: r.lints.iter().map(JsonLint::from).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ts::{TransitionSystem, Trace, VarKind};
    use crate::value::{Type, Value};
    use std::time::Duration;

    #[test]
    fn empty_report_is_valid_json() {
        let text = render_report(&Report::default(), ReportFormat::Json);
        let v: Json = serde_json::from_str(&text).unwrap();
        assert_eq!(v["layers"].as_array().unwrap().len(), 0);
        assert_eq!(v["status"], "passed");
    }

    fn witness_report() -> Report {
        let mut ts = TransitionSystem::new();
        ts.declare("latched_failed", Type::Bool, VarKind::Input).unwrap();
        ts.declare("ccdl_failed", Type::Bool, VarKind::Input).unwrap();
        ts.declare("gain", Type::Real, VarKind::Input).unwrap();
        let row = vec![Value::Bool(true), Value::Bool(true), Value::Bool(true), Value::real(4, 3)];
        let trace = Trace::new(&ts, vec![row]);
        Report {
            root: None,
            layers: Vec::new(),
            checks: vec![ObligationResult {
                name: "OSAS: realizability".into(),
                kind: ObligationKind::Realizability { depth: 5 },
                verdict: Verdict::UnrealizableWitness(trace),
                time: Duration::from_millis(3),
                provenance: Vec::new(),
                antecedent: Vec::new(),
            }],
            lints: Vec::new(),
        }
    }

    #[test]
    fn witnesses_render_as_tables() {
        let text = render_report(&witness_report(), ReportFormat::Human);
        assert!(text.contains("latched_failed: step0=true"), "{text}");
        assert!(text.contains("ccdl_failed:    step0=true"), "{text}");
        assert!(text.contains("gain:           step0=4/3"), "{text}");
        assert!(!text.contains("~init"));
        assert!(text.ends_with("status: failed\n"));
    }

    #[test]
    fn json_obligations_follow_the_schema() {
        let v: Json = serde_json::from_str(&render_report(&witness_report(), ReportFormat::Json)).unwrap();
        let o = &v["obligations"][0];
        assert_eq!(o["kind"], "realizability");
        assert_eq!(o["verdict"], "unrealizable");
        assert!(o["k"].is_null());
        assert_eq!(o["time_ms"], 3);
        assert_eq!(o["trace"]["length"], 1);
        assert_eq!(o["trace"]["variables"][2]["values"][0], "4/3");
    }
}
