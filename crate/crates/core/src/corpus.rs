//! The flight-control case study shipped under `corpus/`, with its golden
//! expectations.
//!
//! `corpus/golden.json` lists every case: the model files, the root or
//! component under analysis, the analysis to run and the expected verdict
//! of every obligation.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::analyses::{check_component_consistency, check_component_realizability, verify_all, Report, Status};
use crate::engine::{CheckConfig, Trace};
use crate::model::{instantiate, load_system, Library};
use crate::value::Value;

/// Guarantee counts of the full-scale model, per component type. The desk
/// model only aims to match CLAW and FCS.
pub const REFERENCE_GUARANTEES: [(&str, usize); 5] = [("FCS", 2), ("FCC", 9), ("OSAS", 9), ("ISAS", 11), ("CLAW", 1)];

/// Component types whose desk-scale guarantee count must match the
/// reference.
pub const MATCHED_COUNTS: [&str; 2] = ["FCS", "CLAW"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    Verify,
    Consistency,
    Realizability,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CorpusCase {
    pub name: String,
    /// Model files and directories, relative to the corpus directory.
    pub files: Vec<String>,
    /// Root implementation for `verify`, component otherwise.
    pub target: String,
    pub analysis: Analysis,
    #[serde(default)]
    pub depth: Option<usize>,
    /// Expected verdict tag of every obligation, keyed by obligation name.
    pub expected: BTreeMap<String, String>,
    pub status: Status,
    /// Ties between the guarantees involved and their requirement IDs.
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed golden file: {0}")]
    Golden(#[from] serde_json::Error),
    #[error("case {case}: {message}")]
    Case { case: String, message: String },
}

/// The `corpus/` directory of this repository.
pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Reads the golden cases of the repository corpus and checks that each one
/// loads without errors or warnings.
pub fn load_corpus() -> Result<Vec<CorpusCase>, CorpusError> {
    load_corpus_from(&corpus_dir())
}

pub fn load_corpus_from(dir: &Path) -> Result<Vec<CorpusCase>, CorpusError> {
    let golden = dir.join("golden.json");
    let text = std::fs::read_to_string(&golden).map_err(|source| CorpusError::Io {
        path: golden.display().to_string(),
        source,
    })?;
    let cases: Vec<CorpusCase> = serde_json::from_str(&text)?;
    for c in &cases {
        let lib = c.library(dir)?;
        if let Some(w) = lib.warnings.first() {
            return Err(c.error(format!("lint warning: {w}")));
        }
        let known = match c.analysis {
            Analysis::Verify => lib.impls.contains_key(&c.target),
            _ => lib.types.contains_key(&c.target) || lib.impls.contains_key(&c.target),
        };
        if !known {
            return Err(c.error(format!("unknown target '{}'", c.target)));
        }
    }
    Ok(cases)
}

impl CorpusCase {
    fn error(&self, message: String) -> CorpusError {
        CorpusError::Case {
            case: self.name.clone(),
            message,
        }
    }

    pub fn paths(&self, dir: &Path) -> Vec<PathBuf> {
        self.files.iter().map(|f| dir.join(f)).collect()
    }

    pub fn library(&self, dir: &Path) -> Result<Library, CorpusError> {
        load_system(&self.paths(dir)).map_err(|e| self.error(e.to_string()))
    }

    /// Runs the analysis of this case.
    pub fn run(&self, dir: &Path, cfg: &CheckConfig) -> Result<Report, CorpusError> {
        let lib = self.library(dir)?;
        let depth = self.depth.unwrap_or(5);
        Ok(match self.analysis {
            Analysis::Verify => {
                let system = instantiate(&lib, &self.target).map_err(|e| self.error(e))?;
                verify_all(&system, cfg)
            }
            Analysis::Consistency => Report {
                checks: vec![check_component_consistency(&lib, &self.target, depth, cfg)],
                lints: lib.warnings.clone(),
                ..Report::default()
            },
            Analysis::Realizability => Report {
                checks: vec![check_component_realizability(&lib, &self.target, depth, cfg)],
                lints: lib.warnings.clone(),
                ..Report::default()
            },
        })
    }

    /// Differences between `report` and the expectations, one line each.
    pub fn mismatches(&self, report: &Report) -> Vec<String> {
        let actual: BTreeMap<String, String> = report
            .obligations()
            .map(|o| (o.name.clone(), o.verdict.tag().to_string()))
            .collect();
        let mut out = Vec::new();
        for (name, want) in &self.expected {
            match actual.get(name) {
                Some(got) if got == want => {}
                Some(got) => out.push(format!("{name}: expected {want}, got {got}")),
                None => out.push(format!("{name}: expected {want}, not reported")),
            }
        }
        for name in actual.keys().filter(|n| !self.expected.contains_key(*n)) {
            out.push(format!("{name}: reported but not expected"));
        }
        if report.status() != self.status {
            out.push(format!("status: expected {:?}, got {:?}", self.status, report.status()));
        }
        out
    }
}

/// Number of guarantees of each component type in `lib`, next to the
/// reference count where there is one.
pub fn guarantee_counts(lib: &Library) -> Vec<(String, usize, Option<usize>)> {
    lib.types
        .values()
        .map(|t| {
            let reference = REFERENCE_GUARANTEES.iter().find(|(n, _)| *n == t.name).map(|(_, c)| *c);
            (t.name.clone(), t.contract.guarantees.len(), reference)
        })
        .collect()
}

fn real(v: &Value) -> Option<num_rational::BigRational> {
    match v {
        Value::Real(r) => Some(r.clone()),
        _ => None,
    }
}

/// Checks that some step of `trace` shows the dual-signal scenario the ISAS
/// implementation gets wrong: both channels usable, the channels
/// miscompare, the EGI value is not faulty, channel 1 miscompares with the
/// EGI value and channel 2 does not. Returns the first such step.
pub fn dual_mismatch_scenario(trace: &Trace, dtol: &Value) -> Result<usize, String> {
    let dtol = real(dtol).ok_or("tolerance must be real")?;
    let miscompare = |a: &num_rational::BigRational, b: &num_rational::BigRational| {
        let d = a - b;
        d > dtol || -d > dtol
    };
    let get = |name: &str, t: usize| trace.value(name, t).ok_or_else(|| format!("trace has no '{name}'"));
    for t in 0..trace.len() {
        let flag = |name: &str| -> Result<bool, String> { Ok(get(name, t)? == &Value::Bool(true)) };
        let num = |name: &str| -> Result<num_rational::BigRational, String> {
            real(get(name, t)?).ok_or_else(|| format!("'{name}' is not real"))
        };
        let (d1, d2, egi) = (num("d1")?, num("d2")?, num("egi")?);
        let holds = flag("d1_ok")?
            && flag("d2_ok")?
            && miscompare(&d1, &d2)
            && flag("egi_ok")?
            && miscompare(&d1, &egi)
            && !miscompare(&d2, &egi);
        if holds {
            return Ok(t);
        }
    }
    Err("no step of the trace shows the scenario".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ts::{TransitionSystem, VarKind};
    use crate::value::Type;

    #[test]
    fn golden_cases_load_lint_clean() {
        let cases = load_corpus().unwrap();
        assert!(cases.len() >= 10);
        let names: Vec<&str> = cases.iter().map(|c| c.name.as_str()).collect();
        for n in ["fcs_layer", "osas_original_realizability", "fcc_bound_as_printed"] {
            assert!(names.contains(&n), "{n}");
        }
    }

    #[test]
    fn matched_guarantee_counts() {
        let lib = load_system(&[corpus_dir().join("qfcs")]).unwrap();
        let counts = guarantee_counts(&lib);
        for name in MATCHED_COUNTS {
            let (_, n, r) = counts.iter().find(|(t, _, _)| t == name).unwrap();
            assert_eq!(Some(*n), *r, "{name}");
        }
    }

    #[test]
    fn every_glue_constraint_is_labeled() {
        let lib = load_system(&[corpus_dir().join("qfcs")]).unwrap();
        for t in lib.types.values() {
            for a in &t.contract.assumptions {
                if a.label.starts_with("GLUE") {
                    continue;
                }
                assert!(t.name == "CLAW", "unlabeled assumption {} of {}", a.label, t.name);
            }
        }
        let dir = corpus_dir().join("qfcs");
        for entry in std::fs::read_dir(&dir).unwrap() {
            let text = std::fs::read_to_string(entry.unwrap().path()).unwrap_or_default();
            for line in text.lines().filter(|l| l.contains("GLUE") && l.trim_start().starts_with("--")) {
                assert!(line.contains("-- GLUE (implementer-authored)"), "{line}");
            }
        }
    }

    fn scenario_trace(d1: i64, d2: i64, egi: i64, egi_ok: bool) -> Trace {
        let mut ts = TransitionSystem::new();
        for n in ["d1", "d2", "egi"] {
            ts.declare(n, Type::Real, VarKind::Input).unwrap();
        }
        for n in ["d1_ok", "d2_ok", "egi_ok"] {
            ts.declare(n, Type::Bool, VarKind::Input).unwrap();
        }
        let row = vec![
            Value::Bool(true),
            Value::real(d1, 1),
            Value::real(d2, 1),
            Value::real(egi, 1),
            Value::Bool(true),
            Value::Bool(true),
            Value::Bool(egi_ok),
        ];
        Trace::new(&ts, vec![row])
    }

    #[test]
    fn scenario_check_accepts_only_the_described_case() {
        let dtol = Value::real(1, 1);
        assert_eq!(dual_mismatch_scenario(&scenario_trace(5, 0, 0, true), &dtol), Ok(0));
        assert!(dual_mismatch_scenario(&scenario_trace(5, 0, 0, false), &dtol).is_err());
        assert!(dual_mismatch_scenario(&scenario_trace(0, 5, 0, true), &dtol).is_err());
        assert!(dual_mismatch_scenario(&scenario_trace(1, 0, 0, true), &dtol).is_err());
    }
}
