//! Concrete executions of a transition system.

use std::fmt::Write as _;

use serde_json::json;

use crate::ts::system::TransitionSystem;
use crate::value::{Type, Value};

/// Values of every variable of a system on steps `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub vars: Vec<(String, Type)>,
    pub steps: Vec<Vec<Value>>,
}

/// Names containing `~` are generated by the compiler.
pub fn is_internal(name: &str) -> bool {
    name.contains('~')
}

impl Trace {
    pub fn new(ts: &TransitionSystem, steps: Vec<Vec<Value>>) -> Trace {
        Trace {
            vars: ts.vars.iter().map(|v| (v.name.clone(), v.ty.clone())).collect(),
            steps,
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|(n, _)| n == name)
    }

    pub fn value(&self, name: &str, step: usize) -> Option<&Value> {
        let i = self.index(name)?;
        self.steps.get(step).map(|row| &row[i])
    }

    /// Columns worth showing to a user, in declaration order.
    pub fn visible(&self) -> impl Iterator<Item = (usize, &str)> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, (n, _))| !is_internal(n))
            .map(|(i, (n, _))| (i, n.as_str()))
    }

    /// One line per variable: `name: step0=v step1=v ...`.
    pub fn render_table(&self) -> String {
        let width = self.visible().map(|(_, n)| n.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (i, name) in self.visible() {
            let _ = write!(out, "{:width$}", format!("{name}:"), width = width + 1);
            for (t, row) in self.steps.iter().enumerate() {
                let _ = write!(out, " step{t}={}", row[i]);
            }
            out.push('\n');
        }
        out
    }

    /// `{"length": n, "variables": [{"name", "type", "values"}]}` with
    /// numbers as exact strings (`p/q` for non-integral reals).
    pub fn to_json(&self) -> serde_json::Value {
        let vars: Vec<serde_json::Value> = self
            .visible()
            .map(|(i, name)| {
                let values: Vec<serde_json::Value> = self
                    .steps
                    .iter()
                    .map(|row| match &row[i] {
                        Value::Bool(b) => json!(b),
                        v => json!(v.to_string()),
                    })
                    .collect();
                json!({"name": name, "type": self.vars[i].1.to_string(), "values": values})
            })
            .collect();
        json!({"length": self.len(), "variables": vars})
    }
}
