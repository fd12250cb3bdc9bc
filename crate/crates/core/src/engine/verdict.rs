//! Outcomes of checking one obligation.

use std::fmt;

use crate::ts::Trace;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// The property is `k`-inductive and holds on the first `k` steps.
    Proved { k: usize },
    Falsified(Trace),
    ConsistentWitness(Trace),
    /// No run of `depth` steps satisfies the contract.
    Inconsistent { depth: usize },
    /// An input history whose last step admits no guarantee-satisfying
    /// output.
    UnrealizableWitness(Trace),
    NoWitnessUpTo { depth: usize },
    Unknown { reason: String },
}

impl Verdict {
    pub fn unknown(reason: impl Into<String>) -> Verdict {
        Verdict::Unknown { reason: reason.into() }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Proved { .. } => "proved",
            Verdict::Falsified(_) => "falsified",
            Verdict::ConsistentWitness(_) => "consistent",
            Verdict::Inconsistent { .. } => "inconsistent",
            Verdict::UnrealizableWitness(_) => "unrealizable",
            Verdict::NoWitnessUpTo { .. } => "no_witness",
            Verdict::Unknown { .. } => "unknown",
        }
    }

    /// Falsified, inconsistent or unrealizable.
    pub fn is_failure(&self) -> bool {
        matches!(
            self,
            Verdict::Falsified(_) | Verdict::Inconsistent { .. } | Verdict::UnrealizableWitness(_)
        )
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown { .. })
    }

    pub fn is_proved(&self) -> bool {
        matches!(self, Verdict::Proved { .. })
    }

    pub fn trace(&self) -> Option<&Trace> {
        match self {
            Verdict::Falsified(t) | Verdict::ConsistentWitness(t) | Verdict::UnrealizableWitness(t) => Some(t),
            _ => None,
        }
    }

    /// The induction depth or search depth carried by the verdict.
    pub fn depth(&self) -> Option<usize> {
        match self {
            Verdict::Proved { k } => Some(*k),
            Verdict::Inconsistent { depth } | Verdict::NoWitnessUpTo { depth } => Some(*depth),
            Verdict::Falsified(t) | Verdict::ConsistentWitness(t) | Verdict::UnrealizableWitness(t) => Some(t.len()),
            Verdict::Unknown { .. } => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Proved { k } => write!(f, "proved (k = {k})"),
            Verdict::Falsified(t) => write!(f, "falsified (trace of length {})", t.len()),
            Verdict::ConsistentWitness(t) => write!(f, "consistent (witness of length {})", t.len()),
            Verdict::Inconsistent { depth } => write!(f, "inconsistent at depth {depth}"),
            Verdict::UnrealizableWitness(t) => write!(f, "unrealizable (witness of length {})", t.len()),
            Verdict::NoWitnessUpTo { depth } => write!(f, "no unrealizability witness up to depth {depth}"),
            Verdict::Unknown { reason } => write!(f, "unknown ({reason})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert!(Verdict::Inconsistent { depth: 1 }.is_failure());
        assert!(!Verdict::NoWitnessUpTo { depth: 5 }.is_failure());
        assert!(Verdict::unknown("timeout").is_unknown());
        assert_eq!(Verdict::Proved { k: 2 }.to_string(), "proved (k = 2)");
        assert_eq!(Verdict::Proved { k: 2 }.depth(), Some(2));
    }
}
