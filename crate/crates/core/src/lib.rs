//! Compositional assume-guarantee verification.
//!
//! Components carry contracts (assumptions over their inputs, guarantees over
//! their outputs) and are composed into a hierarchy of implementations. Each
//! parent/children layer is checked independently: the assumptions of every
//! subcomponent must follow from the parent's assumptions and the guarantees
//! of earlier siblings, and the parent's guarantees must follow from its
//! assumptions together with all children's guarantees. Obligations are
//! discharged by k-induction against an external SMT-LIB v2 solver.
//!
//! Crate layout:
//!
//! * [`lang`]: lexer, parser, type checker, lints and a stream interpreter
//!   for the Lustre-like contract language.
//! * [`model`]: component types, implementations, loading of system
//!   description files and instantiation into a [`model::SystemInstance`].
//! * [`ts`]: lowering of one layer into a [`ts::TransitionSystem`] and
//!   construction of [`ts::ProofObligation`]s.
//! * [`engine`]: solver sessions, k-induction, consistency and bounded
//!   realizability checks.
//! * [`analyses`]: whole-tree orchestration and report rendering.
//! * [`corpus`]: the flight-control case study shipped with the repository.

pub mod analyses;
pub mod corpus;
pub mod diag;
pub mod engine;
pub mod lang;
pub mod model;
pub mod ts;
pub mod value;

pub use analyses::{render_report, verify_all, Report, ReportFormat};
pub use diag::{Diagnostic, Severity, Span};
pub use engine::{CheckConfig, Trace, Verdict};
pub use model::{instantiate, load_sources, load_system, Library, SystemInstance};
pub use ts::{ProofObligation, TransitionSystem};
pub use value::{Type, Value};
