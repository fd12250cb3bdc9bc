//! Transition systems: lowering of layers and the proof obligations built
//! on them.

mod layer;
mod lower;
mod obligation;
mod system;
mod term;
mod trace;

pub use layer::{compile_layer, ContractStreams, Layer};
pub use lower::Lowerer;
pub use obligation::{consistency_query, layer_obligations, realizability_query, ObligationKind, ProofObligation, Query};
pub use system::{default_value, Constraint, NamedStream, StreamRole, TransitionSystem, VarDecl, VarKind};
pub use term::{sort_of, Term, VarId};
pub use trace::{is_internal, Trace};
