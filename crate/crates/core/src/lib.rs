//! Proof checking, proof transformers and finite-model semantics for the
//! first-order justification logics FOLPb and FOJT45.

pub mod axioms;
pub mod harness;
pub mod kernel;
pub mod semantics;
pub mod syntax;
pub mod templates;
pub mod textio;
pub mod transform;

pub use axioms::{ConstantSpec, Logic, SchemaId};
pub use kernel::{check, check_theorem, CheckReport, Derivation, Rule, Step, Verdict};
pub use syntax::{Formula, Term, Var, VarSet};
